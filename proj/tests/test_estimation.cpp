#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gasfc/error.hpp"
#include "gasfc/estimation.hpp"
#include "gasfc/month_ahead.hpp"
#include "gasfc/random.hpp"
#include "gasfc/sst.hpp"
#include "gasfc/synthetic.hpp"
#include "support.hpp"

namespace gasfc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

TEST(ZTest, Examples) {
  const ZTestResult two = z_test(2.0, 1.0, 0.0, Alternative::two_sided);
  EXPECT_DOUBLE_EQ(two.statistic, 2.0);
  EXPECT_NEAR(two.p_value, 2.0 * normal_sf(2.0), 1e-14);
  EXPECT_NEAR(two.p_value, 0.0455, 1e-4);
  EXPECT_NEAR(z_test(2.0, 1.0, 0.0, Alternative::greater).p_value, 0.02275, 1e-5);
  EXPECT_NEAR(z_test(2.0, 1.0, 0.0, Alternative::less).p_value, 0.97725, 1e-5);
  const ZTestResult shifted = z_test(0.8, 0.1, 1.0, Alternative::less);
  EXPECT_NEAR(shifted.statistic, -2.0, 1e-12);
  EXPECT_NEAR(shifted.p_value, normal_sf(2.0), 1e-14);
}

TEST(ZTest, RequiresUsableStandardError) {
  EXPECT_THROW(z_test(1.0, 0.0, 0.0, Alternative::two_sided), UnavailableStdError);
  EXPECT_THROW(z_test(1.0, kNaN, 0.0, Alternative::two_sided), UnavailableStdError);
}

TEST(LinearZTest, UsesQuadraticFormOfCovariance) {
  const Eigen::Vector3d est(0.3, 0.208, 0.834);
  Eigen::Matrix3d v;
  v << 0.01, 0.0, 0.0, 0.0, 0.0016, -0.0009, 0.0, -0.0009, 0.0025;
  const Eigen::Vector3d w(0.0, 1.0, 1.0);
  const ZTestResult r = linear_z_test(est, v, w, 1.0, Alternative::less);
  const double se = std::sqrt(0.0016 + 0.0025 - 2 * 0.0009);
  EXPECT_NEAR(r.estimate, 1.042, 1e-12);
  EXPECT_NEAR(r.std_error, se, 1e-14);
  EXPECT_NEAR(r.statistic, 0.042 / se, 1e-10);
}

TEST(Domain, RoundTripsAndBounds) {
  for (const Domain d : {Domain::real(), Domain::positive(), Domain::above(2.0), Domain::unit_interval()}) {
    for (double u : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
      const double x = d.to_natural(u);
      EXPECT_TRUE(d.contains(x));
      EXPECT_NEAR(d.to_free(x), u, 1e-9);
    }
  }
  EXPECT_FALSE(Domain::above(2.0).contains(2.0));
  EXPECT_FALSE(Domain::unit_interval().contains(1.0));
}

TEST(NumericHessian, ExactOnQuadratic) {
  Eigen::Matrix3d a;
  a << 4, 1, 0.5, 1, 3, -0.2, 0.5, -0.2, 2;
  const Objective f = [&a](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x) + x.sum(); };
  const Eigen::MatrixXd h = numeric_hessian(f, Eigen::Vector3d(0.3, -1.0, 2.0));
  EXPECT_LT((h - a).cwiseAbs().maxCoeff(), 1e-5);
  const Eigen::MatrixXd h2 = numeric_hessian(f, Eigen::Vector3d(0.3, -1.0, 2.0), Eigen::Vector3d(0.1, 0.2, 0.05));
  EXPECT_LT((h2 - a).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(AdaptiveHessian, ResolvesKinkedFlatRidge) {
  // Steep in x + y; along x - y the curvature comes only from dense |.| kinks
  // (about 0.02 in u = x - y), so the variance of x is about 0.5 / 0.04.
  const Objective f = [](const Eigen::VectorXd& p) {
    const double u = p[0] - p[1];
    double kinks = 0.0;
    for (int k = -1000; k <= 1000; ++k) kinks += std::abs(u - 1e-3 * k - 3e-4);
    return 5e3 * (p[0] + p[1]) * (p[0] + p[1]) + 1e-5 * kinks;
  };
  const std::vector<ParameterInfo> info{{"x"}, {"y"}};
  const Eigen::MatrixXd v = vcov_from_hessian(adaptive_hessian(f, Eigen::Vector2d(0.0, 0.0), info));
  ASSERT_TRUE(std::isfinite(v(0, 0)));
  EXPECT_NEAR(std::sqrt(v(0, 0)), std::sqrt(12.5), 0.2 * std::sqrt(12.5));
}

TEST(VcovFromHessian, InvertsRegularMatrix) {
  Eigen::Matrix2d h;
  h << 2, 0.5, 0.5, 1;
  EXPECT_LT((vcov_from_hessian(h) - h.inverse()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(VcovFromHessian, MarksNullDirectionsUnavailable) {
  // Parameters 0 and 1 enter only through their sum; parameter 2 is separate.
  Eigen::Matrix3d h;
  h << 1, 1, 0, 1, 1, 0, 0, 0, 4;
  const Eigen::MatrixXd v = vcov_from_hessian(h);
  EXPECT_TRUE(std::isnan(v(0, 0)));
  EXPECT_TRUE(std::isnan(v(1, 1)));
  EXPECT_NEAR(v(2, 2), 0.25, 1e-12);

  Eigen::Matrix2d with_nan;
  with_nan << 2, kNaN, kNaN, 3;
  const Eigen::MatrixXd w = vcov_from_hessian(with_nan);
  EXPECT_TRUE(std::isnan(w(0, 0)));
  EXPECT_TRUE(std::isnan(w(1, 1)));
}

TEST(AverageHessians, SkipsMissingEntries) {
  Eigen::Matrix2d a, b;
  a << 1, 2, 2, kNaN;
  b << 3, 4, 4, 5;
  const std::vector<Eigen::MatrixXd> hs{a, b};
  const HessianAverage avg = average_hessians(hs);
  EXPECT_DOUBLE_EQ(avg.mean(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(avg.mean(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(avg.mean(1, 1), 5.0);
  EXPECT_EQ(avg.counts(1, 1), 1);
  EXPECT_EQ(avg.counts(0, 0), 2);
}

TEST(FitMle, GaussianSampleMatchesClosedForm) {
  Rng rng(1);
  Eigen::VectorXd y(2000);
  for (auto& v : y) v = 3.0 + 2.0 * rng.normal();
  const double n = static_cast<double>(y.size());
  const Objective nll = [&](const Eigen::VectorXd& p) {
    return n * std::log(p[1]) + (y.array() - p[0]).square().sum() / (2 * p[1] * p[1]);
  };
  const std::vector<ParameterInfo> info{{"mu"}, {"sigma", Domain::positive()}};
  const FitResult r = fit_mle(nll, Eigen::Vector2d(0.0, 1.0), info);
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().mean());
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.params[0], mean, 1e-5);
  EXPECT_NEAR(r.params[1], sd, 1e-5);
  const Eigen::VectorXd se = r.std_errors();
  EXPECT_NEAR(se[0], sd / std::sqrt(n), 1e-3 * se[0]);
  EXPECT_NEAR(se[1], sd / std::sqrt(2 * n), 1e-2 * se[1]);
}

TEST(FitMle, ObjectiveFailuresCountAsInfinite) {
  const Objective nll = [](const Eigen::VectorXd& p) {
    if (p[0] > 2.0) throw NumericalError("outside");
    return (p[0] - 1.0) * (p[0] - 1.0);
  };
  const std::vector<ParameterInfo> info{{"x"}};
  const FitResult r = fit_mle(nll, Eigen::VectorXd::Constant(1, 0.0), info);
  EXPECT_NEAR(r.params[0], 1.0, 1e-4);
}

TEST(ParameterTests, EmptyWhenStandardErrorMissing) {
  const std::vector<ParameterInfo> info{{"a", Domain::real(), 0.0}, {"b", Domain::real(), 1.0, Alternative::less}};
  Eigen::Matrix2d v;
  v << 0.04, 0, 0, kNaN;
  const auto rows = parameter_tests(info, Eigen::Vector2d(0.5, 0.9), v);
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_TRUE(rows[0].test.has_value());
  EXPECT_NEAR(rows[0].test->statistic, 2.5, 1e-12);
  EXPECT_FALSE(rows[1].test.has_value());
  EXPECT_EQ(rows[1].alternative, Alternative::less);
}

TEST(FitResidualDistribution, NormalUsesMomentEstimates) {
  Rng rng(2);
  Eigen::VectorXd e(500);
  for (auto& v : e) v = 0.5 + 1.5 * rng.normal();
  const auto d = std::get<NormalDist>(fit_residual_distribution(e, Family::normal));
  EXPECT_NEAR(d.mean, e.mean(), 1e-12);
  EXPECT_NEAR(d.sd, std::sqrt((e.array() - e.mean()).square().mean()), 1e-12);
  EXPECT_THROW(fit_residual_distribution(e, Family::sst), DomainError);
  EXPECT_THROW(fit_residual_distribution(e.head(10), Family::normal), DataError);
}

TEST(FitResidualDistribution, StudentTRecoversHeavyTails) {
  const Eigen::VectorXd e = sst_sample(Sst(0.0, 1.0, 1.0, 5.0), 20000, 3);
  const auto d = std::get<StudentTDist>(fit_residual_distribution(e, Family::student_t));
  EXPECT_NEAR(d.location, 0.0, 0.03);
  EXPECT_NEAR(d.df, 5.0, 0.8);
  EXPECT_GT(d.df, 2.0);
}

TEST(FitSst, RecoversShape) {
  const Sst truth(0.5, 1.2, 1.3, 6.0);
  const Eigen::VectorXd x = sst_sample(truth, 20000, 4);
  const FitResult r = fit_sst(x);
  const Eigen::VectorXd se = r.std_errors();
  const Eigen::Vector4d expected(0.5, 1.2, 1.3, 6.0);
  for (int i = 0; i < 4; ++i) {
    ASSERT_TRUE(std::isfinite(se[i]));
    EXPECT_LT(std::abs(r.params[i] - expected[i]), 4.0 * se[i]) << "parameter " << i;
  }
  EXPECT_LE(r.nll, sst_negative_log_likelihood(x, 0.5, 1.2, 1.3, 6.0) + 1e-6);
}

TEST(ModelFit, MonthAheadRecoversTableValues) {
  const MonthAheadParams truth = testing::table_month_ahead();
  const MarketSeries data = ma_simulate(truth, synthetic_exogenous(5000, 5), 5000, 6);
  const MonthAheadFit fit = ma_fit(data, ma_default_start(data));
  EXPECT_LE(fit.result.nll, ma_nll(data, truth));
  const Eigen::VectorXd packed = ma_pack(truth);
  const Eigen::VectorXd se = fit.result.std_errors();
  int covered = 0, available = 0;
  for (Eigen::Index i = 0; i < packed.size(); ++i) {
    if (!std::isfinite(se[i])) continue;
    ++available;
    covered += std::abs(fit.result.params[i] - packed[i]) < 3.0 * se[i];
  }
  EXPECT_GE(available, packed.size() - 1);
  EXPECT_GE(covered, available - 1);

  const ZTestResult persistence = persistence_test(fit);
  EXPECT_EQ(persistence.alternative, Alternative::two_sided);
  EXPECT_NEAR(persistence.estimate, fit.params.vol.alpha + fit.params.vol.beta, 1e-12);
  EXPECT_GT(persistence.std_error, 0.0);
}

TEST(ModelFit, IgarchTiesBetaToAlpha) {
  MonthAheadParams truth = testing::table_month_ahead();
  const MarketSeries data = ma_simulate(truth, synthetic_exogenous(2000, 7), 2000, 8);
  const MonthAheadParams start = ma_default_start(data, ComponentMask::month_ahead(), true);
  const auto info = ma_parameter_info(start);
  for (const auto& p : info) EXPECT_NE(p.name, "beta");
  const MonthAheadFit fit = ma_fit(data, start);
  EXPECT_NEAR(fit.params.vol.alpha + fit.params.vol.beta, 1.0, 1e-12);
  EXPECT_THROW(persistence_test(fit), DomainError);
}

}  // namespace
}  // namespace gasfc
