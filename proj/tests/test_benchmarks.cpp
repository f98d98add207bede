#include <cmath>

#include <gtest/gtest.h>

#include "gasfc/benchmarks.hpp"
#include "gasfc/error.hpp"
#include "gasfc/random.hpp"

namespace gasfc {
namespace {

// Prices whose differences follow x_t = c + a1 x_{t-1} + a2 x_{t-2} + e_t + m1 e_{t-1} + m2 e_{t-2}.
Eigen::VectorXd arima_path(const ArimaParams& p, Eigen::Index n, std::uint64_t seed, double sd = 1.0) {
  Rng rng(seed);
  const Eigen::Index burn = 200;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n + burn);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n + burn);
  for (Eigen::Index t = 2; t < n + burn; ++t) {
    e[t] = sd * rng.normal();
    x[t] = p.intercept + p.ar[0] * x[t - 1] + p.ar[1] * x[t - 2] + e[t] + p.ma[0] * e[t - 1] + p.ma[1] * e[t - 2];
  }
  Eigen::VectorXd y(n);
  y[0] = 50.0;
  for (Eigen::Index t = 1; t < n; ++t) y[t] = y[t - 1] + x[burn + t];
  return y;
}

struct Bivariate {
  Eigen::VectorXd gas, oil;
};

// Levels whose differences follow a VAR with the given lag matrices.
Bivariate var_path(const std::vector<Eigen::Matrix2d>& a, Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index burn = 100;
  std::vector<Eigen::Vector2d> z(n + burn, Eigen::Vector2d::Zero());
  for (Eigen::Index t = static_cast<Eigen::Index>(a.size()); t < n + burn; ++t) {
    Eigen::Vector2d v(rng.normal(), rng.normal());
    for (std::size_t k = 0; k < a.size(); ++k) v += a[k] * z[t - 1 - k];
    z[t] = v;
  }
  Bivariate b{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  b.gas[0] = 20.0;
  b.oil[0] = 60.0;
  for (Eigen::Index t = 1; t < n; ++t) {
    b.gas[t] = b.gas[t - 1] + z[burn + t][0];
    b.oil[t] = b.oil[t - 1] + z[burn + t][1];
  }
  return b;
}

TEST(Arima, RandomWalkGivesSmallCoefficientEffects) {
  const Eigen::VectorXd y = arima_path(ArimaParams{}, 5000, 1);
  const ArimaFit fit = arima_fit(y);
  // On white-noise differences the AR and MA factors can cancel, so the
  // identified quantities are the impulse responses.
  const auto& p = fit.params;
  const double psi1 = p.ar[0] + p.ma[0];
  const double psi2 = p.ar[0] * psi1 + p.ar[1] + p.ma[1];
  EXPECT_LT(std::abs(psi1), 0.05);
  EXPECT_LT(std::abs(psi2), 0.05);
  EXPECT_LT(std::abs(p.intercept), 0.05);
  EXPECT_NEAR(p.residual_scale, 1.0, 0.03);
}

TEST(Arima, RecoversArmaTwoTwo) {
  ArimaParams truth;
  truth.intercept = 0.05;
  truth.ar = {0.5, -0.3};
  truth.ma = {0.4, 0.2};
  const Eigen::VectorXd y = arima_path(truth, 5000, 2);
  const ArimaFit fit = arima_fit(y);
  const Eigen::VectorXd se = fit.result.std_errors();
  const Eigen::VectorXd expected = (Eigen::VectorXd(5) << 0.05, 0.5, -0.3, 0.4, 0.2).finished();
  ASSERT_EQ(fit.info.size(), 5u);
  for (Eigen::Index i = 0; i < 5; ++i) {
    ASSERT_TRUE(std::isfinite(se[i])) << fit.info[static_cast<std::size_t>(i)].name;
    EXPECT_LT(std::abs(fit.result.params[i] - expected[i]), 3.0 * se[i]) << fit.info[static_cast<std::size_t>(i)].name;
  }
}

TEST(Arima, ResidualsMatchDirectRecursion) {
  ArimaParams p;
  p.intercept = 0.1;
  p.ar = {0.3, 0.1};
  p.ma = {-0.2, 0.05};
  const Eigen::VectorXd y = arima_path(p, 300, 3);
  const Eigen::VectorXd e = arima_residuals(p, y);
  ASSERT_EQ(e.size(), y.size() - 3);
  double e1 = 0.0, e2 = 0.0;
  for (Eigen::Index t = 2; t < y.size() - 1; ++t) {
    const double x = y[t + 1] - y[t];
    const double x1 = y[t] - y[t - 1];
    const double x2 = y[t - 1] - y[t - 2];
    const double et = x - (p.intercept + p.ar[0] * x1 + p.ar[1] * x2 + p.ma[0] * e1 + p.ma[1] * e2);
    EXPECT_NEAR(e[t - 2], et, 1e-12);
    e2 = e1;
    e1 = et;
  }
}

TEST(Arima, ZeroCoefficientsForecastLastPrice) {
  const Eigen::VectorXd y = arima_path(ArimaParams{}, 100, 4);
  EXPECT_EQ(arima_point_forecast(ArimaParams{}, y), y[99]);
}

TEST(Arima, ConstantSeriesForecastsTheConstant) {
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(200, 17.5);
  const ArimaFit fit = arima_fit(y);
  EXPECT_NEAR(arima_point_forecast(fit.params, y), 17.5, 1e-8);
}

TEST(Arima, FamilyDoesNotMovePointForecast) {
  const Eigen::VectorXd y = arima_path(ArimaParams{}, 800, 5);
  const ArimaFit fit = arima_fit(y);
  const ForecastDistribution n = arima_forecast_one(fit.params, y, fit.residuals, Family::normal);
  const ForecastDistribution t = arima_forecast_one(fit.params, y, fit.residuals, Family::student_t);
  const double point = arima_point_forecast(fit.params, y);
  EXPECT_NEAR(median(n), point, 1e-12);
  EXPECT_NEAR(median(t), point, 1e-12);
  EXPECT_THROW(arima_forecast_one(fit.params, y, fit.residuals, Family::sst), DomainError);
}

TEST(Arima, EightyPercentIntervalCoverage) {
  ArimaParams truth;
  truth.ar = {0.4, 0.0};
  truth.ma = {0.3, 0.0};
  const Eigen::VectorXd y = arima_path(truth, 4000, 6, 0.7);
  const ArimaFit fit = arima_fit(y.head(2000));
  int inside = 0;
  for (Eigen::Index t = 2000; t < 4000; ++t) {
    const ForecastDistribution f = arima_forecast_one(fit.params, y.head(t), fit.residuals, Family::normal);
    inside += y[t] >= quantile(f, 0.1) && y[t] <= quantile(f, 0.9);
  }
  EXPECT_NEAR(inside / 2000.0, 0.80, 0.03);
}

TEST(Arima, RejectsShortHistory) {
  EXPECT_THROW(arima_fit(Eigen::VectorXd::LinSpaced(30, 0, 1)), DataError);
}

TEST(Var, WhiteNoiseCoefficientsAreSmall) {
  const Bivariate b = var_path({}, 5000, 7);
  const VarModel m = var_fit(b.gas, b.oil, 1);
  ASSERT_EQ(m.order, 1);
  ASSERT_EQ(m.aic.size(), 1u);
  EXPECT_LT(m.coefficients[0].cwiseAbs().maxCoeff(), 0.05);
  EXPECT_LT(m.intercept.cwiseAbs().maxCoeff(), 0.05);
  EXPECT_NEAR(m.residual_cov(0, 0), 1.0, 0.06);
}

TEST(Var, AicSelectsTrueOrder) {
  Eigen::Matrix2d a1, a2;
  a1 << 0.3, 0.2, 0.0, 0.4;
  a2 << -0.3, 0.0, 0.25, -0.2;
  int hits = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Bivariate b = var_path({a1, a2}, 1000, 100 + rep);
    hits += var_fit(b.gas, b.oil, 10).order == 2;
  }
  EXPECT_GE(hits, 80);
}

TEST(Var, RecoversLagMatrices) {
  Eigen::Matrix2d a1;
  a1 << 0.3, 0.2, -0.1, 0.4;
  const Bivariate b = var_path({a1}, 5000, 8);
  const VarModel m = var_fit(b.gas, b.oil, 3);
  ASSERT_EQ(m.order, 1);
  EXPECT_LT((m.coefficients[0] - a1).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Var, ForecastIgnoresOilLevel) {
  Eigen::Matrix2d a1;
  a1 << 0.2, 0.3, 0.0, 0.1;
  const Bivariate b = var_path({a1}, 600, 9);
  const VarModel m = var_fit(b.gas, b.oil, 4);
  const Eigen::VectorXd shifted = (b.oil.array() + 25.0).matrix();
  EXPECT_NEAR(var_point_forecast(m, b.gas, b.oil), var_point_forecast(m, b.gas, shifted), 1e-9);
  const VarModel m2 = var_fit(b.gas, shifted, 4);
  EXPECT_EQ(m2.order, m.order);
  EXPECT_NEAR(var_point_forecast(m2, b.gas, shifted), var_point_forecast(m, b.gas, b.oil), 1e-9);
}

TEST(Var, PointForecastUsesGasEquation) {
  Eigen::Matrix2d a1;
  a1 << 0.2, 0.3, 0.0, 0.1;
  const Bivariate b = var_path({a1}, 600, 10);
  const VarModel m = var_fit(b.gas, b.oil, 1);
  const Eigen::Index n = b.gas.size();
  const Eigen::Vector2d last(b.gas[n - 1] - b.gas[n - 2], b.oil[n - 1] - b.oil[n - 2]);
  const double expected = b.gas[n - 1] + m.intercept[0] + m.coefficients[0].row(0).dot(last);
  EXPECT_NEAR(var_point_forecast(m, b.gas, b.oil), expected, 1e-12);
  EXPECT_NEAR(median(var_forecast_one(m, b.gas, b.oil, Family::normal)), expected, 1e-12);
}

TEST(Var, RejectsShortOrMismatchedInput) {
  const Bivariate b = var_path({}, 80, 11);
  EXPECT_THROW(var_fit(b.gas, b.oil, 10), DataError);
  EXPECT_THROW(var_fit(b.gas, b.oil.head(70), 2), DataError);
}

}  // namespace
}  // namespace gasfc
