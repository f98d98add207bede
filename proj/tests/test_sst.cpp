#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "gasfc/error.hpp"
#include "gasfc/sst.hpp"
#include "support.hpp"

namespace gasfc {
namespace {

using testing::bisect;
using testing::integrate_line;
using testing::simpson;

TEST(Sst, RejectsInvalidParameters) {
  EXPECT_THROW(Sst(0, 0, 1, 5), DomainError);
  EXPECT_THROW(Sst(0, -1, 1, 5), DomainError);
  EXPECT_THROW(Sst(0, 1, 0, 5), DomainError);
  EXPECT_THROW(Sst(0, 1, 1, 2), DomainError);
  EXPECT_THROW(Sst(std::nan(""), 1, 1, 5), DomainError);
  EXPECT_NO_THROW(Sst(0, 1, 1, 2.01));
}

TEST(Sst, SymmetricWhenNuIsOne) {
  for (double tau : {2.5, 5.0, 30.0}) {
    const Sst p(0.7, 1.9, 1.0, tau);
    for (double x : {0.1, 1.0, 3.0}) {
      EXPECT_NEAR(sst_pdf(p.mu() - x, p), sst_pdf(p.mu() + x, p), 1e-15);
    }
    EXPECT_NEAR(sst_cdf(p.mu(), p), 0.5, 1e-15);
    EXPECT_NEAR(sst_quantile(p, 0.5), p.mu(), 1e-10);
  }
}

TEST(Sst, GaussianLimit) {
  const Sst p(0, 1, 1, 1e6);
  EXPECT_NEAR(sst_pdf(0.0, p), 0.39894, 1e-3);
  double worst = 0.0;
  for (double x = -6; x <= 6; x += 0.01) {
    worst = std::max(worst, std::abs(sst_pdf(x, p) - normal_pdf(x)));
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Sst, NormalizesAtMonthAheadShape) {
  const Sst p(0, 1, 1.132, 6.858);
  EXPECT_NEAR(integrate_line([&](double x) { return sst_pdf(x, p); }), 1.0, 1e-6);
}

TEST(Sst, LogPdfMatchesPdf) {
  const Sst p(0, 1, 1.2, 5);
  for (double x : {-5.0, 0.0, 5.0}) {
    EXPECT_NEAR(std::exp(sst_logpdf(x, p)), sst_pdf(x, p), 1e-15);
  }
}

TEST(Sst, LogPdfFiniteFarInTail) {
  const Sst p(0, 1, 1, 5);
  const double v = sst_logpdf(1e4, p);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_LT(v, 0.0);
}

TEST(Sst, CdfMatchesQuadrature) {
  const Sst p(0, 1, 1.5, 6);
  for (double x : {-2.0, 0.0, 2.0}) {
    const double q = simpson([&](double s) { return sst_pdf(s, p); }, -40.0, x, 1e-12);
    EXPECT_NEAR(sst_cdf(x, p), q, 1e-6) << "x = " << x;
  }
}

TEST(Sst, QuantileInvertsCdf) {
  for (double nu : {0.5, 1.0, 1.5, 2.0}) {
    for (double tau : {2.5, 6.0, 30.0}) {
      const Sst p(-0.3, 2.0, nu, tau);
      double prev = -std::numeric_limits<double>::infinity();
      for (int k = 1; k <= 99; ++k) {
        const double q = k / 100.0;
        const double x = sst_quantile(p, q);
        EXPECT_NEAR(sst_cdf(x, p), q, 1e-8);
        EXPECT_GT(x, prev);
        prev = x;
      }
    }
  }
}

TEST(Sst, QuantileMatchesBisectionAtDayAheadShape) {
  const Sst p(0, 1, 1.039, 6.425);
  const double oracle = bisect([&](double x) { return sst_cdf(x, p); }, 0.95, -50.0, 50.0);
  EXPECT_NEAR(sst_quantile(p, 0.95), oracle, 1e-8);
}

TEST(Sst, QuantileRejectsBoundaryProbabilities) {
  const Sst p(0, 1, 1, 5);
  EXPECT_THROW(sst_quantile(p, 0.0), DomainError);
  EXPECT_THROW(sst_quantile(p, 1.0), DomainError);
}

TEST(Sst, SampleMomentsMatchParameters) {
  const Sst p(2, 0.5, 1, 8);
  const Eigen::VectorXd x = sst_sample(p, 1000000, 42);
  const double m = x.mean();
  const double sd = std::sqrt((x.array() - m).square().sum() / (x.size() - 1.0));
  EXPECT_NEAR(m, 2.0, 0.002);
  EXPECT_NEAR(sd, 0.5, 0.002);
}

TEST(Sst, SampleIsDeterministic) {
  const Sst p(0, 1, 1.3, 5);
  EXPECT_EQ(sst_sample(p, 100, 7), sst_sample(p, 100, 7));
  EXPECT_NE(sst_sample(p, 100, 7), sst_sample(p, 100, 8));
}

TEST(Sst, SampleEmpiricalQuartile) {
  const Sst p(0, 1, 1.5, 8);
  const Eigen::VectorXd x = sst_sample(p, 1000000, 3);
  const double q = sst_quantile(p, 0.25);
  EXPECT_NEAR((x.array() < q).cast<double>().mean(), 0.25, 0.002);
}

TEST(Sst, SkewDirectionFollowsNu) {
  // nu > 1 stretches the right branch: the median falls below the mean and
  // the upper tail is longer than the lower one.
  const Sst right(0, 1, 2, 8);
  EXPECT_GT(sst_cdf(0.0, right), 0.5);
  EXPECT_GT(sst_quantile(right, 0.99), -sst_quantile(right, 0.01));
  const Sst left(0, 1, 0.5, 8);
  EXPECT_LT(sst_cdf(0.0, left), 0.5);
}

TEST(Sst, SymmetricShapeHasZeroSkewness) {
  const Sst p(0, 1, 1, 7);
  const double third = integrate_line([&](double x) { return x * x * x * sst_pdf(x, p); });
  EXPECT_NEAR(third, 0.0, 1e-6);
}

}  // namespace
}  // namespace gasfc
