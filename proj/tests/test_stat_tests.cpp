#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "gasfc/random.hpp"
#include "gasfc/stat_tests.hpp"

namespace gasfc {
namespace {

Eigen::VectorXd normals(Eigen::Index n, Rng& rng, double mean = 0.0, double sd = 1.0) {
  Eigen::VectorXd v(n);
  for (auto& x : v) x = mean + sd * rng.normal();
  return v;
}

// dCov^2 = S1 + S2 - 2 S3 from the raw pairwise distances, without double centering.
double dcov2_oracle(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  double s1 = 0, ax = 0, by = 0, s3 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double ra = 0, rb = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = std::abs(x[i] - x[j]);
      const double b = std::abs(y[i] - y[j]);
      s1 += a * b;
      ra += a;
      rb += b;
    }
    ax += ra;
    by += rb;
    s3 += ra * rb;
  }
  const double nn = static_cast<double>(n);
  return s1 / (nn * nn) + (ax / (nn * nn)) * (by / (nn * nn)) - 2.0 * s3 / (nn * nn * nn);
}

double dcor_oracle(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return std::sqrt(dcov2_oracle(x, y) / std::sqrt(dcov2_oracle(x, x) * dcov2_oracle(y, y)));
}

TEST(DmTest, DetectsWorseFirstModel) {
  Rng rng(1);
  const Eigen::VectorXd b = normals(1000, rng, 2.0);
  const Eigen::VectorXd a = b + normals(1000, rng, 0.5);
  const DmResult r = dm_test(a, b, DmAlternative::b_better);
  EXPECT_GT(r.statistic, 0.0);
  EXPECT_LT(r.p_value, 0.001);
}

TEST(DmTest, IdenticalLossesAreDegenerate) {
  const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(50, 0, 1);
  EXPECT_THROW(dm_test(a, a), DegenerateDifferential);
}

TEST(DmTest, StatisticMatchesDirectFormula) {
  Rng rng(2);
  const Eigen::VectorXd a = normals(200, rng);
  const Eigen::VectorXd b = normals(200, rng, 0.1);
  const Eigen::VectorXd d = a - b;
  const double m = d.mean();
  const double var = (d.array() - m).square().sum() / (d.size() - 1.0);
  EXPECT_NEAR(dm_test(a, b).statistic, m / std::sqrt(var / d.size()), 1e-12);
}

TEST(DmTest, AntisymmetricAndShiftInvariant) {
  Rng rng(3);
  const Eigen::VectorXd a = normals(300, rng);
  const Eigen::VectorXd b = normals(300, rng);
  const Eigen::VectorXd c = normals(300, rng, 4.0);
  EXPECT_NEAR(dm_test(a, b).statistic, -dm_test(b, a).statistic, 1e-12);
  EXPECT_NEAR(dm_test(a + c, b + c).statistic, dm_test(a, b).statistic, 1e-9);
  const double p1 = dm_test(a, b, DmAlternative::a_better).p_value;
  const double p2 = dm_test(b, a, DmAlternative::a_better).p_value;
  EXPECT_NEAR(p1 + p2, 1.0, 1e-12);
  EXPECT_NEAR(dm_test(a, b, DmAlternative::a_better).p_value + dm_test(a, b, DmAlternative::b_better).p_value, 1.0,
              1e-12);
}

TEST(DmTest, SizeUnderTheNull) {
  Rng rng(4);
  int rejections = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Eigen::VectorXd d = normals(500, rng);
    if (dm_test(d, Eigen::VectorXd::Zero(500), DmAlternative::two_sided).p_value < 0.05) ++rejections;
  }
  EXPECT_NEAR(rejections / 1000.0, 0.05, 0.02);
}

TEST(DmMatrix, AntisymmetricWithDegenerateDiagonal) {
  Rng rng(5);
  std::map<std::string, Eigen::VectorXd> table{{"m1", normals(100, rng)}, {"m2", normals(100, rng)}};
  const DmMatrix m = dm_matrix(table);
  ASSERT_EQ(m.models.size(), 2u);
  EXPECT_FALSE(m.cells[0][0].result.has_value());
  EXPECT_FALSE(m.cells[1][1].result.has_value());
  EXPECT_FALSE(m.cells[0][0].error.empty());
  EXPECT_NEAR(m.cells[0][1].result->statistic, -m.cells[1][0].result->statistic, 1e-12);
}

TEST(DmMatrix, SignsFollowLossOrdering) {
  Rng rng(6);
  const Eigen::VectorXd base = normals(800, rng, 5.0);
  std::vector<std::string> names{"good", "mid", "bad"};
  std::vector<Eigen::VectorXd> losses{base + normals(800, rng, 0.0, 0.3), base + normals(800, rng, 0.5, 0.3),
                                      base + normals(800, rng, 1.0, 0.3)};
  const DmMatrix m = dm_matrix(names, losses);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double s = m.cells[i][j].result->statistic;
      EXPECT_EQ(s < 0, i < j) << names[i] << " vs " << names[j];
    }
  }
}

TEST(DistanceCorrelation, SelfAndAffine) {
  Rng rng(7);
  const Eigen::VectorXd x = normals(200, rng);
  EXPECT_NEAR(distance_correlation(x, x), 1.0, 1e-12);
  const Eigen::VectorXd y = (-3.0 * x.array() + 2.0).matrix();
  EXPECT_NEAR(distance_correlation(x, y), 1.0, 1e-12);
}

TEST(DistanceCorrelation, MatchesRawDistanceOracle) {
  Rng rng(8);
  Eigen::VectorXd x(500);
  for (auto& v : x) v = rng.uniform();
  const Eigen::VectorXd y = x.array().square().matrix();
  const double r = distance_correlation(x, y);
  EXPECT_NEAR(r, dcor_oracle(x, y), 1e-10);
  EXPECT_GT(r, 0.5);
}

TEST(DistanceCorrelation, ScaleAndShiftInvariant) {
  Rng rng(9);
  const Eigen::VectorXd x = normals(150, rng);
  const Eigen::VectorXd y = (x.array().sin() + 0.3 * normals(150, rng).array()).matrix();
  const double r = distance_correlation(x, y);
  EXPECT_NEAR(distance_correlation((5.0 * x.array() - 1.0).matrix(), y), r, 1e-10);
  EXPECT_NEAR(distance_correlation(x, (-0.2 * y.array() + 7.0).matrix()), r, 1e-10);
}

TEST(DistanceCorrelation, ConstantInputIsDegenerate) {
  EXPECT_THROW(distance_correlation(Eigen::VectorXd::Ones(20), Eigen::VectorXd::LinSpaced(20, 0, 1)),
               DegenerateSample);
}

TEST(EnergyTest, PerfectDependenceGivesMinimalPValue) {
  Rng rng(10);
  const Eigen::VectorXd x = normals(100, rng);
  const auto r = energy_independence_test(x, x, 199, 1);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 200.0);
  EXPECT_EQ(r.permutations, 199u);
}

TEST(EnergyTest, DefaultPermutationsAndDeterminism) {
  Rng rng(11);
  const Eigen::VectorXd x = normals(60, rng);
  const Eigen::VectorXd y = normals(60, rng);
  const auto a = energy_independence_test(x, y, 0, 5);
  const auto b = energy_independence_test(x, y, 0, 5);
  EXPECT_EQ(a.permutations, 999u);
  EXPECT_EQ(a.p_value, b.p_value);
  const double k = a.p_value * 1000.0;
  EXPECT_NEAR(k, std::round(k), 1e-9);
}

TEST(EnergyTest, ShuffledCopyLooksIndependent) {
  Rng rng(12);
  int pass = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::VectorXd x = normals(100, rng);
    Eigen::VectorXd y = x;
    Rng shuffler(1000 + rep);
    shuffler.shuffle(y.data(), y.data() + y.size());
    if (energy_independence_test(x, y, 199, rep).p_value > 0.05) ++pass;
  }
  EXPECT_GE(pass, 90);
}

TEST(ChiSquareUniformity, FlatHistogramIsZero) {
  const auto r = chi_square_uniformity(Eigen::VectorXi::Constant(20, 7));
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

}  // namespace
}  // namespace gasfc
