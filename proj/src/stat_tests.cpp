#include "gasfc/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "gasfc/random.hpp"

namespace gasfc {

DmResult dm_test(const VectorCRef& losses_a, const VectorCRef& losses_b, DmAlternative alternative) {
  if (losses_a.size() != losses_b.size()) {
    throw DomainError("dm_test: loss sequences differ in length");
  }
  const auto n = losses_a.size();
  if (n < 10) {
    throw DomainError("dm_test: at least 10 paired losses are required");
  }
  if (!losses_a.allFinite() || !losses_b.allFinite()) {
    throw DomainError("dm_test: losses must be finite");
  }
  const Eigen::VectorXd d = losses_a - losses_b;
  const double mean = d.mean();
  const double var = (d.array() - mean).square().sum() / static_cast<double>(n - 1);
  if (!(var > 0)) {
    throw DegenerateDifferential("dm_test: loss differential has zero variance");
  }
  DmResult r;
  r.n = static_cast<std::size_t>(n);
  r.mean_loss_diff = mean;
  r.alternative = alternative;
  r.statistic = mean / std::sqrt(var / static_cast<double>(n));
  switch (alternative) {
    case DmAlternative::a_better:
      r.p_value = normal_cdf(r.statistic);
      break;
    case DmAlternative::b_better:
      r.p_value = normal_cdf(-r.statistic);
      break;
    case DmAlternative::two_sided:
      r.p_value = 2.0 * normal_cdf(-std::abs(r.statistic));
      break;
  }
  return r;
}

DmMatrix dm_matrix(const std::vector<std::string>& models, const std::vector<Eigen::VectorXd>& losses) {
  if (models.size() != losses.size()) {
    throw DomainError("dm_matrix: one loss series per model is required");
  }
  for (const auto& l : losses) {
    if (l.size() != losses.front().size()) {
      throw DomainError("dm_matrix: loss series are not aligned");
    }
  }
  DmMatrix m;
  m.models = models;
  m.cells.assign(models.size(), std::vector<DmCell>(models.size()));
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = 0; j < models.size(); ++j) {
      auto& cell = m.cells[i][j];
      if (i == j) {
        cell.error = "diagonal";
        continue;
      }
      try {
        cell.result = dm_test(losses[i], losses[j], DmAlternative::a_better);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  }
  return m;
}

DmMatrix dm_matrix(const std::map<std::string, Eigen::VectorXd>& loss_table) {
  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> losses;
  for (const auto& [name, l] : loss_table) {
    names.push_back(name);
    losses.push_back(l);
  }
  return dm_matrix(names, losses);
}

Eigen::MatrixXd centered_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    a(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double dist = (x.row(i) - x.row(j)).norm();
      a(i, j) = dist;
      a(j, i) = dist;
    }
  }
  const Eigen::VectorXd row_mean = a.rowwise().mean();
  const double grand = row_mean.mean();
  a.colwise() -= row_mean;
  a.rowwise() -= row_mean.transpose();
  a.array() += grand;
  return a;
}

namespace {

void check_samples(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows()) {
    throw DomainError("distance correlation: sample sizes differ");
  }
  if (x.rows() < 4) {
    throw DomainError("distance correlation: at least 4 observations are required");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw DomainError("distance correlation: entries must be finite");
  }
}

double mean_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum() / static_cast<double>(a.size());
}

double dcor_from(double dcov2, double dvar_x, double dvar_y) {
  if (!(dvar_x > 0) || !(dvar_y > 0)) {
    throw DegenerateSample("distance correlation: constant input sequence");
  }
  const double r2 = std::max(dcov2, 0.0) / std::sqrt(dvar_x * dvar_y);
  return std::clamp(std::sqrt(r2), 0.0, 1.0);
}

// sum_ij A(j, i) B(perm[j], perm[i]), walking columns of both matrices.
double permuted_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const std::vector<Eigen::Index>& perm) {
  const Eigen::Index n = a.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* acol = a.col(i).data();
    const double* bcol = b.col(perm[static_cast<std::size_t>(i)]).data();
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      s += acol[j] * bcol[perm[static_cast<std::size_t>(j)]];
    }
    total += s;
  }
  return total;
}

}  // namespace

double distance_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  check_samples(x, y);
  const Eigen::MatrixXd a = centered_distances(x);
  const Eigen::MatrixXd b = centered_distances(y);
  return dcor_from(mean_product(a, b), mean_product(a, a), mean_product(b, b));
}

EnergyIndependenceResult energy_independence_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                                  std::size_t permutations, std::uint64_t seed) {
  check_samples(x, y);
  if (permutations == 0) {
    permutations = 999;
  }
  if (permutations < 99) {
    throw DomainError("energy_independence_test: at least 99 permutations are required");
  }
  const Eigen::MatrixXd a = centered_distances(x);
  const Eigen::MatrixXd b = centered_distances(y);
  const Eigen::Index n = x.rows();
  const double nn = static_cast<double>(n) * static_cast<double>(n);

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});

  EnergyIndependenceResult r;
  r.permutations = permutations;
  const double dcov2 = permuted_sum(a, b, perm) / nn;
  r.dcor = dcor_from(dcov2, mean_product(a, a), mean_product(b, b));
  r.statistic = static_cast<double>(n) * dcov2;

  Rng rng(seed);
  std::size_t exceed = 0;
  for (std::size_t k = 0; k < permutations; ++k) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    rng.shuffle(perm.begin(), perm.end());
    const double stat = static_cast<double>(n) * (permuted_sum(a, b, perm) / nn);
    if (stat >= r.statistic) {
      ++exceed;
    }
  }
  r.p_value = static_cast<double>(1 + exceed) / static_cast<double>(permutations + 1);
  return r;
}

UniformityTest chi_square_uniformity(const Eigen::VectorXi& counts) {
  if (counts.size() < 2) {
    throw DomainError("chi_square_uniformity: at least two bins are required");
  }
  const double total = counts.cast<double>().sum();
  if (!(total > 0)) {
    throw DomainError("chi_square_uniformity: empty histogram");
  }
  const double expected = total / static_cast<double>(counts.size());
  UniformityTest t;
  t.statistic = (counts.cast<double>().array() - expected).square().sum() / expected;
  t.p_value = boost::math::gamma_q(0.5 * static_cast<double>(counts.size() - 1), 0.5 * t.statistic);
  return t;
}

}  // namespace gasfc
