#include "gasfc/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gasfc {
namespace {

void check_aligned(const VectorCRef& a, const VectorCRef& b, const char* what) {
  if (a.size() != b.size()) {
    throw DomainError(std::string(what) + ": length mismatch");
  }
  if (a.size() == 0) {
    throw DomainError(std::string(what) + ": empty input");
  }
}

double crps_normal(const NormalDist& n, double y) {
  const double z = (y - n.mean) / n.sd;
  return n.sd * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - 1.0 / std::sqrt(std::numbers::pi));
}

double crps_student_t(const StudentTDist& t, double y) {
  const boost::math::students_t_distribution<double> dist(t.df);
  const double v = t.df;
  const double z = (y - t.location) / t.scale;
  const double b_half = boost::math::beta(0.5, v / 2.0);
  const double spread = 2.0 * std::sqrt(v) * boost::math::beta(0.5, v - 0.5) / ((v - 1.0) * b_half * b_half);
  const double value = z * (2.0 * boost::math::cdf(dist, z) - 1.0) +
                       2.0 * boost::math::pdf(dist, z) * (v + z * z) / (v - 1.0) - spread;
  return t.scale * value;
}

double crps_sst(const Sst& p, double y) {
  // Tails where F < 1e-9 (or 1 - F < 1e-9) are dropped. Interior quantile
  // breakpoints keep each Gauss-Kronrod panel on a smooth, well-scaled piece.
  constexpr std::array<double, 9> probs{1e-9, 1e-3, 0.02, 0.2, 0.5, 0.8, 0.98, 1 - 1e-3, 1 - 1e-9};
  std::vector<double> knots;
  knots.reserve(probs.size() + 1);
  for (double q : probs) {
    knots.push_back(sst_quantile(p, q));
  }
  const double lo = knots.front();
  const double hi = knots.back();
  if (y > lo && y < hi) {
    knots.push_back(y);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const auto& shape = p.shape();
  const double mu = p.mu();
  const double sigma = p.sigma();
  auto below = [&](double x) {
    const double f = shape.standard_cdf((x - mu) / sigma);
    return f * f;
  };
  auto above = [&](double x) {
    const double f = 1.0 - shape.standard_cdf((x - mu) / sigma);
    return f * f;
  };

  using Integrator = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr unsigned max_depth = 12;
  constexpr double tol = 1e-11;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    if (b <= y) {
      total += Integrator::integrate(below, a, b, max_depth, tol);
    } else {
      total += Integrator::integrate(above, a, b, max_depth, tol);
    }
  }
  // Observation outside the retained range: the whole gap to it carries an
  // integrand of (nearly) one.
  if (y < lo) {
    total += Integrator::integrate(above, y, lo, max_depth, tol);
  } else if (y > hi) {
    total += Integrator::integrate(below, hi, y, max_depth, tol);
  }
  return total;
}

}  // namespace

double mae(const VectorCRef& observations, const VectorCRef& medians) {
  check_aligned(observations, medians, "mae");
  return (observations - medians).cwiseAbs().sum() / static_cast<double>(observations.size());
}

double rmse(const VectorCRef& observations, const VectorCRef& means) {
  check_aligned(observations, means, "rmse");
  return std::sqrt((observations - means).squaredNorm() / static_cast<double>(observations.size()));
}

double pinball(double quantile_pred, double observation, double p) {
  if (!(p > 0 && p < 1)) {
    throw DomainError("pinball: probability must lie in (0, 1)");
  }
  if (observation >= quantile_pred) {
    return p * (observation - quantile_pred);
  }
  return (1.0 - p) * (quantile_pred - observation);
}

Eigen::VectorXd default_probability_grid() {
  Eigen::VectorXd grid(99);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    grid[i] = static_cast<double>(i + 1) / 100.0;
  }
  return grid;
}

Eigen::VectorXd pinball_row(const ForecastDistribution& forecast, double observation, const VectorCRef& grid) {
  Eigen::VectorXd row(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    row[k] = pinball(quantile(forecast, grid[k]), observation, grid[k]);
  }
  return row;
}

PinballCurve pinball_curve(std::span<const ForecastDistribution> forecasts, const VectorCRef& observations,
                           const VectorCRef& grid) {
  if (static_cast<Eigen::Index>(forecasts.size()) != observations.size()) {
    throw DomainError("pinball_curve: forecasts and observations are not aligned");
  }
  if (forecasts.empty()) {
    throw DomainError("pinball_curve: empty input");
  }
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0 && grid[k] < 1) || (k > 0 && !(grid[k] > grid[k - 1]))) {
      throw DomainError("pinball_curve: grid must be strictly increasing inside (0, 1)");
    }
  }
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(grid.size());
  for (std::size_t t = 0; t < forecasts.size(); ++t) {
    sums += pinball_row(forecasts[t], observations[static_cast<Eigen::Index>(t)], grid);
  }
  return {grid, sums / static_cast<double>(forecasts.size())};
}

double crps(const ForecastDistribution& forecast, double observation) {
  if (!std::isfinite(observation)) {
    throw DomainError("crps: observation must be finite");
  }
  if (const auto* n = std::get_if<NormalDist>(&forecast)) {
    return crps_normal(*n, observation);
  }
  if (const auto* t = std::get_if<StudentTDist>(&forecast)) {
    return crps_student_t(*t, observation);
  }
  return crps_sst(std::get<Sst>(forecast), observation);
}

double crps_from_pinball(const ForecastDistribution& forecast, double observation, int resolution) {
  if (resolution < 99) {
    throw DomainError("crps_from_pinball: resolution must be at least 99");
  }
  // Trapezoid over the interior nodes k / (resolution + 1); the two end
  // intervals take the value at their inner node, since Q(0) and Q(1) are
  // infinite for unbounded laws.
  const double h = 1.0 / static_cast<double>(resolution + 1);
  double sum = 0.0;
  double first = 0.0;
  double last = 0.0;
  for (int k = 1; k <= resolution; ++k) {
    const double p = static_cast<double>(k) * h;
    const double v = pinball(quantile(forecast, p), observation, p);
    if (k == 1) first = v;
    if (k == resolution) last = v;
    sum += v;
  }
  return 2.0 * h * (sum + 0.5 * (first + last));
}

}  // namespace gasfc
