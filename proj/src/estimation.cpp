#include "gasfc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace gasfc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Objective over free coordinates with evaluation counting.
class FreeObjective {
 public:
  FreeObjective(const Objective& f, std::span<const ParameterInfo> params) : f_(f), params_(params) {}

  Eigen::VectorXd to_natural(const Eigen::VectorXd& u) const {
    Eigen::VectorXd x(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      x[i] = params_[static_cast<std::size_t>(i)].domain.to_natural(u[i]);
    }
    return x;
  }

  double operator()(const Eigen::VectorXd& u) {
    ++evaluations;
    if (!u.allFinite()) return kInf;
    const Eigen::VectorXd x = to_natural(u);
    if (!x.allFinite()) return kInf;
    try {
      const double v = f_(x);
      return std::isfinite(v) ? v : kInf;
    } catch (const std::exception&) {
      return kInf;
    }
  }

  int evaluations = 0;

 private:
  const Objective& f_;
  std::span<const ParameterInfo> params_;
};

// Nelder-Mead with dimension-adaptive coefficients. Returns the best vertex.
Eigen::VectorXd nelder_mead(FreeObjective& f, const Eigen::VectorXd& start, const Eigen::VectorXd& steps,
                            int budget, double tolerance, double& best_value) {
  const Eigen::Index n = start.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double gamma = 1.0 + 2.0 / dn;
  const double rho = 0.75 - 1.0 / (2.0 * dn);
  const double sigma = 1.0 - 1.0 / dn;

  std::vector<Eigen::VectorXd> vertices(static_cast<std::size_t>(n + 1), start);
  std::vector<double> values(static_cast<std::size_t>(n + 1));
  values[0] = f(start);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& v = vertices[static_cast<std::size_t>(i + 1)];
    v[i] += steps[i];
    values[static_cast<std::size_t>(i + 1)] = f(v);
  }
  const int start_evals = f.evaluations;
  std::vector<std::size_t> order(vertices.size());

  while (f.evaluations - start_evals < budget) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    if (std::isfinite(values[worst]) &&
        std::abs(values[worst] - values[best]) <= tolerance * (std::abs(values[best]) + 1e-12)) {
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      centroid += vertices[order[k]];
    }
    centroid /= dn;

    const Eigen::VectorXd reflected = centroid + alpha * (centroid - vertices[worst]);
    const double fr = f(reflected);
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = centroid + gamma * (reflected - centroid);
      const double fe = f(expanded);
      if (fe < fr) {
        vertices[worst] = expanded;
        values[worst] = fe;
      } else {
        vertices[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      vertices[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted = outside ? Eigen::VectorXd(centroid + rho * (reflected - centroid))
                                               : Eigen::VectorXd(centroid - rho * (centroid - vertices[worst]));
    const double fc = f(contracted);
    if (fc < (outside ? fr : values[worst])) {
      vertices[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k < order.size(); ++k) {
      auto& v = vertices[order[k]];
      v = vertices[best] + sigma * (v - vertices[best]);
      values[order[k]] = f(v);
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  best_value = *it;
  return vertices[static_cast<std::size_t>(it - values.begin())];
}

Eigen::VectorXd central_gradient(FreeObjective& f, const Eigen::VectorXd& u, const Eigen::VectorXd& scales) {
  Eigen::VectorXd g(u.size());
  Eigen::VectorXd probe = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double h = 6e-6 * std::max(std::abs(u[i]), scales[i]);
    probe[i] = u[i] + h;
    const double fp = f(probe);
    probe[i] = u[i] - h;
    const double fm = f(probe);
    probe[i] = u[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

struct PolishOutcome {
  Eigen::VectorXd u;
  double value;
  int iterations;
  bool converged;
};

// Largest t with at +- t w inside every parameter domain.
double room_along(const Eigen::VectorXd& at, const Eigen::VectorXd& w, std::span<const ParameterInfo> params) {
  double room = kInf;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    if (w[i] == 0.0) continue;
    const Domain& d = params[static_cast<std::size_t>(i)].domain;
    double r = kInf;
    if (d.kind() == Domain::Kind::lower_bounded) r = at[i] - d.lower();
    if (d.kind() == Domain::Kind::unit_interval) r = std::min(at[i], 1.0 - at[i]);
    room = std::min(room, r / std::abs(w[i]));
  }
  return room;
}

// Re-measures the curvature along nearly flat eigendirections of the
// equilibrated Hessian by second differences along the direction itself.
// Mixed partials of a kinked likelihood are too noisy to resolve a small
// eigenvalue and can turn it negative.
Eigen::MatrixXd refine_flat_directions(const Objective& f, const Eigen::VectorXd& at,
                                       std::span<const ParameterInfo> params, const Eigen::MatrixXd& hess) {
  if (!hess.allFinite()) return hess;
  Eigen::VectorXd d = hess.diagonal().cwiseAbs().cwiseSqrt();
  if (!(d.array() > 0).all()) return hess;
  const Eigen::MatrixXd scaled = d.cwiseInverse().asDiagonal() * hess * d.cwiseInverse().asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double f0 = f(at);
  bool changed = false;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda[k] >= 0.05) continue;
    const Eigen::VectorXd w = d.cwiseInverse().cwiseProduct(eig.eigenvectors().col(k));
    const double room = 0.5 * room_along(at, w, params);
    const auto curvature = [&](double t) { return (f(at + t * w) + f(at - t * w) - 2.0 * f0) / (t * t); };
    double t = std::min(1.0, room);
    double c = curvature(t);
    if (std::isfinite(c) && c > 0) {
      t = std::min({1.0 / std::sqrt(c), 10.0, room});
      c = curvature(t);
    }
    if (!std::isfinite(c)) continue;
    lambda[k] = c;
    changed = true;
  }
  if (!changed) return hess;
  const Eigen::MatrixXd rebuilt = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::MatrixXd out = d.asDiagonal() * rebuilt * d.asDiagonal();
  return 0.5 * (out + out.transpose());
}

// Inverse of the per-coordinate second differences, 1/scale^2 where the
// curvature is not positive.
Eigen::MatrixXd diagonal_inverse_curvature(FreeObjective& f, const Eigen::VectorXd& u, double value,
                                           const Eigen::VectorXd& scales) {
  Eigen::VectorXd d(u.size());
  Eigen::VectorXd probe = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double h = 1e-2 * scales[i];
    probe[i] = u[i] + h;
    const double fp = f(probe);
    probe[i] = u[i] - h;
    const double fm = f(probe);
    probe[i] = u[i];
    const double c = (fp + fm - 2.0 * value) / (h * h);
    d[i] = std::isfinite(c) && c > 0 ? 1.0 / c : scales[i] * scales[i];
  }
  return d.asDiagonal();
}

// BFGS on the free coordinates with finite-difference gradients and an
// Armijo backtracking line search, started from the diagonal curvature.
PolishOutcome bfgs(FreeObjective& f, Eigen::VectorXd u, double value, const Eigen::VectorXd& scales, int max_iter,
                   double tolerance) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd inv_h = diagonal_inverse_curvature(f, u, value, scales);
  Eigen::VectorXd g = central_gradient(f, u, scales);
  PolishOutcome out{u, value, 0, false};
  if (!g.allFinite()) {
    return out;
  }
  int small_steps = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    out.iterations = iter;
    Eigen::VectorXd dir = -inv_h * g;
    double slope = g.dot(dir);
    if (!(slope < 0)) {
      inv_h = diagonal_inverse_curvature(f, u, value, scales);
      dir = -inv_h * g;
      slope = g.dot(dir);
      if (!(slope < 0)) {
        out.converged = g.cwiseProduct(scales).cwiseAbs().maxCoeff() < 1e-3 * (1.0 + std::abs(value));
        break;
      }
    }
    double step = 1.0;
    double trial_value = kInf;
    Eigen::VectorXd trial;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      trial = u + step * dir;
      trial_value = f(trial);
      if (trial_value <= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent along a finite-difference direction: at a (noisy) minimum.
      out.converged = g.cwiseProduct(scales).cwiseAbs().maxCoeff() < 1e-3 * (1.0 + std::abs(value)) ||
                      small_steps > 0;
      break;
    }
    const Eigen::VectorXd g_new = central_gradient(f, trial, scales);
    if (!g_new.allFinite()) break;
    const Eigen::VectorXd s = trial - u;
    const Eigen::VectorXd y = g_new - g;
    const double decrease = value - trial_value;
    u = trial;
    g = g_new;
    value = trial_value;
    out.u = u;
    out.value = value;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double r = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      inv_h = (id - r * s * y.transpose()) * inv_h * (id - r * y * s.transpose()) + r * s * s.transpose();
    }
    if (decrease <= tolerance * (std::abs(value) + 1.0)) {
      if (++small_steps >= 3) {
        out.converged = true;
        break;
      }
    } else {
      small_steps = 0;
    }
  }
  return out;
}

}  // namespace

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::two_sided:
      return "two_sided";
    case Alternative::greater:
      return "greater";
    case Alternative::less:
      return "less";
  }
  return "unknown";
}

bool Domain::contains(double natural) const {
  switch (kind_) {
    case Kind::real:
      return std::isfinite(natural);
    case Kind::lower_bounded:
      return natural > lower_ && std::isfinite(natural);
    case Kind::unit_interval:
      return natural > 0.0 && natural < 1.0;
  }
  return false;
}

double Domain::to_free(double natural) const {
  if (!contains(natural)) {
    throw DomainError("parameter value outside its domain");
  }
  switch (kind_) {
    case Kind::real:
      return natural;
    case Kind::lower_bounded:
      return std::log(natural - lower_);
    case Kind::unit_interval:
      return std::log(natural / (1.0 - natural));
  }
  return natural;
}

double Domain::to_natural(double free) const {
  switch (kind_) {
    case Kind::real:
      return free;
    case Kind::lower_bounded:
      return lower_ + std::exp(free);
    case Kind::unit_interval:
      return 1.0 / (1.0 + std::exp(-free));
  }
  return free;
}

Eigen::VectorXd FitResult::std_errors() const {
  Eigen::VectorXd se(vcov.rows());
  for (Eigen::Index i = 0; i < se.size(); ++i) {
    const double v = vcov(i, i);
    se[i] = std::isfinite(v) && v >= 0 ? std::sqrt(v) : kNaN;
  }
  return se;
}

FitResult fit_mle(const Objective& nll, const Eigen::VectorXd& start, std::span<const ParameterInfo> params,
                  const OptimizerConfig& config) {
  const auto n = static_cast<Eigen::Index>(params.size());
  if (start.size() != n) {
    throw DomainError("fit_mle: start vector and parameter list differ in length");
  }
  FreeObjective f(nll, params);
  Eigen::VectorXd u(n);
  Eigen::VectorXd scales(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = params[static_cast<std::size_t>(i)];
    if (!p.domain.contains(start[i])) {
      throw DomainError("fit_mle: start value of '" + p.name + "' lies outside its domain");
    }
    u[i] = p.domain.to_free(start[i]);
    scales[i] = p.scale > 0 ? p.scale : 1.0;
  }
  double value = f(u);
  if (!std::isfinite(value)) {
    throw NumericalError("fit_mle: objective is not finite at the start point");
  }

  FitResult r;
  r.converged = n == 0;
  Eigen::VectorXd steps(n);
  // Each cycle is a simplex search followed by the quasi-Newton polish. Later
  // cycles restart the simplex around the incumbent, which moves the search
  // off saddle points that gradient steps cannot leave.
  for (int cycle = 0; cycle <= config.restarts && n > 0; ++cycle) {
    const double cycle_start = value;
    if (config.simplex_evaluations > 0) {
      for (Eigen::Index i = 0; i < n; ++i) {
        steps[i] = config.simplex_step * std::max(std::abs(u[i]), scales[i]);
      }
      double nm_value = value;
      const Eigen::VectorXd nm_u = nelder_mead(f, u, steps, config.simplex_evaluations, config.tolerance, nm_value);
      if (nm_value < value) {
        u = nm_u;
        value = nm_value;
      }
    }
    if (config.polish_iterations > 0) {
      const auto polished = bfgs(f, u, value, scales, config.polish_iterations, config.tolerance);
      if (polished.value <= value) {
        u = polished.u;
        value = polished.value;
      }
      r.iterations += polished.iterations;
      r.converged = polished.converged;
    } else {
      r.converged = true;
    }
    if (cycle > 0 && cycle_start - value <= 1e-6 * (1.0 + std::abs(value))) break;
  }
  r.params = f.to_natural(u);
  r.nll = value;
  r.evaluations = f.evaluations;
  if (config.compute_hessian) {
    r.hessian = adaptive_hessian(nll, r.params, params, config.hessian_step, config.hessian_passes);
    r.vcov = vcov_from_hessian(r.hessian);
  } else {
    r.hessian = Eigen::MatrixXd::Constant(n, n, kNaN);
    r.vcov = Eigen::MatrixXd::Constant(n, n, kNaN);
  }
  return r;
}

Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& at, double rel_step) {
  Eigen::VectorXd h(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    h[i] = rel_step * std::max(1.0, std::abs(at[i]));
  }
  return numeric_hessian(f, at, h);
}

Eigen::MatrixXd adaptive_hessian(const Objective& f, const Eigen::VectorXd& at, std::span<const ParameterInfo> params,
                                 double rel_step, int passes) {
  const Eigen::Index n = at.size();
  if (static_cast<Eigen::Index>(params.size()) != n) {
    throw DomainError("adaptive_hessian: parameter list and point differ in length");
  }
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h[i] = rel_step * std::max(1.0, std::abs(at[i]));
  }
  Eigen::MatrixXd hess = numeric_hessian(f, at, h);
  Eigen::MatrixXd vcov = vcov_from_hessian(hess);
  const auto available = [](const Eigen::MatrixXd& v) { return v.diagonal().array().isFinite().count(); };
  for (int pass = 0; pass < passes; ++pass) {
    Eigen::VectorXd next = h;
    for (Eigen::Index i = 0; i < n; ++i) {
      // Without a marginal SE fall back to the conditional one, 1/sqrt(H_ii).
      double se = std::sqrt(vcov(i, i));
      if (!std::isfinite(se) || !(se > 0)) se = 1.0 / std::sqrt(hess(i, i));
      if (!std::isfinite(se) || !(se > 0)) continue;
      double room = std::numeric_limits<double>::infinity();
      const Domain& d = params[static_cast<std::size_t>(i)].domain;
      if (d.kind() == Domain::Kind::lower_bounded) room = at[i] - d.lower();
      if (d.kind() == Domain::Kind::unit_interval) room = std::min(at[i], 1.0 - at[i]);
      next[i] = std::max(std::min(se, 0.5 * room), h[i]);
    }
    if (((next - h).array().abs() <= 0.1 * h.array()).all()) break;
    // Wide steps can make the mixed differences indefinite; a pass that loses
    // standard errors is discarded.
    Eigen::MatrixXd wider = numeric_hessian(f, at, next);
    Eigen::MatrixXd wider_vcov = vcov_from_hessian(wider);
    if (available(wider_vcov) < available(vcov)) break;
    h = next;
    hess = std::move(wider);
    vcov = std::move(wider_vcov);
  }
  return passes > 0 ? refine_flat_directions(f, at, params, hess) : hess;
}

Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& at, const Eigen::VectorXd& h) {
  const Eigen::Index n = at.size();
  if (h.size() != n) {
    throw DomainError("numeric_hessian: one step per coordinate is required");
  }
  auto eval = [&f](const Eigen::VectorXd& x) {
    try {
      const double v = f(x);
      return std::isfinite(v) ? v : kNaN;
    } catch (const std::exception&) {
      return kNaN;
    }
  };
  const double f0 = eval(at);
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd x = at;
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = at[i] + h[i];
    const double fp = eval(x);
    x[i] = at[i] - h[i];
    const double fm = eval(x);
    x[i] = at[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      x[i] = at[i] + h[i];
      x[j] = at[j] + h[j];
      const double fpp = eval(x);
      x[j] = at[j] - h[j];
      const double fpm = eval(x);
      x[i] = at[i] - h[i];
      const double fmm = eval(x);
      x[j] = at[j] + h[j];
      const double fmp = eval(x);
      x[i] = at[i];
      x[j] = at[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return 0.5 * (hess + hess.transpose());
}

Eigen::MatrixXd vcov_from_hessian(const Eigen::MatrixXd& h) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n) {
    throw DomainError("vcov_from_hessian: matrix is not square");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(n, n, kNaN);
  std::vector<bool> usable(static_cast<std::size_t>(n), true);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(h(i, j))) {
        usable[static_cast<std::size_t>(i)] = false;
        usable[static_cast<std::size_t>(j)] = false;
      }
    }
  }
  // Peel off parameters that load on null directions until the block inverts.
  for (;;) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (usable[static_cast<std::size_t>(i)]) idx.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    if (m == 0) return out;
    Eigen::MatrixXd block(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        block(a, b) = h(idx[a], idx[b]);
      }
    }
    // Equilibrate so the rank decision does not depend on parameter units.
    Eigen::VectorXd d = block.diagonal().cwiseAbs().cwiseSqrt();
    for (auto& v : d) {
      if (!(v > 0)) v = 1.0;
    }
    const Eigen::MatrixXd scaled = d.cwiseInverse().asDiagonal() * block * d.cwiseInverse().asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double top = lambda.cwiseAbs().maxCoeff();
    const double cutoff = 1e-10 * std::max(top, 1e-300);
    bool removed = false;
    for (Eigen::Index k = 0; k < m; ++k) {
      if (std::abs(lambda[k]) > cutoff) continue;
      const auto v = eig.eigenvectors().col(k);
      for (Eigen::Index a = 0; a < m; ++a) {
        if (std::abs(v[a]) > 1e-6) {
          usable[static_cast<std::size_t>(idx[a])] = false;
          removed = true;
        }
      }
    }
    if (removed) continue;
    Eigen::MatrixXd inv_scaled = eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::MatrixXd inv = d.cwiseInverse().asDiagonal() * inv_scaled * d.cwiseInverse().asDiagonal();
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        out(idx[a], idx[b]) = 0.5 * (inv(a, b) + inv(b, a));
      }
    }
    for (Eigen::Index a = 0; a < m; ++a) {
      if (!(out(idx[a], idx[a]) >= 0)) {
        out.row(idx[a]).setConstant(kNaN);
        out.col(idx[a]).setConstant(kNaN);
      }
    }
    return out;
  }
}

HessianAverage average_hessians(std::span<const Eigen::MatrixXd> hessians) {
  if (hessians.empty()) {
    throw DomainError("average_hessians: no matrices supplied");
  }
  const Eigen::Index r = hessians.front().rows();
  const Eigen::Index c = hessians.front().cols();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(r, c);
  HessianAverage out;
  out.counts = Eigen::MatrixXi::Zero(r, c);
  for (const auto& h : hessians) {
    if (h.rows() != r || h.cols() != c) {
      throw DomainError("average_hessians: matrices differ in shape");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) {
        if (std::isfinite(h(i, j))) {
          sum(i, j) += h(i, j);
          ++out.counts(i, j);
        }
      }
    }
  }
  out.mean = Eigen::MatrixXd::Constant(r, c, kNaN);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      if (out.counts(i, j) > 0) out.mean(i, j) = sum(i, j) / out.counts(i, j);
    }
  }
  return out;
}

ZTestResult z_test(double estimate, double std_error, double null_value, Alternative alternative) {
  if (!(std_error > 0) || !std::isfinite(std_error)) {
    throw UnavailableStdError("z_test: standard error unavailable or not positive");
  }
  ZTestResult z;
  z.estimate = estimate;
  z.null_value = null_value;
  z.std_error = std_error;
  z.alternative = alternative;
  z.statistic = (estimate - null_value) / std_error;
  switch (alternative) {
    case Alternative::two_sided:
      z.p_value = 2.0 * normal_cdf(-std::abs(z.statistic));
      break;
    case Alternative::greater:
      z.p_value = normal_cdf(-z.statistic);
      break;
    case Alternative::less:
      z.p_value = normal_cdf(z.statistic);
      break;
  }
  return z;
}

ZTestResult linear_z_test(const Eigen::VectorXd& estimate, const Eigen::MatrixXd& vcov, const Eigen::VectorXd& weights,
                          double null_value, Alternative alternative) {
  double var = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
      if (weights[i] == 0.0 || weights[j] == 0.0) continue;
      var += weights[i] * weights[j] * vcov(i, j);
    }
  }
  return z_test(weights.dot(estimate), std::isfinite(var) && var > 0 ? std::sqrt(var) : kNaN, null_value,
                alternative);
}

std::vector<ParameterTest> parameter_tests(std::span<const ParameterInfo> info, const Eigen::VectorXd& estimate,
                                           const Eigen::MatrixXd& vcov) {
  std::vector<ParameterTest> out;
  for (std::size_t i = 0; i < info.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    ParameterTest row;
    row.name = info[i].name;
    row.estimate = estimate[k];
    row.null_value = info[i].null_value;
    row.alternative = info[i].alternative;
    const double var = vcov(k, k);
    if (std::isfinite(var) && var > 0) {
      row.test = z_test(row.estimate, std::sqrt(var), row.null_value, row.alternative);
    }
    out.push_back(std::move(row));
  }
  return out;
}

ForecastDistribution fit_residual_distribution(const VectorCRef& residuals, Family family) {
  const auto n = residuals.size();
  if (n < 30) {
    throw DataError("fit_residual_distribution: at least 30 residuals are required");
  }
  if (!residuals.allFinite()) {
    throw DataError("fit_residual_distribution: residuals must be finite");
  }
  const double mu = residuals.mean();
  const double sd = std::sqrt((residuals.array() - mu).square().sum() / static_cast<double>(n));
  if (!(sd > 0)) {
    throw DataError("fit_residual_distribution: residuals are constant");
  }
  switch (family) {
    case Family::normal:
      return NormalDist(mu, sd);
    case Family::student_t: {
      const std::vector<ParameterInfo> info{{"location", Domain::real(), 0.0, Alternative::two_sided, sd},
                                            {"scale", Domain::positive()},
                                            {"df", Domain::above(2.0)}};
      const Objective nll = [&residuals](const Eigen::VectorXd& x) {
        const StudentTDist t(x[0], x[1], x[2]);
        const double v = t.df;
        const double log_norm = std::lgamma((v + 1) / 2) - std::lgamma(v / 2) - 0.5 * std::log(v * M_PI) -
                                std::log(t.scale);
        double total = 0.0;
        for (Eigen::Index i = 0; i < residuals.size(); ++i) {
          const double z = (residuals[i] - t.location) / t.scale;
          total += log_norm - (v + 1) / 2 * std::log1p(z * z / v);
        }
        return -total;
      };
      Eigen::VectorXd start(3);
      start << mu, sd * std::sqrt(6.0 / 8.0), 8.0;
      OptimizerConfig cfg;
      cfg.simplex_evaluations = 300;
      cfg.compute_hessian = false;
      const auto fit = fit_mle(nll, start, info, cfg);
      return StudentTDist(fit.params[0], fit.params[1], fit.params[2]);
    }
    case Family::sst:
      break;
  }
  throw DomainError("fit_residual_distribution: family must be normal or student_t");
}

double sst_negative_log_likelihood(const VectorCRef& sample, double mu, double sigma, double nu, double tau) {
  const SstShape<double> shape(nu, tau);
  if (!(sigma > 0)) {
    throw DomainError("sst_negative_log_likelihood: sigma must be positive");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    total += shape.logpdf(sample[i], mu, sigma);
  }
  return -total;
}

FitResult fit_sst(const VectorCRef& sample, const OptimizerConfig& config) {
  if (sample.size() < 30) {
    throw DataError("fit_sst: at least 30 observations are required");
  }
  const double mu = sample.mean();
  const double sd = std::sqrt((sample.array() - mu).square().sum() / static_cast<double>(sample.size() - 1));
  const std::vector<ParameterInfo> info{{"mu", Domain::real(), 0.0, Alternative::two_sided, sd},
                                        {"sigma", Domain::positive()},
                                        {"nu", Domain::positive(), 1.0},
                                        {"tau", Domain::above(2.0), 4.0, Alternative::greater}};
  const Objective nll = [&sample](const Eigen::VectorXd& x) {
    return sst_negative_log_likelihood(sample, x[0], x[1], x[2], x[3]);
  };
  Eigen::VectorXd start(4);
  start << mu, sd, 1.0, 8.0;
  return fit_mle(nll, start, info, config);
}

}  // namespace gasfc
