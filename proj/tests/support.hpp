#pragma once

// Independent numerical oracles and shared fixtures for the test suites.

#include <cmath>
#include <functional>

#include "gasfc/day_ahead.hpp"
#include "gasfc/month_ahead.hpp"

namespace gasfc::testing {

using Fn = std::function<double(double)>;

inline double simpson_step(const Fn& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                           int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature on [a, b].
inline double simpson(const Fn& f, double a, double b, double tol = 1e-11, int depth = 40) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return simpson_step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

/// Integral over the real line: [c - 1, c + 1] directly (split at c), and each
/// tail through x = c +- 1 / w^2, which keeps polynomially decaying integrands
/// bounded near w = 0.
inline double integrate_line(const Fn& f, double c = 0.0, double tol = 1e-11) {
  const Fn right = [&](double w) { return w <= 0 ? 0.0 : f(c + 1.0 / (w * w)) * 2.0 / (w * w * w); };
  const Fn left = [&](double w) { return w <= 0 ? 0.0 : f(c - 1.0 / (w * w)) * 2.0 / (w * w * w); };
  return simpson(f, c - 1.0, c, tol) + simpson(f, c, c + 1.0, tol) + simpson(right, 0.0, 1.0, tol) +
         simpson(left, 0.0, 1.0, tol);
}

/// Root of an increasing function g(x) = target by bisection on [lo, hi].
inline double bisect(const Fn& g, double target, double lo, double hi, int iterations = 200) {
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double gaussian_crps(double mu, double sd, double y) {
  const double z = (y - mu) / sd;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  const double Phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
  return sd * (z * (2.0 * Phi - 1.0) + 2.0 * phi - 1.0 / std::sqrt(M_PI));
}

/// Parameter values of the proposed Day-Ahead specification used throughout
/// the simulation tests.
inline DayAheadParams table_day_ahead() {
  DayAheadParams p;
  p.lambda = 1.152;
  p.psi1 = -0.015;
  p.zeta = {0.019, 0.078, 0.001};
  p.phi = {-0.685};
  p.theta = {0.413};
  p.vol = {0.025, 0.291, 0.726, -0.101, 1.342, 1.039, 6.425};
  return p;
}

inline MonthAheadParams table_month_ahead() {
  MonthAheadParams p;
  p.phi0 = 0.112;
  p.phi1 = 0.997;
  p.eta = -0.353;
  p.psi1 = -0.005;
  p.zeta = {-0.005, 0.001, 0.001};
  p.vol = {0.012, 0.208, 0.834, -0.085, 1.403, 1.132, 6.858};
  return p;
}

}  // namespace gasfc::testing
