#pragma once

// Skewed Student-t distribution (Fernandez-Steel skewing of the Student-t)
// parameterized by its mean mu, standard deviation sigma, skewness nu and
// degrees of freedom tau, plus the Normal and location-scale Student-t laws
// used by the benchmark models.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "gasfc/error.hpp"
#include "gasfc/random.hpp"

namespace gasfc {

/// Shape-only constants of the skewed Student-t. Depend on (nu, tau) alone, so
/// likelihood loops with a time-varying sigma build this once per evaluation.
template <typename Scalar = double>
class SstShape {
 public:
  SstShape(Scalar nu, Scalar tau) : nu_(nu), tau_(tau) {
    if (!(nu > 0) || !std::isfinite(nu)) {
      throw DomainError("skewed Student-t requires nu > 0");
    }
    if (!(tau > 2) || std::isnan(tau)) {
      throw DomainError("skewed Student-t requires tau > 2");
    }
    using std::log;
    using std::sqrt;
    const Scalar b = boost::math::beta(Scalar(0.5), tau / 2);
    const Scalar nu2 = nu * nu;
    log_c_ = log(2 * nu) - log((1 + nu2) * b * sqrt(tau));
    m_ = 2 * sqrt(tau) * (nu - 1 / nu) / ((tau - 1) * b);
    s_ = sqrt(tau / (tau - 2) * (nu2 + 1 / nu2 - 1) - m_ * m_);
    left_mass_ = 1 / (1 + nu2);
  }

  Scalar nu() const { return nu_; }
  Scalar tau() const { return tau_; }
  Scalar m() const { return m_; }
  Scalar s() const { return s_; }
  Scalar log_c() const { return log_c_; }
  /// Probability mass below the mode-split point mu0.
  Scalar left_mass() const { return left_mass_; }

  /// Log-density of the mean-zero, unit-sd member at x.
  Scalar standard_logpdf(Scalar x) const {
    using std::log;
    using std::log1p;
    const Scalar z = x * s_ + m_;
    const Scalar arg = z < 0 ? nu_ * nu_ * z * z / tau_ : z * z / (nu_ * nu_ * tau_);
    return log_c_ + log(s_) - (tau_ + 1) / 2 * log1p(arg);
  }

  Scalar logpdf(Scalar x, Scalar mu, Scalar sigma) const {
    using std::log;
    return standard_logpdf((x - mu) / sigma) - log(sigma);
  }

  /// Cdf of the mean-zero, unit-sd member.
  Scalar standard_cdf(Scalar x) const {
    const boost::math::students_t_distribution<Scalar> t(tau_);
    const Scalar z = x * s_ + m_;
    if (z < 0) {
      return 2 * left_mass_ * boost::math::cdf(t, nu_ * z);
    }
    const Scalar upper = boost::math::cdf(boost::math::complement(t, z / nu_));
    return 1 - 2 * (1 - left_mass_) * upper;
  }

  /// Inverse of standard_cdf, branch-wise through the Student-t quantile.
  Scalar standard_quantile(Scalar q) const {
    const boost::math::students_t_distribution<Scalar> t(tau_);
    Scalar z;
    if (q < left_mass_) {
      z = boost::math::quantile(t, q / (2 * left_mass_)) / nu_;
    } else {
      const Scalar upper = (1 - q) / (2 * (1 - left_mass_));
      z = upper >= Scalar(0.5)
              ? Scalar(0)
              : nu_ * boost::math::quantile(boost::math::complement(t, upper));
    }
    return (z - m_) / s_;
  }

 private:
  Scalar nu_;
  Scalar tau_;
  Scalar log_c_{};
  Scalar m_{};
  Scalar s_{};
  Scalar left_mass_{};
};

/// Skewed Student-t with mean mu, standard deviation sigma, skewness nu and
/// degrees of freedom tau. Validated at construction; immutable afterwards.
template <typename Scalar = double>
class SstParams {
 public:
  SstParams(Scalar mu, Scalar sigma, Scalar nu, Scalar tau) : mu_(mu), sigma_(sigma), shape_(nu, tau) {
    if (!std::isfinite(mu)) {
      throw DomainError("skewed Student-t requires a finite mu");
    }
    if (!(sigma > 0) || !std::isfinite(sigma)) {
      throw DomainError("skewed Student-t requires sigma > 0");
    }
  }

  Scalar mu() const { return mu_; }
  Scalar sigma() const { return sigma_; }
  Scalar nu() const { return shape_.nu(); }
  Scalar tau() const { return shape_.tau(); }
  const SstShape<Scalar>& shape() const { return shape_; }

  /// Split point of the two density branches.
  Scalar mu0() const { return mu_ - sigma_ * shape_.m() / shape_.s(); }
  Scalar sigma0() const { return sigma_ / shape_.s(); }

 private:
  Scalar mu_;
  Scalar sigma_;
  SstShape<Scalar> shape_;
};

using Sst = SstParams<double>;

template <typename Scalar>
Scalar sst_logpdf(Scalar x, const SstParams<Scalar>& p) {
  return p.shape().logpdf(x, p.mu(), p.sigma());
}

template <typename Scalar>
Scalar sst_pdf(Scalar x, const SstParams<Scalar>& p) {
  using std::exp;
  return exp(sst_logpdf(x, p));
}

template <typename Scalar>
Scalar sst_cdf(Scalar x, const SstParams<Scalar>& p) {
  if (std::isnan(x)) {
    throw DomainError("sst_cdf: x is NaN");
  }
  if (std::isinf(x)) {
    return x < 0 ? Scalar(0) : Scalar(1);
  }
  return p.shape().standard_cdf((x - p.mu()) / p.sigma());
}

template <typename Scalar>
Scalar sst_quantile(const SstParams<Scalar>& p, Scalar q) {
  if (!(q > 0 && q < 1)) {
    throw DomainError("sst_quantile: probability must lie in (0, 1)");
  }
  return p.mu() + p.sigma() * p.shape().standard_quantile(q);
}

/// Elementwise log-density over an Eigen array expression.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> sst_logpdf(
    const Eigen::ArrayBase<Derived>& x, const SstParams<typename Derived::Scalar>& p) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([&p](Scalar v) { return sst_logpdf(v, p); });
}

/// Inverse-cdf draws; deterministic given seed.
inline Eigen::VectorXd sst_sample(const Sst& p, std::size_t n, std::uint64_t seed) {
  if (n == 0) {
    throw DomainError("sst_sample: n must be at least 1");
  }
  Rng rng(seed);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (auto& v : out) {
    v = sst_quantile(p, rng.uniform());
  }
  return out;
}

/// Gaussian law with mean and standard deviation.
struct NormalDist {
  double mean = 0.0;
  double sd = 1.0;

  NormalDist() = default;
  NormalDist(double mean_, double sd_) : mean(mean_), sd(sd_) {
    if (!(sd_ > 0) || !std::isfinite(sd_) || !std::isfinite(mean_)) {
      throw DomainError("normal distribution requires finite mean and sd > 0");
    }
  }
};

/// Location-scale Student-t; scale is not the standard deviation.
struct StudentTDist {
  double location = 0.0;
  double scale = 1.0;
  double df = 5.0;

  StudentTDist() = default;
  StudentTDist(double location_, double scale_, double df_) : location(location_), scale(scale_), df(df_) {
    if (!(scale_ > 0) || !std::isfinite(scale_) || !std::isfinite(location_)) {
      throw DomainError("Student-t distribution requires finite location and scale > 0");
    }
    if (!(df_ > 1)) {
      throw DomainError("Student-t distribution requires df > 1");
    }
  }
};

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace gasfc
