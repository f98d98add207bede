#pragma once

// Maximum-likelihood machinery shared by every model: optimization over an
// unconstrained reparameterization, central-difference Hessians in natural
// coordinates, covariance extraction with per-entry availability, z-tests.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gasfc/distribution.hpp"
#include "gasfc/scoring.hpp"

namespace gasfc {

enum class Alternative { two_sided, greater, less };

std::string to_string(Alternative a);

/// Admissible range of one natural parameter and its map to the real line.
class Domain {
 public:
  enum class Kind { real, lower_bounded, unit_interval };

  static Domain real() { return Domain(Kind::real, 0.0); }
  static Domain positive() { return Domain(Kind::lower_bounded, 0.0); }
  static Domain above(double lower) { return Domain(Kind::lower_bounded, lower); }
  static Domain unit_interval() { return Domain(Kind::unit_interval, 0.0); }

  Kind kind() const { return kind_; }
  double lower() const { return lower_; }
  bool contains(double natural) const;
  double to_free(double natural) const;
  double to_natural(double free) const;

 private:
  Domain(Kind k, double lower) : kind_(k), lower_(lower) {}
  Kind kind_;
  double lower_;
};

/// A free (estimated) parameter: name, domain, z-test null and a typical
/// magnitude of its free coordinate used to scale optimizer steps.
struct ParameterInfo {
  std::string name;
  Domain domain = Domain::real();
  double null_value = 0.0;
  Alternative alternative = Alternative::two_sided;
  double scale = 1.0;
};

struct OptimizerConfig {
  int simplex_evaluations = 2000;  // Nelder-Mead budget
  int polish_iterations = 200;     // BFGS iterations after the simplex stage
  int restarts = 2;                // extra simplex + polish cycles while they still improve
  double simplex_step = 0.1;       // initial simplex edge relative to max(|u|, scale)
  double tolerance = 1e-9;         // relative objective change treated as converged
  double hessian_step = 1e-4;      // relative central-difference step of the first pass
  int hessian_passes = 3;          // step refinements matched to the standard errors; 0 = fixed relative step
  bool compute_hessian = true;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct FitResult {
  Eigen::VectorXd params;  // natural coordinates
  double nll = 0.0;
  Eigen::MatrixXd hessian;  // natural coordinates; NaN marks unavailable entries
  Eigen::MatrixXd vcov;     // NaN marks unavailable entries
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;

  /// Square roots of the vcov diagonal, NaN where unavailable.
  Eigen::VectorXd std_errors() const;
};

/// Minimizes `nll` (a function of natural parameters) starting at `start`.
/// Non-finite values and exceptions thrown by the objective count as +inf.
FitResult fit_mle(const Objective& nll, const Eigen::VectorXd& start, std::span<const ParameterInfo> params,
                  const OptimizerConfig& config = {});

/// Central second differences with step rel_step * max(1, |x_i|).
Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& at, double rel_step = 1e-4);

/// Central second differences with an explicit step per coordinate.
Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& at, const Eigen::VectorXd& steps);

/// Hessian whose steps are matched to the resulting standard errors. Starts
/// from rel_step * max(1, |x_i|), then repeatedly sets step_i to the current
/// standard error of x_i (kept inside the parameter domain). Likelihoods built
/// from |eps_t| have kinks wherever a residual changes sign, and a minimizer
/// tends to sit on one; second differences over a tiny step then measure the
/// kink rather than the curvature the standard error refers to. A pass that
/// leaves fewer standard errors available than the previous one is discarded.
Eigen::MatrixXd adaptive_hessian(const Objective& f, const Eigen::VectorXd& at, std::span<const ParameterInfo> params,
                                 double rel_step = 1e-4, int passes = 3);

/// Inverse of a symmetric Hessian. Parameters touched by a (numerically) null
/// direction, NaN entries or a negative variance are marked NaN; the rest is the
/// inverse of the remaining block.
Eigen::MatrixXd vcov_from_hessian(const Eigen::MatrixXd& h);

struct HessianAverage {
  Eigen::MatrixXd mean;    // NaN where no input had the entry
  Eigen::MatrixXi counts;  // inputs contributing to each entry
};

HessianAverage average_hessians(std::span<const Eigen::MatrixXd> hessians);

struct ZTestResult {
  double estimate = 0.0;
  double null_value = 0.0;
  double std_error = 0.0;
  double statistic = 0.0;
  double p_value = 1.0;
  Alternative alternative = Alternative::two_sided;
};

/// Raised when a z-test is requested without a usable standard error.
class UnavailableStdError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

ZTestResult z_test(double estimate, double std_error, double null_value, Alternative alternative);

/// z-test of the linear combination w' theta using the covariance matrix.
ZTestResult linear_z_test(const Eigen::VectorXd& estimate, const Eigen::MatrixXd& vcov, const Eigen::VectorXd& weights,
                          double null_value, Alternative alternative);

/// One row of a parameter table: estimate, null hypothesis and, when a
/// standard error is available, the z-test against the null.
struct ParameterTest {
  std::string name;
  double estimate = 0.0;
  double null_value = 0.0;
  Alternative alternative = Alternative::two_sided;
  std::optional<ZTestResult> test;  // empty when no standard error was obtained
};

std::vector<ParameterTest> parameter_tests(std::span<const ParameterInfo> info, const Eigen::VectorXd& estimate,
                                           const Eigen::MatrixXd& vcov);

/// Gaussian or Student-t maximum-likelihood fit to a residual sample.
ForecastDistribution fit_residual_distribution(const VectorCRef& residuals, Family family);

/// -sum log pdf of an iid skewed Student-t sample.
double sst_negative_log_likelihood(const VectorCRef& sample, double mu, double sigma, double nu, double tau);

/// Maximum-likelihood fit of (mu, sigma, nu, tau) to an iid sample.
FitResult fit_sst(const VectorCRef& sample, const OptimizerConfig& config = {});

}  // namespace gasfc
