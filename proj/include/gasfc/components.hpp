#pragma once

// Toggleable model components and the volatility block shared by the
// Day-Ahead and Month-Ahead models.

#include <bitset>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gasfc/scoring.hpp"

namespace gasfc {

enum class Component {
  exp_smoothing,  // Day-Ahead level update (lambda)
  seasonal,       // psi1
  coal,
  eua,
  power,
  arma,                   // Day-Ahead ARMA errors (phi, theta)
  rollover,               // Month-Ahead first-day switch to the Two-Month-Ahead price
  risk,                   // Month-Ahead risk-premium decay (eta)
  oil,
  temperature,
  temperature_smoothing,  // Month-Ahead: smoothed (on) or raw (off) lagged temperature
  garch,                  // alpha, beta
  leverage,               // gamma
  elevation,              // delta on Mondays / first trading days
};

inline constexpr std::size_t kComponentCount = 14;

std::string to_string(Component c);

/// Accepts the names produced by to_string. Throws DomainError otherwise.
Component component_from_string(std::string_view name);

class ComponentMask {
 public:
  ComponentMask() = default;
  ComponentMask(std::initializer_list<Component> on);

  /// Components of the proposed Day-Ahead / Month-Ahead specifications.
  static ComponentMask day_ahead();
  static ComponentMask month_ahead();

  bool enabled(Component c) const { return bits_.test(static_cast<std::size_t>(c)); }
  ComponentMask with(Component c) const;
  ComponentMask without(Component c) const;
  ComponentMask toggled(Component c) const;
  std::vector<Component> list() const;

  bool operator==(const ComponentMask&) const = default;

 private:
  std::bitset<kComponentCount> bits_;
};

/// Absolute-value TGARCH with leverage, elevation multiplier and the
/// skewed Student-t innovation shape.
struct VolatilityParams {
  double omega = 0.1;
  double alpha = 0.1;
  double beta = 0.8;
  double gamma = 0.0;
  double delta = 1.0;
  double nu = 1.0;
  double tau = 8.0;
};

/// sigma~_t from the previous innovation and the previous un-elevated sigma~.
inline double tgarch_update(const VolatilityParams& v, double prev_innovation, double prev_sd) {
  const double a = prev_innovation < 0 ? -prev_innovation : prev_innovation;
  return v.omega + v.alpha * a + v.beta * prev_sd + (prev_innovation < 0 ? v.gamma * a : 0.0);
}

/// Throws DomainError unless omega > 0, alpha, beta >= 0, delta > 0, nu > 0, tau > 2.
void validate(const VolatilityParams& v);

/// Neutral values for disabled volatility components; IGARCH ties beta = 1 - alpha.
VolatilityParams pinned(VolatilityParams v, const ComponentMask& mask, bool igarch);

/// Sample standard deviation of the first differences of `prices`, floored at 1e-12.
double initial_sd(const VectorCRef& prices);

/// Per-row recursions of a filtered model. Rows before `start` hold warm-up
/// values (level = price, zero innovations, sd = initial sd, NaN mean).
struct FilterState {
  Eigen::Index start = 0;
  Eigen::VectorXd mean;      // conditional mean of y_t
  Eigen::VectorXd level;     // l_t (Day-Ahead); y_t for Month-Ahead
  Eigen::VectorXd arma_error;  // d_t
  Eigen::VectorXd innovation;  // eps_t
  Eigen::VectorXd base_sd;     // sigma~_t
  Eigen::VectorXd cond_sd;     // sigma_t

  void resize(Eigen::Index n);
};

/// Presample settings for the simulators: rows before the warm-up boundary are
/// a Gaussian random walk from initial_level with step sd initial_sd.
struct SimulationOptions {
  double initial_level = 20.0;
  double initial_sd = 0.5;
};

}  // namespace gasfc
