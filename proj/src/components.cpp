#include "gasfc/components.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "gasfc/error.hpp"

namespace gasfc {
namespace {

constexpr std::array<std::string_view, kComponentCount> kNames{
    "exp_smoothing", "seasonal", "coal",        "eua",         "power",
    "arma",          "rollover", "risk",        "oil",         "temperature",
    "temperature_smoothing",     "garch",       "leverage",    "elevation"};

}  // namespace

std::string to_string(Component c) { return std::string(kNames[static_cast<std::size_t>(c)]); }

Component component_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Component>(i);
  }
  throw DomainError("unknown model component '" + std::string(name) + "'");
}

ComponentMask::ComponentMask(std::initializer_list<Component> on) {
  for (auto c : on) bits_.set(static_cast<std::size_t>(c));
}

ComponentMask ComponentMask::day_ahead() {
  return {Component::exp_smoothing, Component::seasonal, Component::coal,     Component::eua,
          Component::power,         Component::arma,     Component::garch,    Component::leverage,
          Component::elevation};
}

ComponentMask ComponentMask::month_ahead() {
  return {Component::seasonal,    Component::eua,
          Component::oil,         Component::temperature,
          Component::temperature_smoothing,
          Component::rollover,    Component::risk,
          Component::garch,       Component::leverage,
          Component::elevation};
}

ComponentMask ComponentMask::with(Component c) const {
  ComponentMask m = *this;
  m.bits_.set(static_cast<std::size_t>(c));
  return m;
}

ComponentMask ComponentMask::without(Component c) const {
  ComponentMask m = *this;
  m.bits_.reset(static_cast<std::size_t>(c));
  return m;
}

ComponentMask ComponentMask::toggled(Component c) const {
  ComponentMask m = *this;
  m.bits_.flip(static_cast<std::size_t>(c));
  return m;
}

std::vector<Component> ComponentMask::list() const {
  std::vector<Component> out;
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    if (bits_.test(i)) out.push_back(static_cast<Component>(i));
  }
  return out;
}

void validate(const VolatilityParams& v) {
  if (!(v.omega > 0) || !std::isfinite(v.omega)) throw DomainError("volatility: omega must be positive");
  if (!(v.alpha >= 0) || !std::isfinite(v.alpha)) throw DomainError("volatility: alpha must be non-negative");
  if (!(v.beta >= 0) || !std::isfinite(v.beta)) throw DomainError("volatility: beta must be non-negative");
  if (!std::isfinite(v.gamma)) throw DomainError("volatility: gamma must be finite");
  if (!(v.delta > 0) || !std::isfinite(v.delta)) throw DomainError("volatility: delta must be positive");
  if (!(v.nu > 0) || !std::isfinite(v.nu)) throw DomainError("volatility: nu must be positive");
  if (!(v.tau > 2) || std::isnan(v.tau)) throw DomainError("volatility: tau must exceed 2");
}

VolatilityParams pinned(VolatilityParams v, const ComponentMask& mask, bool igarch) {
  if (!mask.enabled(Component::garch)) {
    v.alpha = 0.0;
    v.beta = 0.0;
  } else if (igarch) {
    v.beta = 1.0 - v.alpha;
  }
  if (!mask.enabled(Component::leverage)) v.gamma = 0.0;
  if (!mask.enabled(Component::elevation)) v.delta = 1.0;
  return v;
}

double initial_sd(const VectorCRef& prices) {
  const Eigen::Index n = prices.size();
  if (n < 3) {
    return 1e-12;
  }
  const Eigen::VectorXd diff = prices.tail(n - 1) - prices.head(n - 1);
  const double mean = diff.mean();
  const double var = (diff.array() - mean).square().sum() / static_cast<double>(diff.size() - 1);
  const double sd = std::sqrt(var);
  return std::isfinite(sd) && sd > 1e-12 ? sd : 1e-12;
}

void FilterState::resize(Eigen::Index n) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  mean = Eigen::VectorXd::Constant(n, nan);
  level = Eigen::VectorXd::Zero(n);
  arma_error = Eigen::VectorXd::Zero(n);
  innovation = Eigen::VectorXd::Zero(n);
  base_sd = Eigen::VectorXd::Zero(n);
  cond_sd = Eigen::VectorXd::Zero(n);
}

}  // namespace gasfc
