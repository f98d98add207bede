#pragma once

// Month-Ahead model: random walk with a first-trading-day rollover to the
// Two-Month-Ahead price, linear risk-premium decay, the monthly average one
// year earlier, lagged EUA / oil / smoothed-temperature regressors, and
// TGARCH volatility elevated on the first trading day of each month.
//
//   y_t   = phi0 + Phi_t + psi1 ybar^M_{t-1Y} + zeta1 eua_{t-1} + zeta2 oil_{t-1}
//           + zeta3 T~_{t-1} + eps_t
//   Phi_t = phi1 y2MA_{t-1}                      on the first trading day
//           phi1 y_{t-1} + eta D^LTD_t / D^M_t   otherwise

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gasfc/components.hpp"
#include "gasfc/day_ahead.hpp"
#include "gasfc/estimation.hpp"
#include "gasfc/market_series.hpp"
#include "gasfc/sst.hpp"

namespace gasfc {

struct MonthAheadParams {
  double phi0 = 0.0;
  double phi1 = 1.0;
  double eta = 0.0;
  double psi1 = 0.0;
  std::array<double, 3> zeta{};  // EUA, oil, temperature
  VolatilityParams vol;
  ComponentMask components = ComponentMask::month_ahead();
  bool igarch = false;
};

MonthAheadParams pinned(const MonthAheadParams& p);

void validate(const MonthAheadParams& p);

/// First row with a complete lagged calendar month (at least 13 months of history).
Eigen::Index ma_warmup(const std::vector<Date>& dates);

FilterState ma_filter(const MarketSeries& data, const MonthAheadParams& params);

/// -sum log f(eps_t; 0, sigma_t, nu, tau) over rows >= ma_warmup.
/// Returns +inf when the volatility recursion leaves (0, inf).
double ma_nll(const MarketSeries& data, const MonthAheadParams& params);

Sst ma_forecast_one(const MarketSeries& history, const MonthAheadParams& params, const CalendarFeatures& next);

/// n rows generated forward from the model. `exog` supplies dates, the
/// Two-Month-Ahead price and the enabled regressors.
MarketSeries ma_simulate(const MonthAheadParams& params, const MarketSeries& exog, Eigen::Index n, std::uint64_t seed,
                         const SimulationOptions& options = {}, FilterState* state = nullptr);

std::vector<ParameterInfo> ma_parameter_info(const MonthAheadParams& spec);
Eigen::VectorXd ma_pack(const MonthAheadParams& params);
MonthAheadParams ma_unpack(const MonthAheadParams& spec, const Eigen::VectorXd& free);

MonthAheadParams ma_default_start(const MarketSeries& data, const ComponentMask& mask = ComponentMask::month_ahead(),
                                  bool igarch = false);

struct MonthAheadFit : ModelFit {
  MonthAheadParams params;
};

MonthAheadFit ma_fit(const MarketSeries& data, const MonthAheadParams& start, const OptimizerConfig& config = {});

}  // namespace gasfc
