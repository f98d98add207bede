#pragma once

// Day-Ahead model: exponential-smoothing level with ARMA errors, a weekly
// seasonal average lagged by one year, lagged coal / EUA / peak-power
// regressors, and TGARCH volatility elevated on Mondays.
//
//   y_t  = l_{t-1} + psi1/5 * sum_{s=t-A-2}^{t-A+2} y_s
//          + zeta1 coal_{t-1} + zeta2 eua_{t-1} + zeta3 power_{t-1} + d_t
//   l_t  = l_{t-1} + lambda d_t
//   d_t  = sum phi_i d_{t-i} + sum theta_i eps_{t-i} + eps_t
//   eps_t ~ SST(0, sigma_t, nu, tau),  sigma_t = delta sigma~_t on Mondays

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gasfc/components.hpp"
#include "gasfc/estimation.hpp"
#include "gasfc/market_series.hpp"
#include "gasfc/sst.hpp"

namespace gasfc {

struct DayAheadParams {
  double lambda = 1.0;
  double psi1 = 0.0;
  std::array<double, 3> zeta{};  // coal, EUA, peak power
  std::vector<double> phi{0.0};
  std::vector<double> theta{0.0};
  VolatilityParams vol;
  ComponentMask components = ComponentMask::day_ahead();
  bool igarch = false;
};

/// First row whose likelihood contribution is evaluated (the seasonal window
/// of row t reaches back to t - A - 2).
inline constexpr Eigen::Index kDayAheadWarmup = kSeasonalLag + 2;

/// Copy with disabled components set to their neutral values.
DayAheadParams pinned(const DayAheadParams& p);

void validate(const DayAheadParams& p);

FilterState da_filter(const MarketSeries& data, const DayAheadParams& params);

/// -sum log f(eps_t; 0, sigma_t, nu, tau) over rows >= kDayAheadWarmup.
/// Returns +inf when the volatility recursion leaves (0, inf).
double da_nll(const MarketSeries& data, const DayAheadParams& params);

/// Predictive law of the row following `history`.
Sst da_forecast_one(const MarketSeries& history, const DayAheadParams& params, const CalendarFeatures& next);

/// n rows generated forward from the model. `exog` supplies dates and the
/// enabled regressors; its price column is ignored. When `state` is given it
/// receives the internal recursions.
MarketSeries da_simulate(const DayAheadParams& params, const MarketSeries& exog, Eigen::Index n, std::uint64_t seed,
                         const SimulationOptions& options = {}, FilterState* state = nullptr);

/// Free parameters implied by the mask, ARMA orders and IGARCH flag, in the
/// order used by da_pack / da_unpack.
std::vector<ParameterInfo> da_parameter_info(const DayAheadParams& spec);
Eigen::VectorXd da_pack(const DayAheadParams& params);
DayAheadParams da_unpack(const DayAheadParams& spec, const Eigen::VectorXd& free);

/// Neutral starting point; omega is 0.1 times the variance of the price differences.
DayAheadParams da_default_start(const MarketSeries& data, const ComponentMask& mask = ComponentMask::day_ahead(),
                                int ar_order = 1, int ma_order = 1, bool igarch = false);

struct ModelFit {
  FitResult result;
  std::vector<ParameterInfo> info;
};

struct DayAheadFit : ModelFit {
  DayAheadParams params;
};

DayAheadFit da_fit(const MarketSeries& data, const DayAheadParams& start, const OptimizerConfig& config = {});

/// z-test of alpha + beta = 1 from a fit in which both are free.
ZTestResult persistence_test(const ModelFit& fit);

}  // namespace gasfc
