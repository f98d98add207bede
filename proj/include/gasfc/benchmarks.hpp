#pragma once

// Benchmark forecasters: ARIMA(2,1,2) by conditional sum of squares and a VAR
// on differenced gas and oil prices with AIC order selection. Both give point
// forecasts; the predictive law is a Normal or Student-t fitted to the
// in-sample one-step errors and moved to the point forecast.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "gasfc/distribution.hpp"
#include "gasfc/estimation.hpp"
#include "gasfc/scoring.hpp"

namespace gasfc {

struct ArimaParams {
  std::array<double, 2> ar{};
  std::array<double, 2> ma{};
  double intercept = 0.0;       // constant of the ARMA equation for the differences
  double residual_scale = 1.0;  // sqrt(SSE / n)
};

struct ArimaFit {
  ArimaParams params;
  FitResult result;  // over (intercept, ar1, ar2, ma1, ma2)
  std::vector<ParameterInfo> info;
  Eigen::VectorXd residuals;  // one-step errors of the differenced series
};

/// Conditional-sum-of-squares Gaussian fit of an ARMA(2,2) with intercept to
/// the first differences (presample errors zero). Needs >= 50 prices.
ArimaFit arima_fit(const VectorCRef& prices, const OptimizerConfig& config = {}, const ArimaParams* start = nullptr);

/// One-step errors e_t of the differenced series, t = 2 .. n-2 (difference index).
Eigen::VectorXd arima_residuals(const ArimaParams& p, const VectorCRef& prices);

/// Last price plus the predicted next difference.
double arima_point_forecast(const ArimaParams& p, const VectorCRef& history);

/// Point forecast with the residual family fitted to `residuals` around it.
ForecastDistribution arima_forecast_one(const ArimaParams& p, const VectorCRef& history, const VectorCRef& residuals,
                                        Family residual_family);

struct VarModel {
  int order = 1;
  Eigen::Vector2d intercept = Eigen::Vector2d::Zero();
  std::vector<Eigen::Matrix2d> coefficients;  // lag 1 .. order; rows are equations (gas, oil)
  Eigen::Matrix2d residual_cov = Eigen::Matrix2d::Identity();
  Eigen::VectorXd gas_residuals;  // in-sample one-step errors of the gas equation
  std::vector<double> aic;        // by order 1 .. max_order on the common sample
};

/// Least-squares VAR on (diff gas, diff oil) for orders 1..max_order, order
/// chosen by AIC = 2k - 2 loglik on the sample common to all orders, then
/// refitted on every row the chosen order allows.
VarModel var_fit(const VectorCRef& gas, const VectorCRef& oil, int max_order = 10);

/// Last gas price plus the gas-equation prediction of the next difference.
double var_point_forecast(const VarModel& m, const VectorCRef& gas, const VectorCRef& oil);

ForecastDistribution var_forecast_one(const VarModel& m, const VectorCRef& gas, const VectorCRef& oil,
                                      Family residual_family);

}  // namespace gasfc
