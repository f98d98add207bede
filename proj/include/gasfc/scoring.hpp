#pragma once

#include <span>

#include <Eigen/Core>

#include "gasfc/distribution.hpp"

namespace gasfc {

using VectorCRef = Eigen::Ref<const Eigen::VectorXd>;

/// Mean absolute error of median forecasts.
double mae(const VectorCRef& observations, const VectorCRef& medians);

/// Root mean squared error of mean forecasts.
double rmse(const VectorCRef& observations, const VectorCRef& means);

/// Pinball (quantile) loss of a p-quantile prediction.
double pinball(double quantile_pred, double observation, double p);

/// Probability grid 0.01, 0.02, ..., 0.99.
Eigen::VectorXd default_probability_grid();

struct PinballCurve {
  Eigen::VectorXd probabilities;
  Eigen::VectorXd losses;  // time-averaged pinball loss per probability
};

PinballCurve pinball_curve(std::span<const ForecastDistribution> forecasts, const VectorCRef& observations,
                           const VectorCRef& grid);

/// Pinball losses of one forecast over a grid, one entry per probability.
Eigen::VectorXd pinball_row(const ForecastDistribution& forecast, double observation, const VectorCRef& grid);

/// Continuous ranked probability score. Closed form for Normal and Student-t,
/// adaptive quadrature split at the observation for the skewed Student-t.
double crps(const ForecastDistribution& forecast, double observation);

/// Twice the trapezoidal integral of the pinball loss over (0, 1), sampled at
/// the `resolution` interior points k / (resolution + 1).
double crps_from_pinball(const ForecastDistribution& forecast, double observation, int resolution);

}  // namespace gasfc
