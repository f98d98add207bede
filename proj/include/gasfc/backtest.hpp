#pragma once

// Expanding-window one-step-ahead forecasting studies.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "gasfc/day_ahead.hpp"
#include "gasfc/distribution.hpp"
#include "gasfc/estimation.hpp"
#include "gasfc/market_series.hpp"
#include "gasfc/month_ahead.hpp"

namespace gasfc {

/// With estimate = false the parameters are used as given at every step.
/// Otherwise the first fit starts from the default start for the same
/// structure (or from `params` when use_as_start is set).
struct DayAheadSpec {
  std::string id = "day_ahead";
  DayAheadParams params;
  bool estimate = true;
  bool use_as_start = false;
};

struct MonthAheadSpec {
  std::string id = "month_ahead";
  MonthAheadParams params;
  bool estimate = true;
  bool use_as_start = false;
};

struct ArimaSpec {
  std::string id = "arima";
  Family family = Family::normal;
};

struct VarSpec {
  std::string id = "var";
  Family family = Family::normal;
  int max_order = 10;
};

using ModelSpec = std::variant<DayAheadSpec, MonthAheadSpec, ArimaSpec, VarSpec>;

const std::string& model_id(const ModelSpec& spec);

/// Budget for warm-started refits: small simplex, no restarts.
OptimizerConfig warm_start_config();

struct StudyConfig {
  Eigen::Index init_window = 1012;
  Eigen::Index refit_every = 1;
  Eigen::Index hessian_every = 20;  // Hessian at every n-th refit; 1 = every refit, 0 = never
  std::vector<ModelSpec> models;
  Eigen::VectorXd grid = default_probability_grid();
  std::uint64_t seed = 0;
  OptimizerConfig initial_fit;
  OptimizerConfig warm_fit = warm_start_config();
};

/// Throws DomainError unless init_window >= 300, refit_every >= 1,
/// hessian_every >= 0, model ids are unique and the grid lies in (0, 1).
void validate(const StudyConfig& config);

struct ModelTrack {
  std::string id;
  std::vector<ForecastDistribution> forecasts;
  Eigen::VectorXd realizations;
  Eigen::VectorXd abs_loss;  // |y - median|
  Eigen::VectorXd sq_loss;   // (y - mean)^2
  Eigen::VectorXd crps;
  Eigen::MatrixXd pinball;   // one row per step, one column per grid probability
  Eigen::VectorXd pit;       // F_t(y_t)

  std::vector<ParameterInfo> info;
  Eigen::MatrixXd parameters;  // free parameters in use at each step (empty for VAR)
  HessianAverage hessian;      // over the refits at which a Hessian was evaluated
  int refits = 0;
  int hessians = 0;
  int non_converged = 0;
  std::vector<std::string> warnings;
};

struct BacktestResult {
  Eigen::Index init_window = 0;
  std::vector<Date> dates;  // validation rows
  Eigen::VectorXd grid;
  std::vector<ModelTrack> models;

  Eigen::Index steps() const { return static_cast<Eigen::Index>(dates.size()); }
  /// Throws DomainError for an unknown id.
  const ModelTrack& track(const std::string& id) const;
};

/// Raised when a model cannot produce a forecast; carries the step and model.
class StudyError : public std::runtime_error {
 public:
  StudyError(const std::string& model, Eigen::Index step, const std::string& what);
  std::string model;
  Eigen::Index step;
};

/// For each row r in [init_window, n): (re)fit on rows [0, r) and forecast
/// row r. A refit that throws or returns a non-finite likelihood keeps the
/// previous parameters and records a warning.
BacktestResult run_study(const MarketSeries& data, const StudyConfig& config);

struct ScoreRow {
  std::string model;
  double mae = 0.0;
  double rmse = 0.0;
  double crps = 0.0;
};

std::vector<ScoreRow> score_table(const BacktestResult& result);

struct VariantRow {
  std::string variant;
  double mae = 0.0;
  double rmse = 0.0;
  double crps = 0.0;
  double crps_change_pct = 0.0;  // 100 (crps - crps_base) / crps_base
};

/// One study per variant of a Day-Ahead or Month-Ahead spec. A delta is
/// "-name" (remove), "+name" (add) or "name" (toggle); the component must
/// belong to the model family. The first row is the base model.
std::vector<VariantRow> variant_sweep(const ModelSpec& base, const std::vector<std::string>& deltas,
                                      const MarketSeries& data, const StudyConfig& config);

struct PitSummary {
  Eigen::VectorXd values;
  Eigen::VectorXi histogram;  // 20 equal bins on [0, 1]
};

PitSummary pit_values(const ModelTrack& track);
PitSummary pit_values(const BacktestResult& result, const std::string& model);

/// Counts of u in 20 equal bins; u = 1 falls into the last bin.
Eigen::VectorXi pit_histogram(const VectorCRef& u, int bins = 20);

/// Parameter tests of the final parameters of a track with standard errors
/// from its averaged Hessian.
std::vector<ParameterTest> averaged_parameter_tests(const ModelTrack& track);

}  // namespace gasfc
