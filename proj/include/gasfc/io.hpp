#pragma once

// CSV market data, JSON study configuration and report emission.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "gasfc/backtest.hpp"
#include "gasfc/components.hpp"
#include "gasfc/market_series.hpp"
#include "gasfc/stat_tests.hpp"

namespace gasfc {

enum class ModelKind { day_ahead, month_ahead, benchmark };

ModelKind model_kind_from_string(const std::string& name);
std::string to_string(ModelKind k);

/// Columns that must be present and non-missing on every row.
std::vector<std::string> required_columns(ModelKind kind, const ComponentMask& mask);

/// Header row with `date` and `price`, optional coal, eua, power_peak, oil,
/// temperature, price_2ma. Empty or NA cells are missing. `source` prefixes
/// diagnostics.
MarketSeries read_csv(std::istream& in, ModelKind kind, const ComponentMask& mask, const std::string& source = "csv");
MarketSeries load_csv(const std::filesystem::path& path, ModelKind kind, const ComponentMask& mask);
/// Requirements of the proposed specification of `kind`.
MarketSeries load_csv(const std::filesystem::path& path, ModelKind kind);

/// DataError unless every column required by (kind, mask) is present and
/// non-missing on every row.
void require_columns(const MarketSeries& data, ModelKind kind, const ComponentMask& mask);

/// Writes date, price and every present optional column.
void write_csv(std::ostream& out, const MarketSeries& data);
void write_csv(const std::filesystem::path& path, const MarketSeries& data);

/// Shortest decimal text that parses back to the same double; empty for NaN.
std::string format_number(double x);

/// Parsed run configuration. Unknown keys are rejected.
struct RunConfig {
  StudyConfig study;
  std::vector<std::string> variants;  // deltas swept against the first day_ahead/month_ahead model
  std::size_t permutations = 999;     // energy independence test
  Eigen::Index independence_rows = 1000;  // most recent residuals used by the independence test
  nlohmann::json source;              // normalized JSON the hash is computed from
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Proposed Day-Ahead model plus Gaussian ARIMA with default study settings.
RunConfig default_config();

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

/// JSON for one model spec in the configuration schema.
nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

/// Report stamp: {"config_hash": ..., "seed": ...}.
nlohmann::json report_header(const RunConfig& config);

nlohmann::json parameter_table_json(const std::vector<ParameterTest>& rows);
nlohmann::json fit_report(const RunConfig& config, const ModelSpec& spec, const ModelFit& fit);
nlohmann::json score_report(const RunConfig& config, const BacktestResult& result,
                            const std::vector<VariantRow>& variants = {});
nlohmann::json dm_report(const RunConfig& config, const DmMatrix& m, const std::string& loss);
nlohmann::json independence_report(const RunConfig& config, const std::vector<std::string>& covariates,
                                   const std::vector<EnergyIndependenceResult>& results, Eigen::Index rows);

/// Per-step table: date, model, realization, family, p1..p4 (distribution
/// parameters), mean, median, abs_loss, sq_loss, crps, pit.
void write_steps_csv(std::ostream& out, const BacktestResult& result);

struct StepTable {
  std::vector<std::string> models;  // in order of first appearance
  std::vector<std::vector<ForecastDistribution>> forecasts;
  std::vector<Eigen::VectorXd> realizations;
  std::vector<Eigen::VectorXd> abs_loss, sq_loss, crps;
};

StepTable read_steps_csv(std::istream& in, const std::string& source = "steps");

/// 99 rows: probability followed by the mean pinball loss of each model.
void write_pinball_csv(std::ostream& out, const StepTable& steps, const Eigen::VectorXd& grid);
/// 20 rows: bin bounds followed by each model's PIT count.
void write_pit_csv(std::ostream& out, const std::vector<std::string>& models, const std::vector<Eigen::VectorXi>& counts);
void write_dm_csv(std::ostream& out, const DmMatrix& m);

}  // namespace gasfc
