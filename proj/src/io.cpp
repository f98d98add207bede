#include "gasfc/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "gasfc/error.hpp"

namespace gasfc {

using nlohmann::json;

namespace {

const std::array<const char*, 6> kOptionalColumns = {"coal", "eua", "power_peak", "oil", "temperature", "price_2ma"};

std::optional<Eigen::VectorXd>& column(MarketSeries& s, const std::string& name) {
  if (name == "coal") return s.coal;
  if (name == "eua") return s.eua;
  if (name == "power_peak") return s.power_peak;
  if (name == "oil") return s.oil;
  if (name == "temperature") return s.temperature;
  if (name == "price_2ma") return s.price_2ma;
  throw DataError("unknown column '" + name + "'");
}

const std::optional<Eigen::VectorXd>& column(const MarketSeries& s, const std::string& name) {
  return column(const_cast<MarketSeries&>(s), name);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA" || cell == "nan" || cell == "NaN"; }

double parse_number(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DataError(where + ": cannot parse number '" + cell + "'");
  }
  return v;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw DomainError(where + " must be a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw DomainError(where + ": unknown key '" + k + "'");
  }
}

OptimizerConfig optimizer_from_json(const json& j, OptimizerConfig c) {
  reject_unknown(j,
                 {"simplex_evaluations", "polish_iterations", "restarts", "simplex_step", "tolerance", "hessian_step",
                  "hessian_passes", "compute_hessian"},
                 "optimizer");
  c.simplex_evaluations = get_or(j, "simplex_evaluations", c.simplex_evaluations);
  c.polish_iterations = get_or(j, "polish_iterations", c.polish_iterations);
  c.restarts = get_or(j, "restarts", c.restarts);
  c.simplex_step = get_or(j, "simplex_step", c.simplex_step);
  c.tolerance = get_or(j, "tolerance", c.tolerance);
  c.hessian_step = get_or(j, "hessian_step", c.hessian_step);
  c.hessian_passes = get_or(j, "hessian_passes", c.hessian_passes);
  c.compute_hessian = get_or(j, "compute_hessian", c.compute_hessian);
  return c;
}

json to_json(const OptimizerConfig& c) {
  return {{"simplex_evaluations", c.simplex_evaluations}, {"polish_iterations", c.polish_iterations},
          {"restarts", c.restarts},                       {"simplex_step", c.simplex_step},
          {"tolerance", c.tolerance},                     {"hessian_step", c.hessian_step},
          {"hessian_passes", c.hessian_passes},           {"compute_hessian", c.compute_hessian}};
}

ComponentMask mask_from_json(const json& j) {
  ComponentMask m;
  for (const auto& name : j) m = m.with(component_from_string(name.get<std::string>()));
  return m;
}

json mask_to_json(const ComponentMask& m) {
  json out = json::array();
  for (Component c : m.list()) out.push_back(to_string(c));
  return out;
}

// Overrides free parameters by name, keeping the structure of `spec`.
template <typename Params, typename InfoFn, typename PackFn, typename UnpackFn>
Params with_values(const Params& spec, const json& values, InfoFn info_fn, PackFn pack, UnpackFn unpack) {
  const auto info = info_fn(spec);
  Eigen::VectorXd v = pack(pinned(spec));
  for (const auto& [name, value] : values.items()) {
    std::size_t i = 0;
    while (i < info.size() && info[i].name != name) ++i;
    if (i == info.size()) throw DomainError("model params: '" + name + "' is not a free parameter of this model");
    v[static_cast<Eigen::Index>(i)] = value.template get<double>();
  }
  Params out = unpack(spec, v);
  validate(out);
  return out;
}

template <typename Params, typename InfoFn, typename PackFn>
json values_json(const Params& p, InfoFn info_fn, PackFn pack) {
  const auto info = info_fn(p);
  const Eigen::VectorXd v = pack(pinned(p));
  json out = json::object();
  for (std::size_t i = 0; i < info.size(); ++i) out[info[i].name] = v[static_cast<Eigen::Index>(i)];
  return out;
}

json optional_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::array<double, 4> distribution_fields(const ForecastDistribution& f) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return std::visit(
      [nan](const auto& d) -> std::array<double, 4> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Sst>) {
          return {d.mu(), d.sigma(), d.nu(), d.tau()};
        } else if constexpr (std::is_same_v<T, NormalDist>) {
          return {d.mean, d.sd, nan, nan};
        } else {
          return {d.location, d.scale, d.df, nan};
        }
      },
      f);
}

ForecastDistribution distribution_from(Family family, const std::array<double, 4>& p) {
  switch (family) {
    case Family::sst:
      return Sst(p[0], p[1], p[2], p[3]);
    case Family::normal:
      return NormalDist{p[0], p[1]};
    case Family::student_t:
      return StudentTDist{p[0], p[1], p[2]};
  }
  throw DomainError("unknown family");
}

}  // namespace

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "day_ahead") return ModelKind::day_ahead;
  if (name == "month_ahead") return ModelKind::month_ahead;
  if (name == "benchmark") return ModelKind::benchmark;
  throw DomainError("unknown model kind '" + name + "' (expected day_ahead, month_ahead or benchmark)");
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::day_ahead:
      return "day_ahead";
    case ModelKind::month_ahead:
      return "month_ahead";
    case ModelKind::benchmark:
      return "benchmark";
  }
  return "?";
}

std::vector<std::string> required_columns(ModelKind kind, const ComponentMask& m) {
  std::vector<std::string> cols;
  if (kind == ModelKind::day_ahead) {
    if (m.enabled(Component::coal)) cols.push_back("coal");
    if (m.enabled(Component::eua)) cols.push_back("eua");
    if (m.enabled(Component::power)) cols.push_back("power_peak");
  } else if (kind == ModelKind::month_ahead) {
    if (m.enabled(Component::eua)) cols.push_back("eua");
    if (m.enabled(Component::oil)) cols.push_back("oil");
    if (m.enabled(Component::temperature)) cols.push_back("temperature");
    if (m.enabled(Component::rollover)) cols.push_back("price_2ma");
  }
  return cols;
}

MarketSeries read_csv(std::istream& in, ModelKind kind, const ComponentMask& mask, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  std::vector<std::string> header = split(trim(line));
  for (auto& h : header) h = trim(h);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& h = header[i];
    const bool known = h == "date" || h == "price" ||
                       std::find(kOptionalColumns.begin(), kOptionalColumns.end(), h) != kOptionalColumns.end();
    if (!known) throw DataError(source + ": unknown column '" + h + "'");
    if (!index.emplace(h, i).second) throw DataError(source + ": duplicate column '" + h + "'");
  }
  for (const char* need : {"date", "price"}) {
    if (!index.count(need)) throw DataError(source + ": missing column '" + std::string(need) + "'");
  }
  const auto required = required_columns(kind, mask);
  for (const auto& r : required) {
    if (!index.count(r)) throw DataError(source + ": column '" + r + "' is required by the enabled components");
  }

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    rows.push_back(split(line));
    if (rows.back().size() != header.size()) {
      throw DataError(source + ": row " + std::to_string(rows.size()) + " has " + std::to_string(rows.back().size()) +
                      " cells, expected " + std::to_string(header.size()));
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw DataError(source + ": no data rows");

  MarketSeries s;
  s.price.resize(n);
  for (const char* c : kOptionalColumns) {
    if (index.count(c)) column(s, c) = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& cells = rows[static_cast<std::size_t>(r)];
    const std::string where = source + ": row " + std::to_string(r + 1);
    const std::string date = trim(cells[index["date"]]);
    try {
      s.dates.push_back(parse_date(date));
    } catch (const std::exception&) {
      throw DataError(where + ", column date: invalid date '" + date + "'");
    }
    if (r > 0 && s.dates[static_cast<std::size_t>(r)] <= s.dates[static_cast<std::size_t>(r - 1)]) {
      throw DataError(where + ", column date: dates must be strictly increasing ('" + date + "')");
    }
    const std::string price = trim(cells[index["price"]]);
    if (is_missing(price)) throw DataError(where + ", column price: missing value");
    s.price[r] = parse_number(price, where + ", column price");
    for (const char* c : kOptionalColumns) {
      if (!index.count(c)) continue;
      const std::string cell = trim(cells[index[c]]);
      if (is_missing(cell)) {
        if (std::find(required.begin(), required.end(), c) != required.end()) {
          throw DataError(where + ", column " + c + ": missing value in a required column");
        }
        continue;
      }
      (*column(s, c))[r] = parse_number(cell, where + ", column " + c);
    }
  }
  derive_features(s);
  return s;
}

void require_columns(const MarketSeries& data, ModelKind kind, const ComponentMask& mask) {
  for (const auto& name : required_columns(kind, mask)) {
    const auto& col = column(data, name);
    if (!col) throw DataError("column '" + name + "' is required by the enabled components");
    for (Eigen::Index r = 0; r < col->size(); ++r) {
      if (std::isnan((*col)[r])) {
        throw DataError("row " + std::to_string(r + 1) + ", column " + name + ": missing value in a required column");
      }
    }
  }
}

MarketSeries load_csv(const std::filesystem::path& path, ModelKind kind, const ComponentMask& mask) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_csv(in, kind, mask, path.string());
}

MarketSeries load_csv(const std::filesystem::path& path, ModelKind kind) {
  const ComponentMask mask = kind == ModelKind::day_ahead     ? ComponentMask::day_ahead()
                             : kind == ModelKind::month_ahead ? ComponentMask::month_ahead()
                                                              : ComponentMask();
  return load_csv(path, kind, mask);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw NumericalError("format_number: conversion failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const MarketSeries& data) {
  std::vector<const char*> present;
  for (const char* c : kOptionalColumns) {
    if (column(data, c)) present.push_back(c);
  }
  out << "date,price";
  for (const char* c : present) out << ',' << c;
  out << '\n';
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    out << format_date(data.dates[static_cast<std::size_t>(r)]) << ',' << format_number(data.price[r]);
    for (const char* c : present) out << ',' << format_number((*column(data, c))[r]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const MarketSeries& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(out, data);
}

std::string config_hash(const json& j) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return hex64(h);
}

json to_json(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DayAheadSpec>) {
          return {{"kind", "day_ahead"},
                  {"id", s.id},
                  {"components", mask_to_json(s.params.components)},
                  {"ar_order", s.params.phi.size()},
                  {"ma_order", s.params.theta.size()},
                  {"igarch", s.params.igarch},
                  {"estimate", s.estimate},
                  {"start", s.use_as_start ? "params" : "default"},
                  {"params", values_json(s.params, da_parameter_info, da_pack)}};
        } else if constexpr (std::is_same_v<T, MonthAheadSpec>) {
          return {{"kind", "month_ahead"},
                  {"id", s.id},
                  {"components", mask_to_json(s.params.components)},
                  {"igarch", s.params.igarch},
                  {"estimate", s.estimate},
                  {"start", s.use_as_start ? "params" : "default"},
                  {"params", values_json(s.params, ma_parameter_info, ma_pack)}};
        } else if constexpr (std::is_same_v<T, ArimaSpec>) {
          return {{"kind", "arima"}, {"id", s.id}, {"family", to_string(s.family)}};
        } else {
          return {{"kind", "var"}, {"id", s.id}, {"family", to_string(s.family)}, {"max_order", s.max_order}};
        }
      },
      spec);
}

ModelSpec model_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw DomainError("model entry needs a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  const bool has_params = j.contains("params");
  const std::string start = get_or<std::string>(j, "start", has_params ? "params" : "default");
  if (start != "params" && start != "default") throw DomainError("model start must be 'params' or 'default'");
  if (kind == "day_ahead") {
    reject_unknown(j, {"kind", "id", "components", "ar_order", "ma_order", "igarch", "estimate", "start", "params"},
                   "day_ahead model");
    DayAheadSpec s;
    s.id = get_or<std::string>(j, "id", "day_ahead");
    if (j.contains("components")) s.params.components = mask_from_json(j.at("components"));
    const int p = get_or(j, "ar_order", 1);
    const int q = get_or(j, "ma_order", 1);
    if (p < 0 || q < 0) throw DomainError("ARMA orders must be non-negative");
    s.params.phi.assign(static_cast<std::size_t>(p), 0.0);
    s.params.theta.assign(static_cast<std::size_t>(q), 0.0);
    s.params.igarch = get_or(j, "igarch", false);
    if (s.params.igarch) s.params.vol.beta = 1.0 - s.params.vol.alpha;
    s.estimate = get_or(j, "estimate", true);
    s.use_as_start = start == "params";
    s.params = with_values(s.params, has_params ? j.at("params") : json::object(), da_parameter_info, da_pack,
                           da_unpack);
    return s;
  }
  if (kind == "month_ahead") {
    reject_unknown(j, {"kind", "id", "components", "igarch", "estimate", "start", "params"}, "month_ahead model");
    MonthAheadSpec s;
    s.id = get_or<std::string>(j, "id", "month_ahead");
    if (j.contains("components")) s.params.components = mask_from_json(j.at("components"));
    s.params.igarch = get_or(j, "igarch", false);
    if (s.params.igarch) s.params.vol.beta = 1.0 - s.params.vol.alpha;
    s.estimate = get_or(j, "estimate", true);
    s.use_as_start = start == "params";
    s.params = with_values(s.params, has_params ? j.at("params") : json::object(), ma_parameter_info, ma_pack,
                           ma_unpack);
    return s;
  }
  if (kind == "arima") {
    reject_unknown(j, {"kind", "id", "family"}, "arima model");
    ArimaSpec s;
    s.id = get_or<std::string>(j, "id", "arima");
    s.family = family_from_string(get_or<std::string>(j, "family", "normal"));
    if (s.family == Family::sst) throw DomainError("arima family must be normal or student_t");
    return s;
  }
  if (kind == "var") {
    reject_unknown(j, {"kind", "id", "family", "max_order"}, "var model");
    VarSpec s;
    s.id = get_or<std::string>(j, "id", "var");
    s.family = family_from_string(get_or<std::string>(j, "family", "normal"));
    if (s.family == Family::sst) throw DomainError("var family must be normal or student_t");
    s.max_order = get_or(j, "max_order", 10);
    return s;
  }
  throw DomainError("unknown model kind '" + kind + "'");
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  try {
    reject_unknown(j,
                   {"init_window", "refit_every", "hessian_every", "seed", "grid", "models", "optimizer",
                    "warm_optimizer", "variants", "permutations", "independence_rows"},
                   "config");
    auto& s = c.study;
    s.init_window = get_or<Eigen::Index>(j, "init_window", s.init_window);
    s.refit_every = get_or<Eigen::Index>(j, "refit_every", s.refit_every);
    s.hessian_every = get_or<Eigen::Index>(j, "hessian_every", s.hessian_every);
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
    if (j.contains("grid")) {
      const auto g = j.at("grid").get<std::vector<double>>();
      s.grid = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
    }
    if (j.contains("optimizer")) s.initial_fit = optimizer_from_json(j.at("optimizer"), s.initial_fit);
    if (j.contains("warm_optimizer")) s.warm_fit = optimizer_from_json(j.at("warm_optimizer"), s.warm_fit);
    if (j.contains("models")) {
      for (const auto& m : j.at("models")) s.models.push_back(model_spec_from_json(m));
    } else {
      s.models = {DayAheadSpec{}, ArimaSpec{}};
    }
    c.variants = get_or(j, "variants", c.variants);
    c.permutations = get_or(j, "permutations", c.permutations);
    c.independence_rows = get_or<Eigen::Index>(j, "independence_rows", c.independence_rows);
    if (c.independence_rows < 10) throw DomainError("config: independence_rows must be at least 10");
    validate(s);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }

  json models = json::array();
  for (const auto& m : c.study.models) models.push_back(to_json(m));
  json norm = {{"init_window", c.study.init_window},
               {"refit_every", c.study.refit_every},
               {"hessian_every", c.study.hessian_every},
               {"seed", c.study.seed},
               {"models", models},
               {"optimizer", to_json(c.study.initial_fit)},
               {"warm_optimizer", to_json(c.study.warm_fit)},
               {"variants", c.variants},
               {"permutations", c.permutations},
               {"independence_rows", c.independence_rows}};
  if (j.contains("grid")) norm["grid"] = j.at("grid");
  c.source = std::move(norm);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DomainError("config '" + path.string() + "': " + e.what());
  }
  return parse_config(j);
}

RunConfig default_config() { return parse_config(json::object()); }

json report_header(const RunConfig& config) {
  return {{"config_hash", config_hash(config.source)}, {"seed", config.study.seed}};
}

json parameter_table_json(const std::vector<ParameterTest>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json e = {{"name", r.name},
              {"estimate", optional_number(r.estimate)},
              {"null", r.null_value},
              {"alternative", to_string(r.alternative)},
              {"std_error", nullptr},
              {"statistic", nullptr},
              {"p_value", nullptr}};
    if (r.test) {
      e["std_error"] = optional_number(r.test->std_error);
      e["statistic"] = optional_number(r.test->statistic);
      e["p_value"] = optional_number(r.test->p_value);
    }
    out.push_back(std::move(e));
  }
  return out;
}

json fit_report(const RunConfig& config, const ModelSpec& spec, const ModelFit& fit) {
  json out = report_header(config);
  out["model"] = model_id(spec);
  out["spec"] = to_json(spec);
  out["nll"] = optional_number(fit.result.nll);
  out["converged"] = fit.result.converged;
  out["iterations"] = fit.result.iterations;
  out["evaluations"] = fit.result.evaluations;
  out["parameters"] = parameter_table_json(parameter_tests(fit.info, fit.result.params, fit.result.vcov));
  try {
    const ZTestResult z = persistence_test(fit);
    out["persistence"] = {{"estimate", z.estimate},
                          {"null", z.null_value},
                          {"std_error", optional_number(z.std_error)},
                          {"statistic", optional_number(z.statistic)},
                          {"p_value", optional_number(z.p_value)}};
  } catch (const std::exception&) {
    // alpha and beta not both free, or no standard error: no persistence row
  }
  return out;
}

json score_report(const RunConfig& config, const BacktestResult& result, const std::vector<VariantRow>& variants) {
  json out = report_header(config);
  out["init_window"] = result.init_window;
  out["steps"] = result.steps();
  if (result.steps() > 0) {
    out["first_date"] = format_date(result.dates.front());
    out["last_date"] = format_date(result.dates.back());
  }
  json models = json::array();
  const auto table = score_table(result);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const ModelTrack& t = result.models[i];
    models.push_back({{"model", table[i].model},
                      {"mae", table[i].mae},
                      {"rmse", table[i].rmse},
                      {"crps", table[i].crps},
                      {"refits", t.refits},
                      {"hessians", t.hessians},
                      {"non_converged", t.non_converged},
                      {"warnings", t.warnings},
                      {"parameters", parameter_table_json(averaged_parameter_tests(t))}});
  }
  out["models"] = std::move(models);
  if (!variants.empty()) {
    json rows = json::array();
    for (const auto& v : variants) {
      rows.push_back({{"variant", v.variant},
                      {"mae", v.mae},
                      {"rmse", v.rmse},
                      {"crps", v.crps},
                      {"crps_change_pct", v.crps_change_pct}});
    }
    out["variants"] = std::move(rows);
  }
  return out;
}

json dm_report(const RunConfig& config, const DmMatrix& m, const std::string& loss) {
  json out = report_header(config);
  out["loss"] = loss;
  out["models"] = m.models;
  json stat = json::array();
  json p = json::array();
  json errors = json::array();
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    json srow = json::array();
    json prow = json::array();
    for (std::size_t j = 0; j < m.cells[i].size(); ++j) {
      const DmCell& c = m.cells[i][j];
      srow.push_back(c.result ? optional_number(c.result->statistic) : json(nullptr));
      prow.push_back(c.result ? optional_number(c.result->p_value) : json(nullptr));
      if (!c.result && i != j) errors.push_back({{"row", m.models[i]}, {"column", m.models[j]}, {"error", c.error}});
    }
    stat.push_back(std::move(srow));
    p.push_back(std::move(prow));
  }
  out["statistic"] = std::move(stat);
  out["p_value"] = std::move(p);
  out["errors"] = std::move(errors);
  return out;
}

json independence_report(const RunConfig& config, const std::vector<std::string>& covariates,
                         const std::vector<EnergyIndependenceResult>& results, Eigen::Index rows) {
  json out = report_header(config);
  out["rows"] = rows;
  json table = json::array();
  for (std::size_t i = 0; i < covariates.size(); ++i) {
    table.push_back({{"covariate", covariates[i]},
                     {"dcor", results[i].dcor},
                     {"statistic", results[i].statistic},
                     {"p_value", results[i].p_value},
                     {"permutations", results[i].permutations}});
  }
  out["tests"] = std::move(table);
  return out;
}

void write_steps_csv(std::ostream& out, const BacktestResult& result) {
  out << "date,model,realization,family,p1,p2,p3,p4,mean,median,abs_loss,sq_loss,crps,pit\n";
  for (const auto& t : result.models) {
    for (Eigen::Index k = 0; k < result.steps(); ++k) {
      const auto& f = t.forecasts[static_cast<std::size_t>(k)];
      out << format_date(result.dates[static_cast<std::size_t>(k)]) << ',' << t.id << ','
          << format_number(t.realizations[k]) << ',' << to_string(family_of(f));
      for (double v : distribution_fields(f)) out << ',' << format_number(v);
      out << ',' << format_number(mean(f)) << ',' << format_number(median(f)) << ',' << format_number(t.abs_loss[k])
          << ',' << format_number(t.sq_loss[k]) << ',' << format_number(t.crps[k]) << ',' << format_number(t.pit[k])
          << '\n';
    }
  }
}

StepTable read_steps_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  const std::vector<std::string> expected = {"date", "model", "realization", "family", "p1",       "p2",      "p3",
                                             "p4",   "mean",  "median",      "abs_loss", "sq_loss", "crps", "pit"};
  if (split(trim(line)) != expected) throw DataError(source + ": unexpected header");
  StepTable t;
  std::map<std::string, std::size_t> pos;
  std::vector<std::vector<double>> y, abs, sq, cr;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    ++row;
    const auto cells = split(line);
    const std::string where = source + ": row " + std::to_string(row);
    if (cells.size() != expected.size()) throw DataError(where + ": wrong number of cells");
    auto [it, added] = pos.emplace(cells[1], t.models.size());
    if (added) {
      t.models.push_back(cells[1]);
      t.forecasts.emplace_back();
      y.emplace_back();
      abs.emplace_back();
      sq.emplace_back();
      cr.emplace_back();
    }
    const std::size_t m = it->second;
    std::array<double, 4> p{};
    for (int i = 0; i < 4; ++i) {
      const auto& c = cells[4 + static_cast<std::size_t>(i)];
      p[static_cast<std::size_t>(i)] = is_missing(c) ? std::numeric_limits<double>::quiet_NaN() : parse_number(c, where);
    }
    t.forecasts[m].push_back(distribution_from(family_from_string(cells[3]), p));
    y[m].push_back(parse_number(cells[2], where));
    abs[m].push_back(parse_number(cells[10], where));
    sq[m].push_back(parse_number(cells[11], where));
    cr[m].push_back(parse_number(cells[12], where));
  }
  if (t.models.empty()) throw DataError(source + ": no rows");
  auto vec = [](const std::vector<double>& v) {
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  for (std::size_t m = 0; m < t.models.size(); ++m) {
    if (y[m].size() != y[0].size()) throw DataError(source + ": models have different numbers of steps");
    t.realizations.push_back(vec(y[m]));
    t.abs_loss.push_back(vec(abs[m]));
    t.sq_loss.push_back(vec(sq[m]));
    t.crps.push_back(vec(cr[m]));
  }
  return t;
}

void write_pinball_csv(std::ostream& out, const StepTable& steps, const Eigen::VectorXd& grid) {
  std::vector<PinballCurve> curves;
  for (std::size_t m = 0; m < steps.models.size(); ++m) {
    curves.push_back(pinball_curve(steps.forecasts[m], steps.realizations[m], grid));
  }
  out << "probability";
  for (const auto& id : steps.models) out << ',' << id;
  out << '\n';
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out << format_number(grid[i]);
    for (const auto& c : curves) out << ',' << format_number(c.losses[i]);
    out << '\n';
  }
}

void write_pit_csv(std::ostream& out, const std::vector<std::string>& models, const std::vector<Eigen::VectorXi>& counts) {
  out << "bin_lower,bin_upper";
  for (const auto& id : models) out << ',' << id;
  out << '\n';
  const Eigen::Index bins = counts.empty() ? 20 : counts.front().size();
  for (Eigen::Index b = 0; b < bins; ++b) {
    out << format_number(static_cast<double>(b) / static_cast<double>(bins)) << ','
        << format_number(static_cast<double>(b + 1) / static_cast<double>(bins));
    for (const auto& c : counts) out << ',' << c[b];
    out << '\n';
  }
}

void write_dm_csv(std::ostream& out, const DmMatrix& m) {
  out << "model";
  for (const auto& id : m.models) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    out << m.models[i];
    for (const auto& c : m.cells[i]) out << ',' << (c.result ? format_number(c.result->statistic) : "");
    out << '\n';
  }
}

}  // namespace gasfc
