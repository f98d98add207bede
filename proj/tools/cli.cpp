#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gasfc/backtest.hpp"
#include "gasfc/benchmarks.hpp"
#include "gasfc/error.hpp"
#include "gasfc/io.hpp"
#include "gasfc/stat_tests.hpp"
#include "gasfc/synthetic.hpp"

namespace gasfc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

RunConfig load_run_config(const Globals& g) {
  RunConfig c;
  try {
    c = g.config.empty() ? default_config() : load_config(g.config);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (g.seed) {
    c.study.seed = *g.seed;
    c.source["seed"] = *g.seed;
  }
  return c;
}

fs::path output(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  out << j.dump(2) << '\n';
  std::cout << p.string() << '\n';
}

template <typename Fn>
void write_text(const fs::path& p, Fn&& fn) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  fn(out);
  std::cout << p.string() << '\n';
}

ModelKind kind_of(const ModelSpec& s) {
  if (std::holds_alternative<DayAheadSpec>(s)) return ModelKind::day_ahead;
  if (std::holds_alternative<MonthAheadSpec>(s)) return ModelKind::month_ahead;
  return ModelKind::benchmark;
}

ComponentMask mask_of(const ModelSpec& s) {
  if (const auto* d = std::get_if<DayAheadSpec>(&s)) return d->params.components;
  if (const auto* m = std::get_if<MonthAheadSpec>(&s)) return m->params.components;
  return {};
}

const ModelSpec& pick_model(const RunConfig& c, const std::string& id) {
  for (const auto& m : c.study.models) {
    if (id.empty() ? kind_of(m) != ModelKind::benchmark : model_id(m) == id) return m;
  }
  if (id.empty()) throw UsageError("the configuration has no day_ahead or month_ahead model");
  throw UsageError("no model with id '" + id + "' in the configuration");
}

MarketSeries load_for(const std::string& path, const std::vector<ModelSpec>& models) {
  MarketSeries data = load_csv(path, ModelKind::benchmark, ComponentMask());
  for (const auto& m : models) {
    require_columns(data, kind_of(m), mask_of(m));
    if (std::holds_alternative<VarSpec>(m) && !data.oil) throw DataError("var model '" + model_id(m) + "' needs an oil column");
  }
  return data;
}

StepTable load_steps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_steps_csv(in, path);
}

void cmd_fit(const Globals& g, const std::string& data_path, const std::string& id) {
  const RunConfig c = load_run_config(g);
  const ModelSpec& spec = pick_model(c, id);
  const MarketSeries data = load_for(data_path, {spec});
  const OptimizerConfig& oc = c.study.initial_fit;
  json report;
  if (const auto* d = std::get_if<DayAheadSpec>(&spec)) {
    const auto& p = d->params;
    const DayAheadParams start = d->use_as_start ? p
                                                 : da_default_start(data, p.components, static_cast<int>(p.phi.size()),
                                                                    static_cast<int>(p.theta.size()), p.igarch);
    report = fit_report(c, spec, da_fit(data, start, oc));
  } else if (const auto* m = std::get_if<MonthAheadSpec>(&spec)) {
    const MonthAheadParams start =
        m->use_as_start ? m->params : ma_default_start(data, m->params.components, m->params.igarch);
    report = fit_report(c, spec, ma_fit(data, start, oc));
  } else if (std::holds_alternative<ArimaSpec>(spec)) {
    const ArimaFit a = arima_fit(data.price, oc);
    report = fit_report(c, spec, ModelFit{a.result, a.info});
  } else {
    const auto& v = std::get<VarSpec>(spec);
    const VarModel vm = var_fit(data.price, *data.oil, v.max_order);
    report = report_header(c);
    report["model"] = v.id;
    report["spec"] = to_json(spec);
    report["order"] = vm.order;
    report["aic"] = vm.aic;
    json coef = json::array();
    for (const auto& a : vm.coefficients) {
      coef.push_back({{a(0, 0), a(0, 1)}, {a(1, 0), a(1, 1)}});
    }
    report["intercept"] = {vm.intercept[0], vm.intercept[1]};
    report["coefficients"] = coef;
    report["residual_cov"] = {{vm.residual_cov(0, 0), vm.residual_cov(0, 1)},
                              {vm.residual_cov(1, 0), vm.residual_cov(1, 1)}};
  }
  write_json(output(g, "fit.json"), report);
}

void cmd_backtest(const Globals& g, const std::string& data_path) {
  const RunConfig c = load_run_config(g);
  const MarketSeries data = load_for(data_path, c.study.models);
  const BacktestResult r = run_study(data, c.study);
  std::vector<VariantRow> variants;
  if (!c.variants.empty()) {
    variants = variant_sweep(pick_model(c, ""), c.variants, data, c.study);
  }
  for (const auto& t : r.models) {
    for (const auto& w : t.warnings) std::cerr << "warning: " << t.id << ": " << w << '\n';
  }
  write_json(output(g, "scores.json"), score_report(c, r, variants));
  write_text(output(g, "steps.csv"), [&](std::ostream& o) { write_steps_csv(o, r); });
}

std::string steps_or_default(const Globals& g, const std::string& steps) {
  return steps.empty() ? (fs::path(g.out_dir) / "steps.csv").string() : steps;
}

void cmd_dm(const Globals& g, const std::string& steps_path, const std::string& loss) {
  const RunConfig c = load_run_config(g);
  const StepTable t = load_steps(steps_or_default(g, steps_path));
  const auto& losses = loss == "crps" ? t.crps : loss == "abs" ? t.abs_loss : t.sq_loss;
  const DmMatrix m = dm_matrix(t.models, losses);
  write_json(output(g, "dm_matrix.json"), dm_report(c, m, loss));
  write_text(output(g, "dm_matrix.csv"), [&](std::ostream& o) { write_dm_csv(o, m); });
}

void cmd_pinball(const Globals& g, const std::string& steps_path) {
  const RunConfig c = load_run_config(g);
  const StepTable t = load_steps(steps_or_default(g, steps_path));
  write_text(output(g, "pinball.csv"), [&](std::ostream& o) { write_pinball_csv(o, t, c.study.grid); });
}

void cmd_pit(const Globals& g, const std::string& steps_path) {
  const RunConfig c = load_run_config(g);
  const StepTable t = load_steps(steps_or_default(g, steps_path));
  std::vector<Eigen::VectorXi> counts;
  json report = report_header(c);
  json models = json::array();
  for (std::size_t m = 0; m < t.models.size(); ++m) {
    Eigen::VectorXd u(t.realizations[m].size());
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      u[k] = std::clamp(cdf(t.forecasts[m][static_cast<std::size_t>(k)], t.realizations[m][k]), 0.0, 1.0);
    }
    counts.push_back(pit_histogram(u));
    const UniformityTest chi = chi_square_uniformity(counts.back());
    models.push_back({{"model", t.models[m]},
                      {"counts", std::vector<int>(counts.back().data(), counts.back().data() + counts.back().size())},
                      {"chi_square", chi.statistic},
                      {"p_value", chi.p_value}});
  }
  report["models"] = models;
  write_text(output(g, "pit.csv"), [&](std::ostream& o) { write_pit_csv(o, t.models, counts); });
  write_json(output(g, "pit.json"), report);
}

void cmd_simulate(const Globals& g, const std::string& kind, Eigen::Index rows, const std::string& out_name) {
  const RunConfig c = load_run_config(g);
  if (rows < 1) throw UsageError("--rows must be positive");
  const std::uint64_t seed = c.study.seed;
  const MarketSeries exog = synthetic_exogenous(rows, seed);
  MarketSeries sim;
  if (kind == "day_ahead") {
    DayAheadParams p;
    for (const auto& m : c.study.models) {
      if (const auto* d = std::get_if<DayAheadSpec>(&m)) {
        p = d->params;
        break;
      }
    }
    sim = da_simulate(p, exog, rows, seed + 1);
  } else if (kind == "month_ahead") {
    MonthAheadParams p;
    for (const auto& m : c.study.models) {
      if (const auto* d = std::get_if<MonthAheadSpec>(&m)) {
        p = d->params;
        break;
      }
    }
    sim = ma_simulate(p, exog, rows, seed + 1);
  } else {
    throw UsageError("--model must be day_ahead or month_ahead");
  }
  const fs::path p = out_name.empty() ? output(g, "simulated.csv") : fs::path(out_name);
  write_csv(p, sim);
  std::cout << p.string() << '\n';
}

void cmd_independence(const Globals& g, const std::string& data_path, const std::string& id) {
  const RunConfig c = load_run_config(g);
  const ModelSpec& spec = pick_model(c, id);
  const MarketSeries data = load_for(data_path, {spec});
  FilterState state;
  if (const auto* d = std::get_if<DayAheadSpec>(&spec)) {
    DayAheadParams p = d->params;
    if (d->estimate) {
      const DayAheadParams start =
          d->use_as_start ? p
                          : da_default_start(data, p.components, static_cast<int>(p.phi.size()),
                                             static_cast<int>(p.theta.size()), p.igarch);
      OptimizerConfig oc = c.study.initial_fit;
      oc.compute_hessian = false;
      p = da_fit(data, start, oc).params;
    }
    state = da_filter(data, p);
  } else if (const auto* m = std::get_if<MonthAheadSpec>(&spec)) {
    MonthAheadParams p = m->params;
    if (m->estimate) {
      const MonthAheadParams start = m->use_as_start ? p : ma_default_start(data, p.components, p.igarch);
      OptimizerConfig oc = c.study.initial_fit;
      oc.compute_hessian = false;
      p = ma_fit(data, start, oc).params;
    }
    state = ma_filter(data, p);
  } else {
    throw UsageError("independence needs a day_ahead or month_ahead model");
  }
  const Eigen::Index first = std::max<Eigen::Index>(std::max<Eigen::Index>(state.start, 1),
                                                    data.size() - c.independence_rows);
  const Eigen::Index n = data.size() - first;
  if (n < 10) throw DataError("independence: fewer than 10 residuals available");
  Eigen::MatrixXd z(n, 1);
  for (Eigen::Index k = 0; k < n; ++k) z(k, 0) = state.innovation[first + k] / state.cond_sd[first + k];

  std::vector<std::string> names;
  std::vector<EnergyIndependenceResult> results;
  const std::vector<std::pair<std::string, const std::optional<Eigen::VectorXd>*>> columns = {
      {"coal", &data.coal},   {"eua", &data.eua},     {"power_peak", &data.power_peak},
      {"oil", &data.oil},     {"temperature", &data.temperature}, {"price_2ma", &data.price_2ma}};
  for (const auto& [name, col] : columns) {
    if (!*col) continue;
    const Eigen::VectorXd lagged = (*col)->segment(first - 1, n);
    if (!lagged.allFinite()) {
      std::cerr << "warning: skipping " << name << " (missing values)\n";
      continue;
    }
    names.push_back(name + "_lag1");
    results.push_back(energy_independence_test(z, lagged, c.permutations, c.study.seed));
  }
  names.push_back("residual_lag1");
  Eigen::VectorXd prev(n);
  for (Eigen::Index k = 0; k < n; ++k) prev[k] = state.innovation[first + k - 1] / state.cond_sd[first + k - 1];
  results.push_back(energy_independence_test(z, prev, c.permutations, c.study.seed));

  write_json(output(g, "independence.json"), independence_report(c, names, results, n));
  write_text(output(g, "independence.csv"), [&](std::ostream& o) {
    o << "covariate,dcor,statistic,p_value\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      o << names[i] << ',' << format_number(results[i].dcor) << ',' << format_number(results[i].statistic) << ','
        << format_number(results[i].p_value) << '\n';
    }
  });
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Probabilistic natural-gas price forecasting"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON study configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed (overrides the configuration)");
  app.add_option("--out-dir", g.out_dir, "Directory for reports")->capture_default_str();

  std::string data_path, model, steps, loss = "crps", sim_kind = "day_ahead", sim_out;
  Eigen::Index rows = 2500;

  auto* fit = app.add_subcommand("fit", "Fit one model; parameter and z-test table as JSON");
  fit->add_option("--data", data_path, "Input CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--model", model, "Model id (default: first day_ahead/month_ahead model)");

  auto* backtest = app.add_subcommand("backtest", "Expanding-window study; scores.json and steps.csv");
  backtest->add_option("--data", data_path, "Input CSV")->required()->check(CLI::ExistingFile);

  auto* dm = app.add_subcommand("dm-matrix", "Diebold-Mariano grid from steps.csv");
  dm->add_option("--steps", steps, "Per-step CSV (default: <out-dir>/steps.csv)");
  dm->add_option("--loss", loss, "Loss column")->check(CLI::IsMember({"crps", "abs", "sq"}))->capture_default_str();

  auto* pinball = app.add_subcommand("pinball", "Mean pinball loss per probability from steps.csv");
  pinball->add_option("--steps", steps, "Per-step CSV (default: <out-dir>/steps.csv)");

  auto* pit = app.add_subcommand("pit", "20-bin PIT histograms from steps.csv");
  pit->add_option("--steps", steps, "Per-step CSV (default: <out-dir>/steps.csv)");

  auto* simulate = app.add_subcommand("simulate", "Synthetic data from a model");
  simulate->add_option("--model", sim_kind, "day_ahead or month_ahead")
      ->check(CLI::IsMember({"day_ahead", "month_ahead"}))
      ->capture_default_str();
  simulate->add_option("--rows", rows, "Number of rows")->capture_default_str();
  simulate->add_option("--output", sim_out, "Output CSV (default: <out-dir>/simulated.csv)");

  auto* independence = app.add_subcommand("independence", "Energy tests of residual independence");
  independence->add_option("--data", data_path, "Input CSV")->required()->check(CLI::ExistingFile);
  independence->add_option("--model", model, "Model id (default: first day_ahead/month_ahead model)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fit) cmd_fit(g, data_path, model);
    if (*backtest) cmd_backtest(g, data_path);
    if (*dm) cmd_dm(g, steps, loss);
    if (*pinball) cmd_pinball(g, steps);
    if (*pit) cmd_pit(g, steps);
    if (*simulate) cmd_simulate(g, sim_kind, rows, sim_out);
    if (*independence) cmd_independence(g, data_path, model);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace gasfc
