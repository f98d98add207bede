#include "gasfc/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <span>
#include <utility>

#include "gasfc/benchmarks.hpp"
#include "gasfc/error.hpp"

namespace gasfc {
namespace {

// One model inside a study: refit on a history, then forecast the next row.
class Runner {
 public:
  virtual ~Runner() = default;
  virtual bool estimates() const = 0;
  // Throws (leaving the parameters untouched) when the fit failed.
  virtual void refit(const MarketSeries& history, bool first, bool hessian, ModelTrack& track) = 0;
  virtual ForecastDistribution forecast(const MarketSeries& history, const CalendarFeatures& next) = 0;
  virtual Eigen::VectorXd current() const = 0;
};

void record_fit(const FitResult& r, bool hessian, ModelTrack& track, std::vector<Eigen::MatrixXd>& hessians) {
  ++track.refits;
  if (!r.converged) ++track.non_converged;
  if (hessian && r.hessian.size() > 0) {
    hessians.push_back(r.hessian);
    ++track.hessians;
  }
}

OptimizerConfig with_hessian(OptimizerConfig c, bool hessian) {
  c.compute_hessian = hessian;
  return c;
}

class DayAheadRunner : public Runner {
 public:
  DayAheadRunner(const DayAheadSpec& spec, const StudyConfig& cfg, std::vector<Eigen::MatrixXd>& h)
      : spec_(spec), cfg_(cfg), hessians_(h), params_(pinned(spec.params)) {}
  bool estimates() const override { return spec_.estimate; }
  void refit(const MarketSeries& history, bool first, bool hessian, ModelTrack& track) override {
    DayAheadParams start = params_;
    OptimizerConfig oc = with_hessian(cfg_.warm_fit, hessian);
    if (first) {
      oc = with_hessian(cfg_.initial_fit, hessian);
      if (!spec_.use_as_start) {
        const auto& p = spec_.params;
        start = da_default_start(history, p.components, static_cast<int>(p.phi.size()),
                                 static_cast<int>(p.theta.size()), p.igarch);
      }
    }
    const DayAheadFit fit = da_fit(history, start, oc);
    if (!std::isfinite(fit.result.nll)) throw NumericalError("non-finite likelihood at the optimum");
    record_fit(fit.result, hessian, track, hessians_);
    params_ = fit.params;
  }
  ForecastDistribution forecast(const MarketSeries& history, const CalendarFeatures& next) override {
    return da_forecast_one(history, params_, next);
  }
  Eigen::VectorXd current() const override { return da_pack(params_); }

 private:
  const DayAheadSpec& spec_;
  const StudyConfig& cfg_;
  std::vector<Eigen::MatrixXd>& hessians_;
  DayAheadParams params_;
};

class MonthAheadRunner : public Runner {
 public:
  MonthAheadRunner(const MonthAheadSpec& spec, const StudyConfig& cfg, std::vector<Eigen::MatrixXd>& h)
      : spec_(spec), cfg_(cfg), hessians_(h), params_(pinned(spec.params)) {}
  bool estimates() const override { return spec_.estimate; }
  void refit(const MarketSeries& history, bool first, bool hessian, ModelTrack& track) override {
    MonthAheadParams start = params_;
    OptimizerConfig oc = with_hessian(cfg_.warm_fit, hessian);
    if (first) {
      oc = with_hessian(cfg_.initial_fit, hessian);
      if (!spec_.use_as_start) {
        start = ma_default_start(history, spec_.params.components, spec_.params.igarch);
      }
    }
    const MonthAheadFit fit = ma_fit(history, start, oc);
    if (!std::isfinite(fit.result.nll)) throw NumericalError("non-finite likelihood at the optimum");
    record_fit(fit.result, hessian, track, hessians_);
    params_ = fit.params;
  }
  ForecastDistribution forecast(const MarketSeries& history, const CalendarFeatures& next) override {
    return ma_forecast_one(history, params_, next);
  }
  Eigen::VectorXd current() const override { return ma_pack(params_); }

 private:
  const MonthAheadSpec& spec_;
  const StudyConfig& cfg_;
  std::vector<Eigen::MatrixXd>& hessians_;
  MonthAheadParams params_;
};

class ArimaRunner : public Runner {
 public:
  ArimaRunner(const ArimaSpec& spec, const StudyConfig& cfg, std::vector<Eigen::MatrixXd>& h)
      : spec_(spec), cfg_(cfg), hessians_(h) {}
  bool estimates() const override { return true; }
  void refit(const MarketSeries& history, bool first, bool hessian, ModelTrack& track) override {
    const ArimaFit fit = first ? arima_fit(history.price, with_hessian(cfg_.initial_fit, hessian))
                               : arima_fit(history.price, with_hessian(cfg_.warm_fit, hessian), &params_);
    if (!std::isfinite(fit.result.nll)) throw NumericalError("non-finite likelihood at the optimum");
    record_fit(fit.result, hessian, track, hessians_);
    params_ = fit.params;
  }
  ForecastDistribution forecast(const MarketSeries& history, const CalendarFeatures&) override {
    return arima_forecast_one(params_, history.price, arima_residuals(params_, history.price), spec_.family);
  }
  Eigen::VectorXd current() const override {
    Eigen::VectorXd v(5);
    v << params_.intercept, params_.ar[0], params_.ar[1], params_.ma[0], params_.ma[1];
    return v;
  }

 private:
  const ArimaSpec& spec_;
  const StudyConfig& cfg_;
  std::vector<Eigen::MatrixXd>& hessians_;
  ArimaParams params_;
};

const Eigen::VectorXd& oil_column(const MarketSeries& s) {
  if (!s.oil) throw DataError("var model requires an oil column");
  return *s.oil;
}

class VarRunner : public Runner {
 public:
  explicit VarRunner(const VarSpec& spec) : spec_(spec) {}
  bool estimates() const override { return true; }
  void refit(const MarketSeries& history, bool, bool, ModelTrack& track) override {
    model_ = var_fit(history.price, oil_column(history), spec_.max_order);
    ++track.refits;
  }
  ForecastDistribution forecast(const MarketSeries& history, const CalendarFeatures&) override {
    return var_forecast_one(model_, history.price, oil_column(history), spec_.family);
  }
  Eigen::VectorXd current() const override { return {}; }

 private:
  const VarSpec& spec_;
  VarModel model_;
};

std::vector<ParameterInfo> info_of(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::vector<ParameterInfo> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DayAheadSpec>) {
          return da_parameter_info(s.params);
        } else if constexpr (std::is_same_v<T, MonthAheadSpec>) {
          return ma_parameter_info(s.params);
        } else if constexpr (std::is_same_v<T, ArimaSpec>) {
          return {{"intercept", Domain::real(), 0.0, Alternative::two_sided, 0.1},
                  {"ar1", Domain::real(), 0.0, Alternative::two_sided, 0.1},
                  {"ar2", Domain::real(), 0.0, Alternative::two_sided, 0.1},
                  {"ma1", Domain::real(), 0.0, Alternative::two_sided, 0.1},
                  {"ma2", Domain::real(), 0.0, Alternative::two_sided, 0.1}};
        } else {
          return {};
        }
      },
      spec);
}

std::unique_ptr<Runner> make_runner(const ModelSpec& spec, const StudyConfig& cfg, std::vector<Eigen::MatrixXd>& h) {
  return std::visit(
      [&](const auto& s) -> std::unique_ptr<Runner> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DayAheadSpec>) {
          return std::make_unique<DayAheadRunner>(s, cfg, h);
        } else if constexpr (std::is_same_v<T, MonthAheadSpec>) {
          return std::make_unique<MonthAheadRunner>(s, cfg, h);
        } else if constexpr (std::is_same_v<T, ArimaSpec>) {
          return std::make_unique<ArimaRunner>(s, cfg, h);
        } else {
          return std::make_unique<VarRunner>(s);
        }
      },
      spec);
}

ModelTrack run_model(const MarketSeries& data, const StudyConfig& cfg, const ModelSpec& spec) {
  const Eigen::Index n = data.size();
  const Eigen::Index steps = n - cfg.init_window;
  ModelTrack track;
  track.id = model_id(spec);
  track.info = info_of(spec);
  track.forecasts.reserve(static_cast<std::size_t>(steps));
  track.realizations.resize(steps);
  track.abs_loss.resize(steps);
  track.sq_loss.resize(steps);
  track.crps.resize(steps);
  track.pit.resize(steps);
  track.pinball.resize(steps, cfg.grid.size());

  std::vector<Eigen::MatrixXd> hessians;
  const auto runner = make_runner(spec, cfg, hessians);
  int refit_count = 0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const Eigen::Index row = cfg.init_window + k;
    const MarketSeries history = data.head(row);
    if (runner->estimates() && k % cfg.refit_every == 0) {
      const bool first = k == 0;
      const bool hessian = cfg.hessian_every > 0 && refit_count % cfg.hessian_every == 0;
      try {
        runner->refit(history, first, hessian, track);
      } catch (const std::exception& e) {
        if (first) throw StudyError(track.id, k, std::string("initial fit failed: ") + e.what());
        track.warnings.push_back("step " + std::to_string(k) + ": refit failed (" + e.what() +
                                 "); previous parameters kept");
      }
      ++refit_count;
    }
    const Eigen::VectorXd current = runner->current();
    if (k == 0) track.parameters.resize(steps, current.size());
    if (current.size() > 0) track.parameters.row(k) = current.transpose();

    ForecastDistribution f = [&] {
      try {
        return runner->forecast(history, data.calendar(row));
      } catch (const std::exception& e) {
        throw StudyError(track.id, k, e.what());
      }
    }();
    const double y = data.price[row];
    track.realizations[k] = y;
    track.abs_loss[k] = std::abs(y - median(f));
    const double err = y - mean(f);
    track.sq_loss[k] = err * err;
    track.crps[k] = crps(f, y);
    track.pit[k] = std::clamp(cdf(f, y), 0.0, 1.0);
    track.pinball.row(k) = pinball_row(f, y, cfg.grid).transpose();
    track.forecasts.push_back(std::move(f));
  }
  if (!hessians.empty()) {
    track.hessian = average_hessians(std::span<const Eigen::MatrixXd>(hessians));
  }
  return track;
}

bool belongs_to(const ModelSpec& spec, Component c) {
  static const ComponentMask da{Component::exp_smoothing, Component::seasonal, Component::coal,
                                Component::eua,           Component::power,    Component::arma,
                                Component::garch,         Component::leverage, Component::elevation};
  static const ComponentMask ma{Component::seasonal,    Component::eua,         Component::oil,
                                Component::temperature, Component::temperature_smoothing,
                                Component::rollover,    Component::risk,        Component::garch,
                                Component::leverage,    Component::elevation};
  if (std::holds_alternative<DayAheadSpec>(spec)) return da.enabled(c);
  if (std::holds_alternative<MonthAheadSpec>(spec)) return ma.enabled(c);
  return false;
}

ComponentMask& mask_of(ModelSpec& spec) {
  if (auto* d = std::get_if<DayAheadSpec>(&spec)) return d->params.components;
  if (auto* m = std::get_if<MonthAheadSpec>(&spec)) return m->params.components;
  throw DomainError("variant_sweep: base model must be a day_ahead or month_ahead spec");
}

std::string& id_of(ModelSpec& spec) {
  return std::visit([](auto& s) -> std::string& { return s.id; }, spec);
}

}  // namespace

OptimizerConfig warm_start_config() {
  OptimizerConfig c;
  c.simplex_step = 0.01;
  c.simplex_evaluations = 200;
  c.polish_iterations = 100;
  c.restarts = 0;
  return c;
}

const std::string& model_id(const ModelSpec& spec) {
  return std::visit([](const auto& s) -> const std::string& { return s.id; }, spec);
}

void validate(const StudyConfig& config) {
  if (config.init_window < 300) throw DomainError("study: init_window must be at least 300");
  if (config.refit_every < 1) throw DomainError("study: refit_every must be at least 1");
  if (config.hessian_every < 0) throw DomainError("study: hessian_every must be non-negative");
  if (config.grid.size() == 0 || (config.grid.array() <= 0.0).any() || (config.grid.array() >= 1.0).any()) {
    throw DomainError("study: probability grid must be non-empty and inside (0, 1)");
  }
  std::set<std::string> ids;
  for (const auto& m : config.models) {
    if (!ids.insert(model_id(m)).second) throw DomainError("study: duplicate model id '" + model_id(m) + "'");
  }
}

StudyError::StudyError(const std::string& model_, Eigen::Index step_, const std::string& what)
    : std::runtime_error("model '" + model_ + "' failed at step " + std::to_string(step_) + ": " + what),
      model(model_),
      step(step_) {}

const ModelTrack& BacktestResult::track(const std::string& id) const {
  for (const auto& t : models) {
    if (t.id == id) return t;
  }
  throw DomainError("unknown model id '" + id + "'");
}

BacktestResult run_study(const MarketSeries& data, const StudyConfig& config) {
  validate(config);
  if (data.size() <= config.init_window + 1) {
    throw DataError("study: series length must exceed init_window + 1");
  }
  BacktestResult result;
  result.init_window = config.init_window;
  result.grid = config.grid;
  result.dates.assign(data.dates.begin() + config.init_window, data.dates.end());
  for (const auto& spec : config.models) {
    result.models.push_back(run_model(data, config, spec));
  }
  return result;
}

std::vector<ScoreRow> score_table(const BacktestResult& result) {
  std::vector<ScoreRow> rows;
  for (const auto& t : result.models) {
    rows.push_back({t.id, t.abs_loss.mean(), std::sqrt(t.sq_loss.mean()), t.crps.mean()});
  }
  return rows;
}

std::vector<VariantRow> variant_sweep(const ModelSpec& base, const std::vector<std::string>& deltas,
                                      const MarketSeries& data, const StudyConfig& config) {
  ModelSpec root = base;
  mask_of(root);  // rejects benchmark specs
  std::vector<ModelSpec> variants{root};
  std::vector<std::string> labels{"proposed"};
  for (const auto& d : deltas) {
    if (d.empty()) throw DomainError("variant_sweep: empty delta");
    const char op = d.front();
    const std::string name = (op == '-' || op == '+') ? d.substr(1) : d;
    const Component c = component_from_string(name);
    if (!belongs_to(root, c)) {
      throw DomainError("variant_sweep: component '" + name + "' does not belong to model '" + model_id(root) + "'");
    }
    ModelSpec v = root;
    ComponentMask& mask = mask_of(v);
    const bool on = op == '-' ? false : op == '+' ? true : !mask.enabled(c);
    mask = on ? mask.with(c) : mask.without(c);
    labels.push_back((on ? "+ " : "- ") + name);
    id_of(v) = model_id(root) + " " + labels.back();
    variants.push_back(std::move(v));
  }
  StudyConfig cfg = config;
  cfg.models = variants;
  const BacktestResult r = run_study(data, cfg);
  std::vector<VariantRow> rows;
  const double base_crps = r.models.front().crps.mean();
  for (std::size_t i = 0; i < r.models.size(); ++i) {
    const auto& t = r.models[i];
    const double c = t.crps.mean();
    rows.push_back({labels[i], t.abs_loss.mean(), std::sqrt(t.sq_loss.mean()), c, 100.0 * (c - base_crps) / base_crps});
  }
  return rows;
}

Eigen::VectorXi pit_histogram(const VectorCRef& u, int bins) {
  if (bins < 1) throw DomainError("pit_histogram: bins must be positive");
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(bins);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0 && u[i] <= 1.0)) throw DomainError("pit_histogram: values must lie in [0, 1]");
    const int b = std::min(static_cast<int>(u[i] * bins), bins - 1);
    ++counts[b];
  }
  return counts;
}

PitSummary pit_values(const ModelTrack& track) {
  return {track.pit, pit_histogram(track.pit)};
}

PitSummary pit_values(const BacktestResult& result, const std::string& model) {
  return pit_values(result.track(model));
}

std::vector<ParameterTest> averaged_parameter_tests(const ModelTrack& track) {
  if (track.parameters.rows() == 0 || track.parameters.cols() == 0) return {};
  const Eigen::VectorXd last = track.parameters.row(track.parameters.rows() - 1).transpose();
  Eigen::MatrixXd vcov = Eigen::MatrixXd::Constant(last.size(), last.size(), std::nan(""));
  if (track.hessian.mean.rows() == last.size()) {
    vcov = vcov_from_hessian(track.hessian.mean);
  }
  return parameter_tests(track.info, last, vcov);
}

}  // namespace gasfc
