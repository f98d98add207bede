#include "gasfc/day_ahead.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gasfc/error.hpp"
#include "volatility_params.hpp"

namespace gasfc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Regressor {
  Component component;
  const std::optional<Eigen::VectorXd> MarketSeries::*column;
  const char* name;
};

constexpr std::array<Regressor, 3> kRegressors{{
    {Component::coal, &MarketSeries::coal, "coal"},
    {Component::eua, &MarketSeries::eua, "eua"},
    {Component::power, &MarketSeries::power_peak, "power_peak"},
}};

// Columns of enabled regressors, checked to be finite on the lagged rows the
// recursion reads (start-1 .. rows-2).
std::array<const double*, 3> regressor_columns(const MarketSeries& data, const DayAheadParams& p, Eigen::Index rows) {
  std::array<const double*, 3> cols{};
  for (std::size_t k = 0; k < kRegressors.size(); ++k) {
    const auto& r = kRegressors[k];
    if (!p.components.enabled(r.component)) continue;
    const auto& col = data.*(r.column);
    if (!col || col->size() < rows - 1) {
      throw DataError(std::string("day-ahead model: column '") + r.name + "' is required");
    }
    for (Eigen::Index t = kDayAheadWarmup - 1; t < rows - 1; ++t) {
      if (!std::isfinite((*col)[t])) {
        throw DataError(std::string("day-ahead model: missing '") + r.name + "' value on row " +
                        std::to_string(t + 1));
      }
    }
    cols[k] = col->data();
  }
  return cols;
}

// Runs the recursions over rows [0, rows). For every row t >= start the
// conditional mean and sd are stored, then `draw(t, mean, sd)` returns the
// innovation, which may also write y[t]. Warm-up rows of y must be set.
template <typename Draw>
void run(const MarketSeries& data, const Eigen::VectorXd& y, const DayAheadParams& p, Eigen::Index rows,
         FilterState& s, Draw&& draw) {
  const Eigen::Index t0 = kDayAheadWarmup;
  if (rows <= t0) {
    throw DataError("day-ahead model: at least " + std::to_string(t0 + 1) + " rows are required");
  }
  const auto cols = regressor_columns(data, p, rows);
  const bool seasonal = p.components.enabled(Component::seasonal);
  const auto ar = static_cast<Eigen::Index>(p.phi.size());
  const auto ma = static_cast<Eigen::Index>(p.theta.size());
  const auto& v = p.vol;

  s.resize(rows);
  s.start = t0;
  for (Eigen::Index t = 0; t < t0; ++t) {
    if (!std::isfinite(y[t])) {
      throw DataError("day-ahead model: missing price on warm-up row " + std::to_string(t + 1));
    }
    s.level[t] = y[t];
  }
  const double sd0 = initial_sd(y.head(t0));
  for (Eigen::Index t = 0; t < t0; ++t) {
    s.base_sd[t] = sd0;
    s.cond_sd[t] = sd0;
  }

  for (Eigen::Index t = t0; t < rows; ++t) {
    const double base = t == t0 ? sd0 : tgarch_update(v, s.innovation[t - 1], s.base_sd[t - 1]);
    const double sd = data.is_monday[t] ? v.delta * base : base;
    if (!(base > 0) || !(sd > 0) || !std::isfinite(sd)) {
      throw NumericalError("day-ahead model: conditional sd left (0, inf) on row " + std::to_string(t + 1));
    }
    double arma = 0.0;
    for (Eigen::Index i = 1; i <= ar; ++i) arma += p.phi[i - 1] * s.arma_error[t - i];
    for (Eigen::Index i = 1; i <= ma; ++i) arma += p.theta[i - 1] * s.innovation[t - i];

    double mean = s.level[t - 1];
    if (seasonal) {
      const double window = y.segment(t - kSeasonalLag - 2, 5).sum();
      mean += p.psi1 / 5.0 * window;
    }
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k]) mean += p.zeta[k] * cols[k][t - 1];
    }
    mean += arma;

    s.base_sd[t] = base;
    s.cond_sd[t] = sd;
    s.mean[t] = mean;
    const double eps = draw(t, mean, sd);
    s.innovation[t] = eps;
    s.arma_error[t] = arma + eps;
    s.level[t] = s.level[t - 1] + p.lambda * s.arma_error[t];
  }
}

double typical_diff_sd(const MarketSeries& data) {
  return initial_sd(data.price.head(std::min<Eigen::Index>(data.size(), kDayAheadWarmup)));
}

}  // namespace

DayAheadParams pinned(const DayAheadParams& p) {
  DayAheadParams q = p;
  const auto& m = p.components;
  if (!m.enabled(Component::exp_smoothing)) q.lambda = 0.0;
  if (!m.enabled(Component::seasonal)) q.psi1 = 0.0;
  if (!m.enabled(Component::coal)) q.zeta[0] = 0.0;
  if (!m.enabled(Component::eua)) q.zeta[1] = 0.0;
  if (!m.enabled(Component::power)) q.zeta[2] = 0.0;
  if (!m.enabled(Component::arma)) {
    for (auto& x : q.phi) x = 0.0;
    for (auto& x : q.theta) x = 0.0;
  }
  q.vol = pinned(p.vol, m, p.igarch);
  return q;
}

void validate(const DayAheadParams& p) {
  validate(p.vol);
  auto finite = [](double x) { return std::isfinite(x); };
  bool ok = finite(p.lambda) && finite(p.psi1);
  for (double z : p.zeta) ok = ok && finite(z);
  for (double x : p.phi) ok = ok && finite(x);
  for (double x : p.theta) ok = ok && finite(x);
  if (!ok) {
    throw DomainError("day-ahead parameters must be finite");
  }
  if (p.igarch && !(p.vol.alpha < 1)) {
    throw DomainError("day-ahead parameters: IGARCH requires alpha < 1");
  }
}

FilterState da_filter(const MarketSeries& data, const DayAheadParams& params) {
  const DayAheadParams p = pinned(params);
  validate(p);
  FilterState s;
  run(data, data.price, p, data.size(), s, [&data](Eigen::Index t, double mean, double) {
    if (!std::isfinite(data.price[t])) {
      throw DataError("day-ahead model: missing price on row " + std::to_string(t + 1));
    }
    return data.price[t] - mean;
  });
  return s;
}

double da_nll(const MarketSeries& data, const DayAheadParams& params) {
  const DayAheadParams p = pinned(params);
  validate(p);
  const SstShape<double> shape(p.vol.nu, p.vol.tau);
  FilterState s;
  try {
    run(data, data.price, p, data.size(), s, [&data](Eigen::Index t, double mean, double) {
      if (!std::isfinite(data.price[t])) {
        throw DataError("day-ahead model: missing price on row " + std::to_string(t + 1));
      }
      return data.price[t] - mean;
    });
  } catch (const NumericalError&) {
    return kInf;
  }
  double total = 0.0;
  for (Eigen::Index t = s.start; t < data.size(); ++t) {
    total += shape.logpdf(s.innovation[t], 0.0, s.cond_sd[t]);
  }
  return std::isfinite(total) ? -total : kInf;
}

Sst da_forecast_one(const MarketSeries& history, const DayAheadParams& params, const CalendarFeatures& next) {
  const DayAheadParams p = pinned(params);
  validate(p);
  const MarketSeries ext = with_pending_row(history, next);
  const Eigen::Index n = history.size();
  FilterState s;
  run(ext, ext.price, p, n + 1, s, [&ext, n](Eigen::Index t, double mean, double) {
    if (t == n) return 0.0;
    if (!std::isfinite(ext.price[t])) {
      throw DataError("day-ahead model: missing price on row " + std::to_string(t + 1));
    }
    return ext.price[t] - mean;
  });
  return Sst(s.mean[n], s.cond_sd[n], p.vol.nu, p.vol.tau);
}

MarketSeries da_simulate(const DayAheadParams& params, const MarketSeries& exog, Eigen::Index n, std::uint64_t seed,
                         const SimulationOptions& options, FilterState* state) {
  const DayAheadParams p = pinned(params);
  validate(p);
  if (exog.size() < n) {
    throw DataError("da_simulate: exogenous block has " + std::to_string(exog.size()) + " rows, " +
                    std::to_string(n) + " requested");
  }
  MarketSeries out = exog.head(n);
  out.price = Eigen::VectorXd::Zero(n);
  Rng rng(seed);
  const SstShape<double> shape(p.vol.nu, p.vol.tau);
  const Eigen::Index warm = std::min(n, kDayAheadWarmup);
  out.price[0] = options.initial_level;
  for (Eigen::Index t = 1; t < warm; ++t) {
    out.price[t] = out.price[t - 1] + options.initial_sd * rng.normal();
  }
  derive_features(out);
  FilterState s;
  Eigen::VectorXd& y = out.price;
  run(out, y, p, n, s, [&](Eigen::Index t, double mean, double sd) {
    const double eps = sd * shape.standard_quantile(rng.uniform());
    y[t] = mean + eps;
    return eps;
  });
  derive_features(out);
  if (state) *state = std::move(s);
  return out;
}

std::vector<ParameterInfo> da_parameter_info(const DayAheadParams& spec) {
  const auto& m = spec.components;
  std::vector<ParameterInfo> info;
  if (m.enabled(Component::exp_smoothing)) info.push_back({"lambda", Domain::real(), 1.0, Alternative::two_sided, 0.1});
  if (m.enabled(Component::seasonal)) info.push_back({"psi1", Domain::real(), 0.0, Alternative::two_sided, 0.01});
  if (m.enabled(Component::coal)) info.push_back({"zeta1", Domain::real(), 0.0, Alternative::two_sided, 0.01});
  if (m.enabled(Component::eua)) info.push_back({"zeta2", Domain::real(), 0.0, Alternative::two_sided, 0.01});
  if (m.enabled(Component::power)) info.push_back({"zeta3", Domain::real(), 0.0, Alternative::two_sided, 0.01});
  if (m.enabled(Component::arma)) {
    for (std::size_t i = 0; i < spec.phi.size(); ++i) {
      info.push_back({"phi" + std::to_string(i + 1), Domain::real(), 0.0, Alternative::two_sided, 0.1});
    }
    for (std::size_t i = 0; i < spec.theta.size(); ++i) {
      info.push_back({"theta" + std::to_string(i + 1), Domain::real(), 0.0, Alternative::two_sided, 0.1});
    }
  }
  detail::append_volatility_info(info, m, spec.igarch);
  return info;
}

Eigen::VectorXd da_pack(const DayAheadParams& p) {
  const auto& m = p.components;
  std::vector<double> x;
  if (m.enabled(Component::exp_smoothing)) x.push_back(p.lambda);
  if (m.enabled(Component::seasonal)) x.push_back(p.psi1);
  if (m.enabled(Component::coal)) x.push_back(p.zeta[0]);
  if (m.enabled(Component::eua)) x.push_back(p.zeta[1]);
  if (m.enabled(Component::power)) x.push_back(p.zeta[2]);
  if (m.enabled(Component::arma)) {
    x.insert(x.end(), p.phi.begin(), p.phi.end());
    x.insert(x.end(), p.theta.begin(), p.theta.end());
  }
  detail::append_volatility(x, p.vol, m, p.igarch);
  return Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

DayAheadParams da_unpack(const DayAheadParams& spec, const Eigen::VectorXd& free) {
  const auto& m = spec.components;
  DayAheadParams p = spec;
  Eigen::Index i = 0;
  auto next = [&]() {
    if (i >= free.size()) throw DomainError("da_unpack: parameter vector is too short");
    return free[i++];
  };
  if (m.enabled(Component::exp_smoothing)) p.lambda = next();
  if (m.enabled(Component::seasonal)) p.psi1 = next();
  if (m.enabled(Component::coal)) p.zeta[0] = next();
  if (m.enabled(Component::eua)) p.zeta[1] = next();
  if (m.enabled(Component::power)) p.zeta[2] = next();
  if (m.enabled(Component::arma)) {
    for (auto& x : p.phi) x = next();
    for (auto& x : p.theta) x = next();
  }
  detail::read_volatility(p.vol, m, spec.igarch, next);
  if (i != free.size()) throw DomainError("da_unpack: parameter vector is too long");
  return pinned(p);
}

DayAheadParams da_default_start(const MarketSeries& data, const ComponentMask& mask, int ar_order, int ma_order,
                                bool igarch) {
  if (ar_order < 0 || ma_order < 0) {
    throw DomainError("da_default_start: ARMA orders must be non-negative");
  }
  DayAheadParams p;
  p.components = mask;
  p.igarch = igarch;
  p.lambda = 1.0;
  p.phi.assign(static_cast<std::size_t>(ar_order), 0.0);
  p.theta.assign(static_cast<std::size_t>(ma_order), 0.0);
  const double sd = initial_sd(data.price);
  p.vol.omega = std::max(0.1 * sd * sd, 1e-8);
  p.vol.alpha = 0.1;
  p.vol.beta = igarch ? 0.9 : 0.8;
  return pinned(p);
}

DayAheadFit da_fit(const MarketSeries& data, const DayAheadParams& start, const OptimizerConfig& config) {
  DayAheadFit fit;
  fit.info = da_parameter_info(start);
  const DayAheadParams spec = pinned(start);
  // Regressor coefficients move the mean by coefficient * column level, so
  // scale their search steps by the price noise relative to the column spread.
  const double noise = typical_diff_sd(data);
  for (auto& info : fit.info) {
    const std::optional<Eigen::VectorXd>* col = nullptr;
    if (info.name == "zeta1") col = &data.coal;
    if (info.name == "zeta2") col = &data.eua;
    if (info.name == "zeta3") col = &data.power_peak;
    if (col && *col && (*col)->allFinite()) {
      const double spread = std::sqrt(((*col)->array() - (*col)->mean()).square().mean());
      info.scale = 0.1 * noise / std::max(spread, 1e-8);
    }
    if (info.name == "psi1") {
      info.scale = 0.1 * noise / std::max(std::abs(data.price.mean()), 1e-8);
    }
  }
  const Objective nll = [&data, &spec](const Eigen::VectorXd& x) { return da_nll(data, da_unpack(spec, x)); };
  fit.result = fit_mle(nll, da_pack(spec), fit.info, config);
  fit.params = da_unpack(spec, fit.result.params);
  return fit;
}

ZTestResult persistence_test(const ModelFit& fit) {
  Eigen::Index a = -1;
  Eigen::Index b = -1;
  for (std::size_t i = 0; i < fit.info.size(); ++i) {
    if (fit.info[i].name == "alpha") a = static_cast<Eigen::Index>(i);
    if (fit.info[i].name == "beta") b = static_cast<Eigen::Index>(i);
  }
  if (a < 0 || b < 0) {
    throw DomainError("persistence_test: alpha and beta must both be free parameters");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(fit.result.params.size());
  w[a] = 1.0;
  w[b] = 1.0;
  return linear_z_test(fit.result.params, fit.result.vcov, w, 1.0, Alternative::two_sided);
}

}  // namespace gasfc
