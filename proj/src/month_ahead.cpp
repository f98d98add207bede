#include "gasfc/month_ahead.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gasfc/error.hpp"
#include "volatility_params.hpp"

namespace gasfc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const double* required_column(const std::optional<Eigen::VectorXd>& col, const char* name, Eigen::Index first,
                              Eigen::Index last, const Eigen::Array<bool, Eigen::Dynamic, 1>* only_where = nullptr) {
  if (!col) {
    throw DataError(std::string("month-ahead model: column '") + name + "' is required");
  }
  for (Eigen::Index t = first; t < last; ++t) {
    if (only_where && !(*only_where)[t + 1]) continue;
    if (!std::isfinite((*col)[t])) {
      throw DataError(std::string("month-ahead model: missing '") + name + "' value on row " + std::to_string(t + 1));
    }
  }
  return col->data();
}

// Mirrors the Day-Ahead runner: stores mean and sd of each row >= start and
// asks `draw` for the innovation. The monthly average is read from y itself,
// so simulated prices feed the seasonal term.
template <typename Draw>
void run(const MarketSeries& data, const Eigen::VectorXd& y, const MonthAheadParams& p, Eigen::Index rows,
         FilterState& s, Draw&& draw) {
  const auto ranges = lagged_month_ranges(data.dates);
  const Eigen::Index t0 = ma_warmup(data.dates);
  if (rows <= t0) {
    throw DataError("month-ahead model: fewer rows than the 13-month warm-up");
  }
  const auto& m = p.components;
  const bool rollover = m.enabled(Component::rollover);
  const bool risk = m.enabled(Component::risk);
  const bool seasonal = m.enabled(Component::seasonal);
  const Eigen::Index lo = t0 - 1;
  const Eigen::Index hi = rows - 1;
  const double* p2ma =
      rollover ? required_column(data.price_2ma, "price_2ma", lo, hi, &data.first_trading_day) : nullptr;
  const double* eua = m.enabled(Component::eua) ? required_column(data.eua, "eua", lo, hi) : nullptr;
  const double* oil = m.enabled(Component::oil) ? required_column(data.oil, "oil", lo, hi) : nullptr;
  const double* temp = nullptr;
  if (m.enabled(Component::temperature)) {
    required_column(data.temperature, "temperature", lo, hi);
    temp = m.enabled(Component::temperature_smoothing) ? data.temperature_smoothed.data() : data.temperature->data();
  }
  const auto& v = p.vol;

  s.resize(rows);
  s.start = t0;
  for (Eigen::Index t = 0; t < t0; ++t) {
    if (!std::isfinite(y[t])) {
      throw DataError("month-ahead model: missing price on warm-up row " + std::to_string(t + 1));
    }
    s.level[t] = y[t];
  }
  const double sd0 = initial_sd(y.head(t0));
  for (Eigen::Index t = 0; t < t0; ++t) {
    s.base_sd[t] = sd0;
    s.cond_sd[t] = sd0;
  }

  Eigen::Index cached_first = -1;
  double cached_average = 0.0;
  for (Eigen::Index t = t0; t < rows; ++t) {
    const bool first_day = data.first_trading_day[t];
    const double base = t == t0 ? sd0 : tgarch_update(v, s.innovation[t - 1], s.base_sd[t - 1]);
    const double sd = first_day ? v.delta * base : base;
    if (!(base > 0) || !(sd > 0) || !std::isfinite(sd)) {
      throw NumericalError("month-ahead model: conditional sd left (0, inf) on row " + std::to_string(t + 1));
    }

    double mean = p.phi0;
    if (first_day && rollover) {
      mean += p.phi1 * p2ma[t - 1];
    } else {
      mean += p.phi1 * y[t - 1];
      if (risk) {
        mean += p.eta * static_cast<double>(data.days_since_last_trade[t]) / static_cast<double>(data.days_in_month[t]);
      }
    }
    if (seasonal) {
      const auto [first, last] = ranges[static_cast<std::size_t>(t)];
      if (first != cached_first) {
        cached_first = first;
        cached_average = y.segment(first, last - first).mean();
      }
      mean += p.psi1 * cached_average;
    }
    if (eua) mean += p.zeta[0] * eua[t - 1];
    if (oil) mean += p.zeta[1] * oil[t - 1];
    if (temp) mean += p.zeta[2] * temp[t - 1];

    s.base_sd[t] = base;
    s.cond_sd[t] = sd;
    s.mean[t] = mean;
    const double eps = draw(t, mean, sd);
    s.innovation[t] = eps;
    s.arma_error[t] = eps;
    s.level[t] = mean + eps;
  }
}

}  // namespace

MonthAheadParams pinned(const MonthAheadParams& p) {
  MonthAheadParams q = p;
  const auto& m = p.components;
  if (!m.enabled(Component::risk)) q.eta = 0.0;
  if (!m.enabled(Component::seasonal)) q.psi1 = 0.0;
  if (!m.enabled(Component::eua)) q.zeta[0] = 0.0;
  if (!m.enabled(Component::oil)) q.zeta[1] = 0.0;
  if (!m.enabled(Component::temperature)) q.zeta[2] = 0.0;
  q.vol = pinned(p.vol, m, p.igarch);
  return q;
}

void validate(const MonthAheadParams& p) {
  validate(p.vol);
  bool ok = std::isfinite(p.phi0) && std::isfinite(p.phi1) && std::isfinite(p.eta) && std::isfinite(p.psi1);
  for (double z : p.zeta) ok = ok && std::isfinite(z);
  if (!ok) {
    throw DomainError("month-ahead parameters must be finite");
  }
  if (p.igarch && !(p.vol.alpha < 1)) {
    throw DomainError("month-ahead parameters: IGARCH requires alpha < 1");
  }
}

Eigen::Index ma_warmup(const std::vector<Date>& dates) {
  const auto ranges = lagged_month_ranges(dates);
  for (std::size_t t = 0; t < ranges.size(); ++t) {
    if (ranges[t].first >= 0) return std::max<Eigen::Index>(static_cast<Eigen::Index>(t), 2);
  }
  return static_cast<Eigen::Index>(dates.size());
}

FilterState ma_filter(const MarketSeries& data, const MonthAheadParams& params) {
  const MonthAheadParams p = pinned(params);
  validate(p);
  FilterState s;
  run(data, data.price, p, data.size(), s, [&data](Eigen::Index t, double mean, double) {
    if (!std::isfinite(data.price[t])) {
      throw DataError("month-ahead model: missing price on row " + std::to_string(t + 1));
    }
    return data.price[t] - mean;
  });
  return s;
}

double ma_nll(const MarketSeries& data, const MonthAheadParams& params) {
  const MonthAheadParams p = pinned(params);
  validate(p);
  const SstShape<double> shape(p.vol.nu, p.vol.tau);
  FilterState s;
  try {
    run(data, data.price, p, data.size(), s, [&data](Eigen::Index t, double mean, double) {
      if (!std::isfinite(data.price[t])) {
        throw DataError("month-ahead model: missing price on row " + std::to_string(t + 1));
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

Sst ma_forecast_one(const MarketSeries& history, const MonthAheadParams& params, const CalendarFeatures& next) {
  const MonthAheadParams p = pinned(params);
  validate(p);
  const MarketSeries ext = with_pending_row(history, next);
  const Eigen::Index n = history.size();
  FilterState s;
  run(ext, ext.price, p, n + 1, s, [&ext, n](Eigen::Index t, double mean, double) {
    if (t == n) return 0.0;
    if (!std::isfinite(ext.price[t])) {
      throw DataError("month-ahead model: missing price on row " + std::to_string(t + 1));
    }
    return ext.price[t] - mean;
  });
  return Sst(s.mean[n], s.cond_sd[n], p.vol.nu, p.vol.tau);
}

MarketSeries ma_simulate(const MonthAheadParams& params, const MarketSeries& exog, Eigen::Index n, std::uint64_t seed,
                         const SimulationOptions& options, FilterState* state) {
  const MonthAheadParams p = pinned(params);
  validate(p);
  if (exog.size() < n) {
    throw DataError("ma_simulate: exogenous block has " + std::to_string(exog.size()) + " rows, " +
                    std::to_string(n) + " requested");
  }
  MarketSeries out = exog.head(n);
  out.price = Eigen::VectorXd::Zero(n);
  Rng rng(seed);
  const SstShape<double> shape(p.vol.nu, p.vol.tau);
  const Eigen::Index warm = std::min(n, ma_warmup(out.dates));
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

std::vector<ParameterInfo> ma_parameter_info(const MonthAheadParams& spec) {
  const auto& m = spec.components;
  std::vector<ParameterInfo> info;
  info.push_back({"phi0", Domain::real(), 0.0, Alternative::two_sided, 0.01});
  info.push_back({"phi1", Domain::real(), 1.0, Alternative::two_sided, 0.001});
  if (m.enabled(Component::risk)) info.push_back({"eta", Domain::real(), 0.0, Alternative::two_sided, 0.05});
  if (m.enabled(Component::seasonal)) info.push_back({"psi1", Domain::real(), 0.0, Alternative::two_sided, 0.001});
  if (m.enabled(Component::eua)) info.push_back({"zeta1", Domain::real(), 0.0, Alternative::two_sided, 0.001});
  if (m.enabled(Component::oil)) info.push_back({"zeta2", Domain::real(), 0.0, Alternative::two_sided, 0.001});
  if (m.enabled(Component::temperature)) info.push_back({"zeta3", Domain::real(), 0.0, Alternative::two_sided, 0.001});
  detail::append_volatility_info(info, m, spec.igarch);
  return info;
}

Eigen::VectorXd ma_pack(const MonthAheadParams& p) {
  const auto& m = p.components;
  std::vector<double> x{p.phi0, p.phi1};
  if (m.enabled(Component::risk)) x.push_back(p.eta);
  if (m.enabled(Component::seasonal)) x.push_back(p.psi1);
  if (m.enabled(Component::eua)) x.push_back(p.zeta[0]);
  if (m.enabled(Component::oil)) x.push_back(p.zeta[1]);
  if (m.enabled(Component::temperature)) x.push_back(p.zeta[2]);
  detail::append_volatility(x, p.vol, m, p.igarch);
  return Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

MonthAheadParams ma_unpack(const MonthAheadParams& spec, const Eigen::VectorXd& free) {
  const auto& m = spec.components;
  MonthAheadParams p = spec;
  Eigen::Index i = 0;
  const std::function<double()> next = [&]() {
    if (i >= free.size()) throw DomainError("ma_unpack: parameter vector is too short");
    return free[i++];
  };
  p.phi0 = next();
  p.phi1 = next();
  if (m.enabled(Component::risk)) p.eta = next();
  if (m.enabled(Component::seasonal)) p.psi1 = next();
  if (m.enabled(Component::eua)) p.zeta[0] = next();
  if (m.enabled(Component::oil)) p.zeta[1] = next();
  if (m.enabled(Component::temperature)) p.zeta[2] = next();
  detail::read_volatility(p.vol, m, spec.igarch, next);
  if (i != free.size()) throw DomainError("ma_unpack: parameter vector is too long");
  return pinned(p);
}

MonthAheadParams ma_default_start(const MarketSeries& data, const ComponentMask& mask, bool igarch) {
  MonthAheadParams p;
  p.components = mask;
  p.igarch = igarch;
  p.phi1 = 1.0;
  const double sd = initial_sd(data.price);
  p.vol.omega = std::max(0.1 * sd * sd, 1e-8);
  p.vol.alpha = 0.1;
  p.vol.beta = igarch ? 0.9 : 0.8;
  return pinned(p);
}

MonthAheadFit ma_fit(const MarketSeries& data, const MonthAheadParams& start, const OptimizerConfig& config) {
  MonthAheadFit fit;
  fit.info = ma_parameter_info(start);
  const MonthAheadParams spec = pinned(start);
  const Eigen::Index warm = std::min(data.size(), ma_warmup(data.dates));
  const double noise = initial_sd(data.price.head(std::max<Eigen::Index>(warm, 3)));
  auto spread_of = [](const Eigen::VectorXd& c) {
    return c.allFinite() ? std::sqrt((c.array() - c.mean()).square().mean()) : 0.0;
  };
  const double level = std::max(std::abs(data.price.mean()), 1e-8);
  for (auto& info : fit.info) {
    const Eigen::VectorXd* col = nullptr;
    if (info.name == "zeta1" && data.eua) col = &*data.eua;
    if (info.name == "zeta2" && data.oil) col = &*data.oil;
    if (info.name == "zeta3" && data.temperature) col = &*data.temperature;
    if (col) {
      const double spread = spread_of(*col);
      if (spread > 0) info.scale = 0.1 * noise / spread;
    }
    if (info.name == "phi1" || info.name == "psi1") info.scale = 0.1 * noise / level;
    if (info.name == "phi0") info.scale = 0.1 * noise;
  }
  const Objective nll = [&data, &spec](const Eigen::VectorXd& x) { return ma_nll(data, ma_unpack(spec, x)); };
  fit.result = fit_mle(nll, ma_pack(spec), fit.info, config);
  fit.params = ma_unpack(spec, fit.result.params);
  return fit;
}

}  // namespace gasfc
