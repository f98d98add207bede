#include "gasfc/market_series.hpp"

#include <charconv>
#include <cstdio>
#include <limits>
#include <map>

#include "gasfc/error.hpp"

namespace gasfc {

using namespace std::chrono;

namespace {

int month_key(Date d) {
  const year_month_day ymd{d};
  return static_cast<int>(ymd.year()) * 12 + static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename V>
std::optional<V> head_of(const std::optional<V>& v, Eigen::Index n) {
  if (!v) return std::nullopt;
  return V(v->head(n));
}

}  // namespace

Date parse_date(std::string_view iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  auto parse_part = [&](std::string_view part, auto& out) {
    const auto res = std::from_chars(part.data(), part.data() + part.size(), out);
    return res.ec == std::errc{} && res.ptr == part.data() + part.size();
  };
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' || !parse_part(iso.substr(0, 4), y) ||
      !parse_part(iso.substr(5, 2), m) || !parse_part(iso.substr(8, 2), d)) {
    throw DataError("invalid ISO-8601 date '" + std::string(iso) + "'");
  }
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) {
    throw DataError("invalid calendar date '" + std::string(iso) + "'");
  }
  return sys_days{ymd};
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int days_in_month(Date d) {
  const year_month_day ymd{d};
  const year_month_day_last last{ymd.year(), month_day_last{ymd.month()}};
  return static_cast<int>(static_cast<unsigned>(last.day()));
}

Eigen::VectorXd smooth_temperature(const VectorCRef& raw, double initial) {
  if (raw.size() == 0) {
    throw DataError("smooth_temperature: empty series");
  }
  Eigen::VectorXd out(raw.size());
  out[0] = initial;
  for (Eigen::Index t = 1; t < raw.size(); ++t) {
    out[t] = kTemperaturePersistence * out[t - 1] + (1.0 - kTemperaturePersistence) * raw[t - 1];
  }
  return out;
}

void derive_features(MarketSeries& s) {
  const Eigen::Index n = s.size();
  if (static_cast<Eigen::Index>(s.dates.size()) != n) {
    throw DataError("market series: dates and prices differ in length");
  }
  for (Eigen::Index t = 1; t < n; ++t) {
    if (!(s.dates[t] > s.dates[t - 1])) {
      throw DataError("market series: dates must be strictly increasing (row " + std::to_string(t + 1) + ", " +
                      format_date(s.dates[t]) + ")");
    }
  }
  for (const auto* col : {&s.coal, &s.eua, &s.power_peak, &s.oil, &s.temperature, &s.price_2ma}) {
    if (*col && (*col)->size() != n) {
      throw DataError("market series: exogenous column length differs from price length");
    }
  }

  s.is_monday.resize(n);
  s.first_trading_day.resize(n);
  s.days_since_last_trade.resize(n);
  s.days_in_month.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    s.is_monday[t] = weekday{s.dates[t]} == Monday;
    s.first_trading_day[t] = t == 0 || month_key(s.dates[t]) != month_key(s.dates[t - 1]);
    s.days_since_last_trade[t] = t == 0 ? 1 : static_cast<int>((s.dates[t] - s.dates[t - 1]).count());
    s.days_in_month[t] = days_in_month(s.dates[t]);
  }

  s.seasonal_window_sum = Eigen::VectorXd::Constant(n, kNaN);
  for (Eigen::Index t = kSeasonalLag + 2; t < n; ++t) {
    s.seasonal_window_sum[t] = s.price.segment(t - kSeasonalLag - 2, 5).sum();
  }

  s.monthly_lagged_average = Eigen::VectorXd::Constant(n, kNaN);
  const auto ranges = lagged_month_ranges(s.dates);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto [first, last] = ranges[static_cast<std::size_t>(t)];
    if (first >= 0) {
      s.monthly_lagged_average[t] = s.price.segment(first, last - first).mean();
    }
  }

  if (s.temperature && n > 0) {
    s.temperature_smoothed = smooth_temperature(*s.temperature, (*s.temperature)[0]);
  } else {
    s.temperature_smoothed.resize(0);
  }
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> lagged_month_ranges(const std::vector<Date>& dates) {
  const auto n = static_cast<Eigen::Index>(dates.size());
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out(dates.size(), {-1, -1});
  if (n == 0) return out;
  std::map<int, std::pair<Eigen::Index, Eigen::Index>> months;
  for (Eigen::Index t = 0; t < n; ++t) {
    const int key = month_key(dates[static_cast<std::size_t>(t)]);
    auto [it, inserted] = months.try_emplace(key, t, t + 1);
    if (!inserted) it->second.second = t + 1;
  }
  const int first_key = month_key(dates.front());
  for (Eigen::Index t = 0; t < n; ++t) {
    const int source = month_key(dates[static_cast<std::size_t>(t)]) - 12;
    if (source <= first_key) continue;
    const auto it = months.find(source);
    if (it != months.end()) out[static_cast<std::size_t>(t)] = it->second;
  }
  return out;
}

MarketSeries MarketSeries::head(Eigen::Index n) const {
  if (n < 0 || n > size()) {
    throw DataError("market series: head length out of range");
  }
  MarketSeries out;
  out.dates.assign(dates.begin(), dates.begin() + n);
  out.price = price.head(n);
  out.coal = head_of(coal, n);
  out.eua = head_of(eua, n);
  out.power_peak = head_of(power_peak, n);
  out.oil = head_of(oil, n);
  out.temperature = head_of(temperature, n);
  out.price_2ma = head_of(price_2ma, n);
  if (is_monday.size() == size()) {
    out.is_monday = is_monday.head(n);
    out.first_trading_day = first_trading_day.head(n);
    out.days_since_last_trade = days_since_last_trade.head(n);
    out.days_in_month = days_in_month.head(n);
    out.seasonal_window_sum = seasonal_window_sum.head(n);
    out.monthly_lagged_average = monthly_lagged_average.head(n);
    out.temperature_smoothed =
        temperature_smoothed.size() == size() ? Eigen::VectorXd(temperature_smoothed.head(n)) : Eigen::VectorXd();
  }
  return out;
}

CalendarFeatures MarketSeries::calendar(Eigen::Index t) const {
  CalendarFeatures c;
  c.date = dates.at(static_cast<std::size_t>(t));
  c.is_monday = is_monday[t];
  c.first_trading_day = first_trading_day[t];
  c.days_since_last_trade = days_since_last_trade[t];
  c.days_in_month = days_in_month[t];
  return c;
}

MarketSeries with_pending_row(const MarketSeries& history, const CalendarFeatures& next) {
  MarketSeries out = history;
  const Eigen::Index n = history.size();
  out.dates.push_back(next.date);
  auto grow = [n](Eigen::VectorXd& v) {
    v.conservativeResize(n + 1);
    v[n] = kNaN;
  };
  grow(out.price);
  for (auto* col : {&out.coal, &out.eua, &out.power_peak, &out.oil, &out.temperature, &out.price_2ma}) {
    if (*col) grow(**col);
  }
  derive_features(out);
  out.is_monday[n] = next.is_monday;
  out.first_trading_day[n] = next.first_trading_day;
  out.days_since_last_trade[n] = next.days_since_last_trade;
  out.days_in_month[n] = next.days_in_month;
  return out;
}

CalendarFeatures next_calendar(const MarketSeries& history, Date next) {
  CalendarFeatures c;
  c.date = next;
  c.is_monday = weekday{next} == Monday;
  c.days_in_month = days_in_month(next);
  if (history.dates.empty()) {
    c.first_trading_day = true;
    c.days_since_last_trade = 1;
    return c;
  }
  const Date last = history.dates.back();
  if (!(next > last)) {
    throw DataError("next_calendar: date does not follow the history");
  }
  c.first_trading_day = month_key(next) != month_key(last);
  c.days_since_last_trade = static_cast<int>((next - last).count());
  return c;
}

double monthly_seasonal_average(const MarketSeries& data, Eigen::Index t) {
  if (t < 0 || t >= data.size()) {
    throw DataError("monthly_seasonal_average: index out of range");
  }
  const double v = data.monthly_lagged_average.size() == data.size() ? data.monthly_lagged_average[t] : kNaN;
  if (std::isnan(v)) {
    throw DataError("monthly_seasonal_average: fewer than 13 months of history before row " + std::to_string(t + 1));
  }
  return v;
}

std::vector<Date> business_days(Date start, std::size_t n) {
  std::vector<Date> out;
  out.reserve(n);
  Date d = start;
  while (out.size() < n) {
    const weekday w{d};
    if (w != Saturday && w != Sunday) {
      out.push_back(d);
    }
    d += days{1};
  }
  return out;
}

}  // namespace gasfc
