#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gasfc/scoring.hpp"

namespace gasfc {

using Date = std::chrono::sys_days;

Date parse_date(std::string_view iso);
std::string format_date(Date d);
int days_in_month(Date d);

/// One year of trading days (52 weeks of five observations).
inline constexpr Eigen::Index kSeasonalLag = 260;

/// Persistence of the exponential temperature smoother.
inline constexpr double kTemperaturePersistence = 0.95;

struct CalendarFeatures {
  Date date{};
  bool is_monday = false;
  bool first_trading_day = false;
  int days_since_last_trade = 1;  // calendar days since the previous row
  int days_in_month = 30;
};

/// Dated observation table. Optional exogenous columns hold NaN for missing
/// cells. Derived columns depend only on rows at or before their own index,
/// so head(n) is identical to re-deriving on the first n rows.
struct MarketSeries {
  std::vector<Date> dates;
  Eigen::VectorXd price;

  std::optional<Eigen::VectorXd> coal;
  std::optional<Eigen::VectorXd> eua;
  std::optional<Eigen::VectorXd> power_peak;
  std::optional<Eigen::VectorXd> oil;
  std::optional<Eigen::VectorXd> temperature;
  std::optional<Eigen::VectorXd> price_2ma;

  // Derived by derive_features().
  Eigen::Array<bool, Eigen::Dynamic, 1> is_monday;
  Eigen::Array<bool, Eigen::Dynamic, 1> first_trading_day;
  Eigen::VectorXi days_since_last_trade;
  Eigen::VectorXi days_in_month;
  Eigen::VectorXd seasonal_window_sum;      // sum of price over rows t-A-2 .. t-A+2, NaN if unavailable
  Eigen::VectorXd monthly_lagged_average;   // mean price of the calendar month one year earlier, NaN if unavailable
  Eigen::VectorXd temperature_smoothed;     // empty unless temperature is present

  Eigen::Index size() const { return price.size(); }
  MarketSeries head(Eigen::Index n) const;
  CalendarFeatures calendar(Eigen::Index t) const;
};

/// Validates dates and (re)computes every derived column.
void derive_features(MarketSeries& s);

/// Calendar features of a row that would follow `history` on `next`.
CalendarFeatures next_calendar(const MarketSeries& history, Date next);

/// History extended by one row with NaN price and exogenous cells whose
/// calendar flags are taken from `next`; the row a one-step forecast targets.
MarketSeries with_pending_row(const MarketSeries& history, const CalendarFeatures& next);

/// T~_t = 0.95 T~_{t-1} + 0.05 T_{t-1}, with T~_0 = initial. Same length as raw.
Eigen::VectorXd smooth_temperature(const VectorCRef& raw, double initial);

/// Row range [first, last) of the calendar month twelve months before each
/// row's month, or {-1, -1} when that month is not fully inside the data (the
/// first month present counts as partial).
std::vector<std::pair<Eigen::Index, Eigen::Index>> lagged_month_ranges(const std::vector<Date>& dates);

/// Mean price over the calendar month twelve months before row t's month.
double monthly_seasonal_average(const MarketSeries& data, Eigen::Index t);

/// Consecutive Monday-Friday dates starting at the first business day >= start.
std::vector<Date> business_days(Date start, std::size_t n);

}  // namespace gasfc
