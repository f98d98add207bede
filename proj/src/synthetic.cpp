#include "gasfc/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "gasfc/error.hpp"
#include "gasfc/random.hpp"

namespace gasfc {

MarketSeries synthetic_exogenous(Eigen::Index n, std::uint64_t seed, Date start) {
  if (n < 1) {
    throw DomainError("synthetic_exogenous: n must be at least 1");
  }
  Rng rng(seed);
  MarketSeries s;
  s.dates = business_days(start, static_cast<std::size_t>(n));
  s.price = Eigen::VectorXd::Zero(n);
  auto walk = [&](double level, double step, double floor) {
    Eigen::VectorXd v(n);
    v[0] = level;
    for (Eigen::Index t = 1; t < n; ++t) {
      v[t] = std::max(v[t - 1] + step * rng.normal(), floor);
    }
    return v;
  };
  s.coal = walk(80.0, 1.0, 5.0);
  s.eua = walk(15.0, 0.3, 1.0);
  s.oil = walk(60.0, 1.0, 5.0);
  s.price_2ma = walk(20.0, 0.3, 1.0);
  Eigen::VectorXd power(n);
  Eigen::VectorXd temperature(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / 260.0;
    power[t] = 45.0 + 0.3 * (*s.coal)[t] - 5.0 * std::cos(phase) + 4.0 * rng.normal();
    temperature[t] = 10.0 - 8.0 * std::cos(phase) + 3.0 * rng.normal();
  }
  s.power_peak = power;
  s.temperature = temperature;
  derive_features(s);
  return s;
}

}  // namespace gasfc
