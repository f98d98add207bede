#pragma once

// Synthetic exogenous inputs for simulation studies.

#include <cstdint>

#include "gasfc/market_series.hpp"

namespace gasfc {

/// n business days from `start` with random-walk coal, EUA, peak power, oil
/// and Two-Month-Ahead columns and a seasonal temperature with noise. The
/// price column is zero; derived features are computed.
MarketSeries synthetic_exogenous(Eigen::Index n, std::uint64_t seed, Date start = parse_date("2012-01-02"));

}  // namespace gasfc
