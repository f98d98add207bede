#pragma once

#include <string>
#include <variant>

#include "gasfc/sst.hpp"

namespace gasfc {

/// One-step-ahead predictive law.
using ForecastDistribution = std::variant<Sst, NormalDist, StudentTDist>;

enum class Family { sst, normal, student_t };

Family family_of(const ForecastDistribution& d);
std::string to_string(Family f);
Family family_from_string(const std::string& name);

double pdf(const ForecastDistribution& d, double x);
double cdf(const ForecastDistribution& d, double x);
double quantile(const ForecastDistribution& d, double q);
double mean(const ForecastDistribution& d);
double median(const ForecastDistribution& d);

/// Same law moved to a new location (mean for SST/Normal, center for t).
ForecastDistribution relocated(const ForecastDistribution& d, double location);

}  // namespace gasfc
