#include "gasfc/distribution.hpp"

namespace gasfc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

boost::math::students_t_distribution<double> standard_t(const StudentTDist& t) {
  return boost::math::students_t_distribution<double>(t.df);
}

}  // namespace

Family family_of(const ForecastDistribution& d) {
  return std::visit(overloaded{[](const Sst&) { return Family::sst; },
                               [](const NormalDist&) { return Family::normal; },
                               [](const StudentTDist&) { return Family::student_t; }},
                    d);
}

std::string to_string(Family f) {
  switch (f) {
    case Family::sst:
      return "sst";
    case Family::normal:
      return "normal";
    case Family::student_t:
      return "student_t";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "sst") return Family::sst;
  if (name == "normal") return Family::normal;
  if (name == "student_t" || name == "t") return Family::student_t;
  throw DomainError("unknown distribution family '" + name + "'");
}

double pdf(const ForecastDistribution& d, double x) {
  return std::visit(overloaded{[x](const Sst& p) { return sst_pdf(x, p); },
                               [x](const NormalDist& n) { return normal_pdf((x - n.mean) / n.sd) / n.sd; },
                               [x](const StudentTDist& t) {
                                 return boost::math::pdf(standard_t(t), (x - t.location) / t.scale) / t.scale;
                               }},
                    d);
}

double cdf(const ForecastDistribution& d, double x) {
  if (std::isnan(x)) {
    throw DomainError("cdf: x is NaN");
  }
  if (std::isinf(x)) {
    return x < 0 ? 0.0 : 1.0;
  }
  return std::visit(overloaded{[x](const Sst& p) { return sst_cdf(x, p); },
                               [x](const NormalDist& n) { return normal_cdf((x - n.mean) / n.sd); },
                               [x](const StudentTDist& t) {
                                 return boost::math::cdf(standard_t(t), (x - t.location) / t.scale);
                               }},
                    d);
}

double quantile(const ForecastDistribution& d, double q) {
  if (!(q > 0 && q < 1)) {
    throw DomainError("quantile: probability must lie in (0, 1)");
  }
  return std::visit(
      overloaded{[q](const Sst& p) { return sst_quantile(p, q); },
                 [q](const NormalDist& n) {
                   return n.mean + n.sd * boost::math::quantile(boost::math::normal_distribution<double>(), q);
                 },
                 [q](const StudentTDist& t) { return t.location + t.scale * boost::math::quantile(standard_t(t), q); }},
      d);
}

double mean(const ForecastDistribution& d) {
  return std::visit(overloaded{[](const Sst& p) { return p.mu(); }, [](const NormalDist& n) { return n.mean; },
                               [](const StudentTDist& t) { return t.location; }},
                    d);
}

double median(const ForecastDistribution& d) {
  // Quantile path for every family so median-based and pinball(0.5) scores agree bit-for-bit.
  return quantile(d, 0.5);
}

ForecastDistribution relocated(const ForecastDistribution& d, double location) {
  return std::visit(overloaded{[location](const Sst& p) -> ForecastDistribution {
                                 return Sst(location, p.sigma(), p.nu(), p.tau());
                               },
                               [location](const NormalDist& n) -> ForecastDistribution {
                                 return NormalDist(location, n.sd);
                               },
                               [location](const StudentTDist& t) -> ForecastDistribution {
                                 return StudentTDist(location, t.scale, t.df);
                               }},
                    d);
}

}  // namespace gasfc
