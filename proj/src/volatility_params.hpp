#pragma once

// Packing of the volatility block shared by the Day-Ahead and Month-Ahead
// parameter vectors.

#include <functional>
#include <vector>

#include "gasfc/components.hpp"
#include "gasfc/estimation.hpp"

namespace gasfc::detail {

inline void append_volatility_info(std::vector<ParameterInfo>& info, const ComponentMask& m, bool igarch) {
  info.push_back({"omega", Domain::positive(), 0.0, Alternative::two_sided, 1.0});
  if (m.enabled(Component::garch)) {
    if (igarch) {
      info.push_back({"alpha", Domain::unit_interval(), 0.0, Alternative::two_sided, 1.0});
    } else {
      info.push_back({"alpha", Domain::positive(), 0.0, Alternative::two_sided, 1.0});
      info.push_back({"beta", Domain::positive(), 0.0, Alternative::two_sided, 1.0});
    }
  }
  if (m.enabled(Component::leverage)) info.push_back({"gamma", Domain::real(), 0.0, Alternative::two_sided, 0.05});
  if (m.enabled(Component::elevation)) info.push_back({"delta", Domain::positive(), 1.0, Alternative::two_sided, 0.3});
  info.push_back({"nu", Domain::positive(), 1.0, Alternative::two_sided, 0.1});
  info.push_back({"tau", Domain::above(2.0), 4.0, Alternative::greater, 0.5});
}

inline void append_volatility(std::vector<double>& x, const VolatilityParams& v, const ComponentMask& m, bool igarch) {
  x.push_back(v.omega);
  if (m.enabled(Component::garch)) {
    x.push_back(v.alpha);
    if (!igarch) x.push_back(v.beta);
  }
  if (m.enabled(Component::leverage)) x.push_back(v.gamma);
  if (m.enabled(Component::elevation)) x.push_back(v.delta);
  x.push_back(v.nu);
  x.push_back(v.tau);
}

inline void read_volatility(VolatilityParams& v, const ComponentMask& m, bool igarch,
                            const std::function<double()>& next) {
  v.omega = next();
  if (m.enabled(Component::garch)) {
    v.alpha = next();
    v.beta = igarch ? 1.0 - v.alpha : next();
  }
  if (m.enabled(Component::leverage)) v.gamma = next();
  if (m.enabled(Component::elevation)) v.delta = next();
  v.nu = next();
  v.tau = next();
}

}  // namespace gasfc::detail
