#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "torpath/errors.hpp"

namespace torpath {

// Max-min fair rate allocation by progressive filling. flows[i] lists the
// indices of the capacity slots flow i traverses (the simulator uses one
// slot per node uplink and downlink). All unfrozen flows rise together;
// flows crossing a saturated slot freeze at the current level.
inline std::vector<double> max_min_rates(const std::vector<std::vector<std::size_t>>& flows,
                                         std::span<const double> capacity) {
  for (const double c : capacity)
    if (!(c > 0.0) || !std::isfinite(c))
      throw ValidationError("max_min_rates: capacities must be positive and finite");
  for (const auto& f : flows) {
    if (f.empty()) throw ValidationError("max_min_rates: a flow must traverse at least one slot");
    for (const std::size_t r : f)
      if (r >= capacity.size()) throw ValidationError("max_min_rates: slot index out of range");
  }

  std::vector<double> rate(flows.size(), 0.0);
  std::vector<double> remaining(capacity.begin(), capacity.end());
  std::vector<std::size_t> load(capacity.size(), 0);  // unfrozen flows per slot
  std::vector<char> frozen(flows.size(), 0);

  for (const auto& f : flows)
    for (const std::size_t r : f) ++load[r];

  double level = 0.0;
  std::size_t active = flows.size();
  while (active > 0) {
    double inc = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < remaining.size(); ++r)
      if (load[r] > 0) inc = std::min(inc, remaining[r] / static_cast<double>(load[r]));
    level += inc;
    for (std::size_t r = 0; r < remaining.size(); ++r)
      if (load[r] > 0) remaining[r] -= inc * static_cast<double>(load[r]);

    // Freeze every flow that crosses a slot that just ran out.
    for (std::size_t i = 0; i < flows.size(); ++i) {
      if (frozen[i]) continue;
      bool saturated = false;
      for (const std::size_t r : flows[i])
        if (remaining[r] <= capacity[r] * 1e-12) saturated = true;
      if (!saturated) continue;
      frozen[i] = 1;
      rate[i] = level;
      --active;
      for (const std::size_t r : flows[i]) --load[r];
    }
  }
  return rate;
}

}  // namespace torpath
