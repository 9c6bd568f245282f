#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "torpath/errors.hpp"
#include "torpath/geo.hpp"

namespace torpath {

// One row of the consensus snapshot clients select from. bandwidth_kbps is
// the consensus value, min(upload, download), in KB/s (1 KB = 1024 bytes).
struct Relay {
  std::string id;
  GeoPoint geo;
  double bandwidth_kbps = 0.0;
  double uptime_s = 0.0;
};

// Ordered relay list. Iteration order is file order and is part of the
// contract; validation is eager so uses never re-check.
class Directory {
 public:
  explicit Directory(std::vector<Relay> relays) : relays_(std::move(relays)) {
    if (relays_.empty()) throw ValidationError("directory: must contain at least one relay");
    std::unordered_set<std::string_view> seen;
    seen.reserve(relays_.size());
    for (std::size_t i = 0; i < relays_.size(); ++i) {
      const Relay& r = relays_[i];
      if (r.id.empty())
        throw ValidationError("directory: relay " + std::to_string(i) + " has an empty id");
      if (!seen.insert(r.id).second)
        throw ValidationError("directory: duplicate relay id \"" + r.id + "\"");
      if (!is_finite(r.geo))
        throw ValidationError("directory: relay \"" + r.id + "\" has non-finite coordinates");
      if (!(r.bandwidth_kbps > 0.0))
        throw ValidationError("directory: relay \"" + r.id + "\" bandwidth must be positive");
      if (!(r.uptime_s >= 0.0))
        throw ValidationError("directory: relay \"" + r.id + "\" uptime must be non-negative");
    }
  }

  const std::vector<Relay>& relays() const noexcept { return relays_; }
  std::size_t size() const noexcept { return relays_.size(); }
  const Relay& at(std::size_t i) const { return relays_.at(i); }

  const Relay* find(std::string_view id) const noexcept {
    for (const Relay& r : relays_)
      if (r.id == id) return &r;
    return nullptr;
  }

 private:
  std::vector<Relay> relays_;
};

}  // namespace torpath
