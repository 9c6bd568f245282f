#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "torpath/errors.hpp"

namespace torpath {

// Planar coordinate in abstract latency units: 1 unit = 1 ms one-way.
// The selector and the simulator share this convention.
struct GeoPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline bool is_finite(const GeoPoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

// Euclidean distance; doubles as the node pair's one-way latency estimate.
inline double dist(const GeoPoint& a, const GeoPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// One aggregated destination: where and how often.
struct VisitEntry {
  GeoPoint point;
  std::uint64_t count = 1;
};

// Per-client multiset of visited destination coordinates. Identical points
// may appear in multiple entries; the centroid treats them independently.
class VisitHistory {
 public:
  VisitHistory() = default;

  explicit VisitHistory(std::vector<VisitEntry> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) {
      if (e.count < 1) throw ValidationError("history entry count must be >= 1");
      if (!is_finite(e.point)) throw ValidationError("history entry coordinates must be finite");
    }
  }

  void add(const GeoPoint& p, std::uint64_t count = 1) {
    if (count < 1) throw ValidationError("history entry count must be >= 1");
    if (!is_finite(p)) throw ValidationError("history entry coordinates must be finite");
    entries_.push_back({p, count});
  }

  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<VisitEntry>& entries() const noexcept { return entries_; }

 private:
  std::vector<VisitEntry> entries_;
};

// Count-weighted centroid of the visited destinations.
inline GeoPoint avg_geo(const VisitHistory& history) {
  if (history.empty()) throw EmptyHistoryError("avg_geo: empty history");
  double sx = 0.0, sy = 0.0;
  double total = 0.0;
  for (const auto& e : history.entries()) {
    const auto c = static_cast<double>(e.count);
    sx += e.point.x * c;
    sy += e.point.y * c;
    total += c;
  }
  return {sx / total, sy / total};
}

}  // namespace torpath
