#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "torpath/errors.hpp"
#include "torpath/json_io.hpp"

namespace torpath {

// Empirical consensus-bandwidth distribution sampled by piecewise-linear
// inverse-CDF: a uniform u maps to the bandwidth at cumulative fraction u.
class BandwidthProfile {
 public:
  struct Point {
    double cumulative;  // in [0,1], strictly increasing, first 0, last 1
    double kbps;        // positive, non-decreasing
  };

  explicit BandwidthProfile(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw ValidationError("bandwidth profile: need at least two points");
    if (points_.front().cumulative != 0.0 || points_.back().cumulative != 1.0)
      throw ValidationError("bandwidth profile: cumulative range must span [0,1]");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!(points_[i].kbps > 0.0))
        throw ValidationError("bandwidth profile: bandwidths must be positive");
      if (i > 0 && !(points_[i].cumulative > points_[i - 1].cumulative))
        throw ValidationError("bandwidth profile: cumulative fractions must strictly increase");
      if (i > 0 && points_[i].kbps < points_[i - 1].kbps)
        throw ValidationError("bandwidth profile: bandwidths must be non-decreasing");
    }
  }

  // Stand-in for the June 2012 consensus population after systematic
  // sampling: most relays sit in the tens of KB/s while a short fast tail
  // carries a large share of the total capacity. Values are the sampled
  // population's shape scaled to the 90-client desk population, one tenth
  // of the reference client count, preserving the demand-to-capacity ratio.
  static BandwidthProfile consensus_2012() {
    return BandwidthProfile({{0.00, 2.5},
                             {0.10, 5.0},
                             {0.25, 10.0},
                             {0.50, 20.0},
                             {0.70, 40.0},
                             {0.85, 80.0},
                             {0.93, 160.0},
                             {0.98, 350.0},
                             {1.00, 500.0}});
  }

  // Profile file: JSON {"points": [[cumulative, kbps], ...]}.
  static BandwidthProfile load(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    const nlohmann::json doc = detail::parse_json(text, path.string());
    if (!doc.is_object() || !doc.contains("points") || !doc.at("points").is_array())
      throw ParseError(path.string() + ": expected an object with a \"points\" array");
    std::vector<Point> points;
    for (const auto& row : doc.at("points")) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
        throw ParseError(path.string() + ": each point must be a [cumulative, kbps] pair");
      points.push_back({row[0].get<double>(), row[1].get<double>()});
    }
    try {
      return BandwidthProfile(std::move(points));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
  }

  double sample_kbps(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    auto hi = std::upper_bound(points_.begin(), points_.end(), u,
                               [](double v, const Point& p) { return v < p.cumulative; });
    if (hi == points_.begin()) return points_.front().kbps;
    if (hi == points_.end()) return points_.back().kbps;
    const Point& a = *(hi - 1);
    const Point& b = *hi;
    const double t = (u - a.cumulative) / (b.cumulative - a.cumulative);
    return a.kbps + t * (b.kbps - a.kbps);
  }

  const std::vector<Point>& points() const noexcept { return points_; }

 private:
  std::vector<Point> points_;
};

}  // namespace torpath
