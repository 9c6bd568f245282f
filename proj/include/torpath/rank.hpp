#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "torpath/errors.hpp"
#include "torpath/geo.hpp"
#include "torpath/random.hpp"
#include "torpath/relay.hpp"

namespace torpath {

// Latency proxy for a candidate sitting between the two stage endpoints:
// distance to the source plus distance to the stage target.
inline double relative_distance(const GeoPoint& candidate, const GeoPoint& source,
                                const GeoPoint& target) {
  return dist(candidate, source) + dist(candidate, target);
}

struct RankedRelay {
  const Relay* relay = nullptr;
  double rd = 0.0;
  double rank = 0.0;
};

// Selection weight in [0,1]:
//     perf * (1 - latency) * log2(1 + reliability)
// with perf = bandwidth / max bandwidth, latency = rd / max rd and
// reliability = uptime / max uptime over the candidate set being ranked.
// A zero max_rd means all candidates are collocated and latency is 0 for
// everyone; a zero max_uptime zeroes the reliability factor (and the rank).
inline double rank(const Relay& relay, double rd, double max_bandwidth_kbps, double max_rd,
                   double max_uptime_s) {
  if (!(max_bandwidth_kbps > 0.0)) throw std::domain_error("rank: max bandwidth must be positive");
  const double perf = relay.bandwidth_kbps / max_bandwidth_kbps;
  const double latency = max_rd > 0.0 ? rd / max_rd : 0.0;
  const double reliability = max_uptime_s > 0.0 ? relay.uptime_s / max_uptime_s : 0.0;
  if (perf > 1.0 || latency > 1.0 || reliability > 1.0 || latency < 0.0)
    throw std::domain_error("rank: normalization ratio outside [0,1]; stage maxima understated");
  return perf * (1.0 - latency) * std::log2(1.0 + reliability);
}

// Which factors a strategy keeps from the full composite weight.
enum class RankFormula {
  Composite,        // perf * (1 - latency) * log2(1 + reliability)
  BandwidthUptime,  // perf * log2(1 + reliability)      (latency factor removed)
  GeoOnly,          // 1 - latency                        (geometry alone)
};

// Ranks every candidate for one selection stage. Maxima are recomputed over
// exactly the candidates passed in, so exclusions from earlier stages keep
// every normalization ratio inside [0,1].
inline std::vector<RankedRelay> rank_stage(std::span<const Relay* const> candidates,
                                           RankFormula formula, const GeoPoint& source,
                                           const GeoPoint& target) {
  if (candidates.empty()) throw ValidationError("rank_stage: empty candidate set");
  const bool uses_distance = formula != RankFormula::BandwidthUptime;
  std::vector<RankedRelay> ranked(candidates.size());
  double max_bw = 0.0, max_rd = 0.0, max_up = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Relay* r = candidates[i];
    ranked[i].relay = r;
    ranked[i].rd = uses_distance ? relative_distance(r->geo, source, target) : 0.0;
    max_bw = std::max(max_bw, r->bandwidth_kbps);
    max_rd = std::max(max_rd, ranked[i].rd);
    max_up = std::max(max_up, r->uptime_s);
  }
  for (auto& rr : ranked) {
    switch (formula) {
      case RankFormula::Composite:
        rr.rank = rank(*rr.relay, rr.rd, max_bw, max_rd, max_up);
        break;
      case RankFormula::BandwidthUptime: {
        const double reliability = max_up > 0.0 ? rr.relay->uptime_s / max_up : 0.0;
        rr.rank = (rr.relay->bandwidth_kbps / max_bw) * std::log2(1.0 + reliability);
        break;
      }
      case RankFormula::GeoOnly:
        rr.rank = max_rd > 0.0 ? 1.0 - rr.rd / max_rd : 1.0;
        break;
    }
  }
  return ranked;
}

// Cumulative-sum walk: u in [0,1) scaled by the rank total picks index i iff
// u*total falls within i's rank interval. Zero-rank candidates are skipped,
// so they are never selected while any positive rank exists. The induced
// distribution is P(i) = rank_i / total regardless of candidate order.
inline std::size_t pick_by_rank(std::span<const RankedRelay> candidates, double u) {
  if (candidates.empty()) throw ValidationError("pick_by_rank: empty candidate set");
  double total = 0.0;
  for (const auto& c : candidates) {
    if (!(c.rank >= 0.0) || !std::isfinite(c.rank))
      throw std::domain_error("pick_by_rank: ranks must be finite and non-negative");
    total += c.rank;
  }
  if (!(total > 0.0)) throw std::domain_error("pick_by_rank: all ranks are zero");
  double x = u * total;
  std::size_t last_positive = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double r = candidates[i].rank;
    if (r <= 0.0) continue;
    last_positive = i;
    if (x < r) return i;
    x -= r;
  }
  return last_positive;  // guards the walk against accumulated rounding
}

// Draws exactly one uniform; validates before drawing so the stream position
// is untouched when the candidate set is unusable.
inline const Relay* select_by_rank(std::span<const RankedRelay> candidates, RandomStream& rng) {
  if (candidates.empty()) throw ValidationError("select_by_rank: empty candidate set");
  double total = 0.0;
  for (const auto& c : candidates) {
    if (!(c.rank >= 0.0) || !std::isfinite(c.rank))
      throw std::domain_error("select_by_rank: ranks must be finite and non-negative");
    total += c.rank;
  }
  if (!(total > 0.0)) throw std::domain_error("select_by_rank: all ranks are zero");
  return candidates[pick_by_rank(candidates, rng.next_unit())].relay;
}

namespace detail {

inline std::size_t uniform_index(std::size_t n, double u) {
  const auto i = static_cast<std::size_t>(u * static_cast<double>(n));
  return i < n ? i : n - 1;
}

struct WeightedPick {
  std::size_t index = 0;
  bool fallback = false;  // all ranks were zero; fell back to a uniform pick
};

// One uniform draw per call, weighted when possible, uniform otherwise.
inline WeightedPick pick_weighted_or_uniform(std::span<const RankedRelay> candidates,
                                             RandomStream& rng) {
  double total = 0.0;
  for (const auto& c : candidates) total += c.rank;
  const double u = rng.next_unit();
  if (total > 0.0) return {pick_by_rank(candidates, u), false};
  return {uniform_index(candidates.size(), u), true};
}

}  // namespace detail

}  // namespace torpath
