#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "torpath/errors.hpp"
#include "torpath/geo.hpp"
#include "torpath/random.hpp"
#include "torpath/rank.hpp"
#include "torpath/relay.hpp"
#include "torpath/strategy.hpp"

namespace torpath {

// Ordered relay triple; entry/middle/exit are directory relay ids and are
// pairwise distinct.
struct Circuit {
  std::string entry;
  std::string middle;
  std::string exit;
  StrategyTag strategy = StrategyTag::Random;
};

// Diagnostics for one stage of a build. rank is the selected relay's weight
// at that stage; uniform marks the empty-history branch and the all-zero-rank
// fallback, where the pick carried no weight information.
struct StagePick {
  std::string relay_id;
  double rd = 0.0;
  double rank = 0.0;
  bool uniform = false;
};

// Stages are listed in construction order: exit first, then middle, then entry.
struct PathResult {
  Circuit circuit;
  StagePick exit_pick;
  StagePick middle_pick;
  StagePick entry_pick;
};

namespace detail {

inline void require_relays(const Directory& directory, std::size_t needed) {
  if (directory.size() < needed)
    throw InsufficientRelaysError("need at least " + std::to_string(needed) + " relays, have " +
                                  std::to_string(directory.size()));
}

inline std::vector<const Relay*> all_relays(const Directory& directory) {
  std::vector<const Relay*> out;
  out.reserve(directory.size());
  for (const Relay& r : directory.relays()) out.push_back(&r);
  return out;
}

inline void remove_relay(std::vector<const Relay*>& v, const Relay* r) {
  std::erase(v, r);
}

inline StagePick make_pick(const RankedRelay& rr, bool fallback) {
  return {rr.relay->id, rr.rd, rr.rank, fallback};
}

// Shared three-stage walk for the geometry-aware strategies. The exit is
// targeted at the history centroid (or drawn uniformly when the history is
// empty), the middle at the exit, the entry at the middle; chosen relays are
// excluded and maxima recomputed at every stage.
inline PathResult select_path_staged(const GeoPoint& source, const VisitHistory& history,
                                     const Directory& directory, RandomStream& rng,
                                     RankFormula formula, StrategyTag tag) {
  require_relays(directory, 3);
  auto candidates = all_relays(directory);

  PathResult result;
  result.circuit.strategy = tag;

  const Relay* exit_relay = nullptr;
  if (history.empty()) {
    const double u = rng.next_unit();
    exit_relay = candidates[uniform_index(candidates.size(), u)];
    result.exit_pick = {exit_relay->id, 0.0, 0.0, true};
  } else {
    const GeoPoint target = avg_geo(history);
    const auto ranked = rank_stage(candidates, formula, source, target);
    const auto pick = pick_weighted_or_uniform(ranked, rng);
    exit_relay = ranked[pick.index].relay;
    result.exit_pick = make_pick(ranked[pick.index], pick.fallback);
  }
  remove_relay(candidates, exit_relay);

  const auto middle_ranked = rank_stage(candidates, formula, source, exit_relay->geo);
  const auto middle_pick = pick_weighted_or_uniform(middle_ranked, rng);
  const Relay* middle_relay = middle_ranked[middle_pick.index].relay;
  result.middle_pick = make_pick(middle_ranked[middle_pick.index], middle_pick.fallback);
  remove_relay(candidates, middle_relay);

  const auto entry_ranked = rank_stage(candidates, formula, source, middle_relay->geo);
  const auto entry_pick = pick_weighted_or_uniform(entry_ranked, rng);
  const Relay* entry_relay = entry_ranked[entry_pick.index].relay;
  result.entry_pick = make_pick(entry_ranked[entry_pick.index], entry_pick.fallback);

  result.circuit.entry = entry_relay->id;
  result.circuit.middle = middle_relay->id;
  result.circuit.exit = exit_relay->id;
  return result;
}

}  // namespace detail

// Full composite weight: bandwidth, geometry and uptime together.
inline PathResult select_path_composite(const GeoPoint& source, const VisitHistory& history,
                                        const Directory& directory, RandomStream& rng) {
  return detail::select_path_staged(source, history, directory, rng, RankFormula::Composite,
                                    StrategyTag::Composite);
}

// Geometry alone: the same staging with rank = 1 - latency.
inline PathResult select_path_geo(const GeoPoint& source, const VisitHistory& history,
                                  const Directory& directory, RandomStream& rng) {
  return detail::select_path_staged(source, history, directory, rng, RankFormula::GeoOnly,
                                    StrategyTag::Geo);
}

// Bandwidth-and-uptime weighted sampling per position, the composite weight
// with the latency factor removed. Positions fill in exit, middle, entry
// order so draw accounting matches the other strategies.
inline PathResult select_path_default(const Directory& directory, RandomStream& rng) {
  detail::require_relays(directory, 3);
  auto candidates = detail::all_relays(directory);

  PathResult result;
  result.circuit.strategy = StrategyTag::Default;
  std::array<StagePick*, 3> picks = {&result.exit_pick, &result.middle_pick, &result.entry_pick};
  std::array<std::string*, 3> ids = {&result.circuit.exit, &result.circuit.middle,
                                     &result.circuit.entry};
  for (int stage = 0; stage < 3; ++stage) {
    const auto ranked =
        rank_stage(candidates, RankFormula::BandwidthUptime, GeoPoint{}, GeoPoint{});
    const auto pick = detail::pick_weighted_or_uniform(ranked, rng);
    const Relay* chosen = ranked[pick.index].relay;
    *picks[stage] = detail::make_pick(ranked[pick.index], pick.fallback);
    *ids[stage] = chosen->id;
    detail::remove_relay(candidates, chosen);
  }
  return result;
}

// Uniform selection without replacement; draw order mirrors the staged
// strategies (exit, middle, entry) for comparable accounting.
inline PathResult select_path_random(const Directory& directory, RandomStream& rng) {
  detail::require_relays(directory, 3);
  auto candidates = detail::all_relays(directory);

  PathResult result;
  result.circuit.strategy = StrategyTag::Random;
  std::array<StagePick*, 3> picks = {&result.exit_pick, &result.middle_pick, &result.entry_pick};
  std::array<std::string*, 3> ids = {&result.circuit.exit, &result.circuit.middle,
                                     &result.circuit.entry};
  for (int stage = 0; stage < 3; ++stage) {
    const double u = rng.next_unit();
    const Relay* chosen = candidates[detail::uniform_index(candidates.size(), u)];
    *picks[stage] = {chosen->id, 0.0, 0.0, true};
    *ids[stage] = chosen->id;
    detail::remove_relay(candidates, chosen);
  }
  return result;
}

// Strategy dispatch; random and default ignore source and history.
inline PathResult select_path(StrategyTag strategy, const GeoPoint& source,
                              const VisitHistory& history, const Directory& directory,
                              RandomStream& rng) {
  switch (strategy) {
    case StrategyTag::Random: return select_path_random(directory, rng);
    case StrategyTag::Default: return select_path_default(directory, rng);
    case StrategyTag::Geo: return select_path_geo(source, history, directory, rng);
    case StrategyTag::Composite: return select_path_composite(source, history, directory, rng);
  }
  throw ValidationError("select_path: unknown strategy");
}

// Guard pick per 120-degree bearing sector around the source, weighted by
// bandwidth, uptime and closeness. Sectors are [0,120), [120,240), [240,360)
// degrees from the +x axis.
struct GuardSelection {
  std::array<std::string, 3> guard_ids;
  // false = that sector was empty and the guard was redrawn from the full
  // directory (degraded mode).
  std::array<bool, 3> from_sector = {true, true, true};

  bool degraded() const noexcept { return !(from_sector[0] && from_sector[1] && from_sector[2]); }
};

namespace detail {

inline int bearing_sector(const GeoPoint& source, const GeoPoint& p) {
  const double rad = std::atan2(p.y - source.y, p.x - source.x);
  double deg = rad * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  int sector = static_cast<int>(deg / 120.0);
  return sector > 2 ? 2 : sector;
}

// Guard weight: bandwidth and uptime factors as in the default strategy,
// scaled by closeness to the source. Maxima are sector-local.
inline std::vector<RankedRelay> rank_guard_candidates(std::span<const Relay* const> candidates,
                                                      const GeoPoint& source) {
  std::vector<RankedRelay> ranked(candidates.size());
  double max_bw = 0.0, max_up = 0.0, max_d = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ranked[i].relay = candidates[i];
    ranked[i].rd = dist(source, candidates[i]->geo);
    max_bw = std::max(max_bw, candidates[i]->bandwidth_kbps);
    max_up = std::max(max_up, candidates[i]->uptime_s);
    max_d = std::max(max_d, ranked[i].rd);
  }
  for (auto& rr : ranked) {
    const double reliability = max_up > 0.0 ? rr.relay->uptime_s / max_up : 0.0;
    const double closeness = max_d > 0.0 ? 1.0 - rr.rd / max_d : 1.0;
    rr.rank = (rr.relay->bandwidth_kbps / max_bw) * std::log2(1.0 + reliability) * closeness;
  }
  return ranked;
}

}  // namespace detail

inline GuardSelection select_entry_guards(const GeoPoint& source, const Directory& directory,
                                          RandomStream& rng) {
  detail::require_relays(directory, 3);

  std::array<std::vector<const Relay*>, 3> sectors;
  for (const Relay& r : directory.relays())
    sectors[detail::bearing_sector(source, r.geo)].push_back(&r);

  GuardSelection out;
  std::vector<const Relay*> chosen;
  for (int s = 0; s < 3; ++s) {
    if (sectors[s].empty()) continue;
    const auto ranked = detail::rank_guard_candidates(sectors[s], source);
    const auto pick = detail::pick_weighted_or_uniform(ranked, rng);
    out.guard_ids[s] = ranked[pick.index].relay->id;
    chosen.push_back(ranked[pick.index].relay);
  }
  // Empty sectors degrade to a redraw over everything not yet chosen.
  for (int s = 0; s < 3; ++s) {
    if (!sectors[s].empty()) continue;
    out.from_sector[s] = false;
    std::vector<const Relay*> rest;
    for (const Relay& r : directory.relays())
      if (std::find(chosen.begin(), chosen.end(), &r) == chosen.end()) rest.push_back(&r);
    const auto ranked = detail::rank_guard_candidates(rest, source);
    const auto pick = detail::pick_weighted_or_uniform(ranked, rng);
    out.guard_ids[s] = ranked[pick.index].relay->id;
    chosen.push_back(ranked[pick.index].relay);
  }
  return out;
}

}  // namespace torpath
