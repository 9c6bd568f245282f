#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "torpath/bandwidth_profile.hpp"
#include "torpath/errors.hpp"
#include "torpath/geo.hpp"
#include "torpath/random.hpp"
#include "torpath/relay.hpp"

namespace torpath {

// A relay as the simulator sees it: the consensus row plus the actual
// uplink/downlink its host provides. Institutional hosts are symmetric;
// residential hosts download at twice their upload speed, so the consensus
// value min(up, down) equals the uplink either way.
struct RelayNode {
  Relay relay;
  bool institutional = false;
  double up_kbps = 0.0;
  double down_kbps = 0.0;
};

struct ServerNode {
  std::string id;
  GeoPoint geo;
  double up_kbps = 0.0;
  double down_kbps = 0.0;
};

// Relay and web-server population over a square region. Links are an
// implicit full mesh; a pair's propagation delay is its coordinate distance
// (1 unit = 1 ms one-way).
struct Topology {
  std::vector<RelayNode> relays;
  std::vector<ServerNode> servers;
  double region_units = 0.0;
};

struct TopologyParams {
  int relay_count = 50;
  int server_count = 50;
  double region_units = 300.0;
  double server_kbps = 10240.0;  // 10 MB/s symmetric, a documented default
};

namespace detail {

constexpr double kMinUptimeS = 3600.0;          // one hour
constexpr double kMaxUptimeS = 60.0 * 86400.0;  // sixty days

inline double log_uniform(double lo, double hi, double u) {
  return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
}

}  // namespace detail

// Deterministic synthetic population: node placement is uniform over the
// region, consensus bandwidths come from the profile's inverse CDF, uptimes
// are log-uniform between one hour and sixty days and correlate with the
// bandwidth quantile (fast relays are the long-lived, professionally run
// ones), and every tenth relay (by index) is institutional, which pins the
// split at 10% exactly.
inline Topology generate_topology(const TopologyParams& params, std::uint64_t seed,
                                  const BandwidthProfile& profile) {
  if (params.relay_count < 1 || params.server_count < 1)
    throw ValidationError("generate_topology: relay and server counts must be >= 1");
  if (!(params.region_units > 0.0))
    throw ValidationError("generate_topology: region size must be positive");
  if (!(params.server_kbps > 0.0))
    throw ValidationError("generate_topology: server capacity must be positive");

  RandomStream root(seed);
  RandomStream place = root.split(1);
  RandomStream bandwidth = root.split(2);
  RandomStream uptime = root.split(3);
  RandomStream server_place = root.split(4);

  Topology topo;
  topo.region_units = params.region_units;
  topo.relays.reserve(static_cast<std::size_t>(params.relay_count));
  for (int i = 0; i < params.relay_count; ++i) {
    RelayNode node;
    node.relay.id = "r" + std::to_string(i);
    node.relay.geo = {place.next_unit() * params.region_units,
                      place.next_unit() * params.region_units};
    const double bw_quantile = bandwidth.next_unit();
    node.relay.bandwidth_kbps = profile.sample_kbps(bw_quantile);
    const double up_quantile = 0.7 * bw_quantile + 0.3 * uptime.next_unit();
    node.relay.uptime_s =
        detail::log_uniform(detail::kMinUptimeS, detail::kMaxUptimeS, up_quantile);
    node.institutional = (i % 10 == 0);
    node.up_kbps = node.relay.bandwidth_kbps;
    node.down_kbps = node.institutional ? node.relay.bandwidth_kbps
                                        : 2.0 * node.relay.bandwidth_kbps;
    topo.relays.push_back(std::move(node));
  }
  topo.servers.reserve(static_cast<std::size_t>(params.server_count));
  for (int i = 0; i < params.server_count; ++i) {
    ServerNode node;
    node.id = "s" + std::to_string(i);
    node.geo = {server_place.next_unit() * params.region_units,
                server_place.next_unit() * params.region_units};
    node.up_kbps = params.server_kbps;
    node.down_kbps = params.server_kbps;
    topo.servers.push_back(std::move(node));
  }
  return topo;
}

// The consensus snapshot selection draws from: one row per relay, file order.
inline Directory make_directory(const Topology& topo) {
  std::vector<Relay> relays;
  relays.reserve(topo.relays.size());
  for (const RelayNode& n : topo.relays) relays.push_back(n.relay);
  return Directory(std::move(relays));
}

}  // namespace torpath
