#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "torpath/simulation.hpp"
#include "torpath/topology.hpp"

using torpath::BandwidthProfile;
using torpath::Directory;
using torpath::GeoPoint;
using torpath::RelayNode;
using torpath::ServerNode;
using torpath::SimConfig;
using torpath::SimResult;
using torpath::StrategyTag;
using torpath::Topology;

namespace {

// Three collinear relays, one server, and a client pinned (by a vanishing
// placement region) to the origin, so every path length is closed-form.
Topology line_topology(double relay_kbps) {
  Topology topo;
  topo.region_units = 1e-9;
  const double xs[3] = {100, 200, 300};
  for (int i = 0; i < 3; ++i) {
    RelayNode n;
    n.relay = testutil::relay("r" + std::to_string(i), xs[i], 0, relay_kbps, 3600 * (i + 1));
    n.institutional = true;
    n.up_kbps = relay_kbps;
    n.down_kbps = relay_kbps;
    topo.relays.push_back(n);
  }
  topo.servers.push_back(ServerNode{"s0", {400, 0}, 10240, 10240});
  return topo;
}

double path_propagation_s(const Topology& topo, const torpath::CircuitRecord& c,
                          const GeoPoint& client, const GeoPoint& server) {
  auto geo = [&](const std::string& id) {
    for (const auto& r : topo.relays)
      if (r.relay.id == id) return r.relay.geo;
    REQUIRE(false);
    return GeoPoint{};
  };
  const GeoPoint e = geo(c.entry), m = geo(c.middle), x = geo(c.exit);
  return (torpath::dist(client, e) + torpath::dist(e, m) + torpath::dist(m, x) +
          torpath::dist(x, server)) /
         1000.0;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("idle network: ttfb is the round trip and duration adds the bottleneck time") {
  const Topology topo = line_topology(100.0);  // 100 KB/s relay bottleneck
  const Directory dir = make_directory(topo);
  SimConfig config;
  config.seed = 11;
  config.strategy = StrategyTag::Default;
  config.total_clients = 1;
  config.duration_s = 4000.0;
  config.backup_circuits = 0;

  const SimResult result = torpath::run_simulation(config, dir, topo);
  REQUIRE(result.transfers.size() > 50);

  const GeoPoint client{0, 0};  // region is degenerate
  int clean_ttfb = 0;
  for (const auto& rec : result.transfers) {
    REQUIRE(rec.circuit >= 0);
    const auto& circ = result.circuits[static_cast<std::size_t>(rec.circuit)];
    const double prop2 = 2.0 * path_propagation_s(topo, circ, client, topo.servers[0].geo);
    CHECK(rec.ttfb_s >= prop2 - 1e-9);
    if (std::abs(rec.ttfb_s - prop2) < 1e-3) ++clean_ttfb;

    // single flow, so the rate is exactly the relay bottleneck
    const double transfer_s = static_cast<double>(rec.bytes) / (100.0 * 1024.0);
    CHECK(rec.duration_s == doctest::Approx(rec.ttfb_s + transfer_s).epsilon(0.02));
  }
  // requests issued while a fresh circuit is still building are the only
  // ones allowed to wait
  CHECK(clean_ttfb >= static_cast<int>(result.transfers.size() * 9 / 10));
}

TEST_CASE("zero duration produces no records") {
  const Topology topo = line_topology(100.0);
  SimConfig config;
  config.total_clients = 1;
  config.duration_s = 0.0;
  const SimResult result = torpath::run_simulation(config, make_directory(topo), topo);
  CHECK(result.transfers.empty());
}

TEST_CASE("records arrive in non-decreasing completion order") {
  torpath::TopologyParams params;
  params.relay_count = 20;
  const Topology topo = generate_topology(params, 31, BandwidthProfile::consensus_2012());
  SimConfig config;
  config.seed = 31;
  config.strategy = StrategyTag::Random;
  config.total_clients = 10;
  config.duration_s = 2500.0;
  const SimResult result = torpath::run_simulation(config, make_directory(topo), topo);
  REQUIRE(!result.transfers.empty());
  for (std::size_t i = 1; i < result.transfers.size(); ++i)
    CHECK(result.transfers[i].completed_at_s() >= result.transfers[i - 1].completed_at_s());
}

TEST_CASE("identical configs give identical results") {
  torpath::TopologyParams params;
  params.relay_count = 15;
  const Topology topo = generate_topology(params, 5, BandwidthProfile::consensus_2012());
  const Directory dir = make_directory(topo);
  SimConfig config;
  config.seed = 5;
  config.strategy = StrategyTag::Composite;
  config.total_clients = 6;
  config.duration_s = 2000.0;

  const SimResult a = torpath::run_simulation(config, dir, topo);
  const SimResult b = torpath::run_simulation(config, dir, topo);
  REQUIRE(a.transfers.size() == b.transfers.size());
  REQUIRE(a.circuits.size() == b.circuits.size());
  for (std::size_t i = 0; i < a.transfers.size(); ++i) {
    CHECK(a.transfers[i].client == b.transfers[i].client);
    CHECK(a.transfers[i].bytes == b.transfers[i].bytes);
    CHECK(a.transfers[i].ttfb_s == b.transfers[i].ttfb_s);
    CHECK(a.transfers[i].duration_s == b.transfers[i].duration_s);
  }
  for (std::size_t i = 0; i < a.circuits.size(); ++i) {
    CHECK(a.circuits[i].entry == b.circuits[i].entry);
    CHECK(a.circuits[i].built_at_s == b.circuits[i].built_at_s);
    CHECK(a.circuits[i].used == b.circuits[i].used);
  }
}

TEST_CASE("active circuits are rebuilt exactly one lifetime apart") {
  torpath::TopologyParams params;
  params.relay_count = 12;
  const Topology topo = generate_topology(params, 77, BandwidthProfile::consensus_2012());
  SimConfig config;
  config.seed = 77;
  config.strategy = StrategyTag::Geo;
  config.total_clients = 4;
  config.duration_s = 3000.0;
  config.circuit_lifetime_s = 600.0;
  config.backup_circuits = 0;  // every log row is an active circuit
  const SimResult result = torpath::run_simulation(config, make_directory(topo), topo);

  std::map<int, std::vector<double>> built;
  for (const auto& c : result.circuits) built[c.client].push_back(c.built_at_s);
  REQUIRE(built.size() == 4);
  for (const auto& [client, times] : built) {
    REQUIRE(times.size() == 6);  // t = 0, 600, ..., 3000
    for (std::size_t k = 0; k < times.size(); ++k)
      CHECK(times[k] == doctest::Approx(600.0 * static_cast<double>(k)));
  }
}

TEST_CASE("backup circuits are logged but only the active one carries traffic") {
  const Topology topo = line_topology(500.0);
  SimConfig config;
  config.total_clients = 1;
  config.duration_s = 599.0;  // a single rotation
  config.backup_circuits = 2;
  const SimResult result = torpath::run_simulation(config, make_directory(topo), topo);
  REQUIRE(result.circuits.size() == 3);
  CHECK(result.circuits[0].used);
  CHECK_FALSE(result.circuits[1].used);
  CHECK_FALSE(result.circuits[2].used);
}

TEST_CASE("composite circuits have at least the bottleneck bandwidth of random ones") {
  torpath::TopologyParams params;
  const Topology topo = generate_topology(params, 2029, BandwidthProfile::consensus_2012());
  const Directory dir = make_directory(topo);

  auto mean_bottleneck = [&](StrategyTag strategy) {
    SimConfig config;
    config.seed = 2029;
    config.strategy = strategy;
    config.total_clients = 20;
    config.duration_s = 2400.0;
    const SimResult result = torpath::run_simulation(config, dir, topo);
    double sum = 0;
    for (const auto& c : result.circuits) {
      const double bw = std::min({dir.find(c.entry)->bandwidth_kbps,
                                  dir.find(c.middle)->bandwidth_kbps,
                                  dir.find(c.exit)->bandwidth_kbps});
      sum += bw;
    }
    return sum / static_cast<double>(result.circuits.size());
  };

  CHECK(mean_bottleneck(StrategyTag::Composite) >= mean_bottleneck(StrategyTag::Random));
}

TEST_CASE("web and bulk clients draw from their own size menus") {
  torpath::TopologyParams params;
  params.relay_count = 10;
  // fast relays so even a 50 MB bulk file completes within the run
  const BandwidthProfile fast({{0.0, 800.0}, {1.0, 3000.0}});
  const Topology topo = generate_topology(params, 9, fast);
  SimConfig config;
  config.seed = 9;
  config.strategy = StrategyTag::Default;
  config.total_clients = 15;  // smallest population with one bulk client
  config.duration_s = 1500.0;
  const SimResult result = torpath::run_simulation(config, make_directory(topo), topo);

  const std::set<std::uint64_t> web_sizes = {3 * 1024, 12 * 1024, 82 * 1024, 276 * 1024,
                                             911 * 1024};
  const std::set<std::uint64_t> bulk_sizes = {1ULL << 20, 5ULL << 20, 10ULL << 20, 20ULL << 20,
                                              50ULL << 20};
  bool saw_bulk = false, saw_web = false;
  for (const auto& rec : result.transfers) {
    if (rec.kind == torpath::ClientKind::Bulk) {
      CHECK(bulk_sizes.count(rec.bytes) == 1);
      saw_bulk = true;
    } else {
      CHECK(web_sizes.count(rec.bytes) == 1);
      saw_web = true;
    }
  }
  CHECK(saw_bulk);
  CHECK(saw_web);
}

TEST_CASE("configuration and directory mismatches are rejected up front") {
  const Topology topo = line_topology(100.0);
  const Directory dir = make_directory(topo);
  SimConfig config;
  config.total_clients = 1;
  config.duration_s = 100.0;

  SimConfig bad = config;
  bad.total_clients = 0;
  CHECK_THROWS_AS(torpath::run_simulation(bad, dir, topo), torpath::ValidationError);
  bad = config;
  bad.circuit_lifetime_s = 0.0;
  CHECK_THROWS_AS(torpath::run_simulation(bad, dir, topo), torpath::ValidationError);
  bad = config;
  bad.backup_circuits = -1;
  CHECK_THROWS_AS(torpath::run_simulation(bad, dir, topo), torpath::ValidationError);

  const Directory stranger({testutil::relay("zz", 0, 0, 10, 10),
                            testutil::relay("r0", 100, 0, 100, 3600),
                            testutil::relay("r1", 200, 0, 100, 7200)});
  CHECK_THROWS_AS(torpath::run_simulation(config, stranger, topo), torpath::ValidationError);
}

}  // TEST_SUITE
