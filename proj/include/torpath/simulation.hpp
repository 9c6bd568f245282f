#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "torpath/errors.hpp"
#include "torpath/fluid.hpp"
#include "torpath/geo.hpp"
#include "torpath/path_selection.hpp"
#include "torpath/random.hpp"
#include "torpath/relay.hpp"
#include "torpath/roster.hpp"
#include "torpath/strategy.hpp"
#include "torpath/topology.hpp"

namespace torpath {

struct SimConfig {
  std::uint64_t seed = 1;
  StrategyTag strategy = StrategyTag::Composite;
  int total_clients = 90;
  double duration_s = 7200.0;
  double circuit_lifetime_s = 600.0;
  int backup_circuits = 2;
  // With use_history false the selector always sees an empty visit history.
  // Under uniformly random destinations the accumulated centroid collapses
  // to the region centre and carries no per-client signal anyway.
  bool use_history = true;
};

struct TransferRecord {
  int client = 0;
  ClientKind kind = ClientKind::Web;
  std::uint64_t bytes = 0;
  double ttfb_s = 0.0;
  double duration_s = 0.0;
  double issued_at_s = 0.0;
  int circuit = -1;  // row index into the circuit log

  double completed_at_s() const { return issued_at_s + duration_s; }
  double throughput_kbps() const { return static_cast<double>(bytes) / 1024.0 / duration_s; }
};

struct CircuitRecord {
  int client = 0;
  std::string entry;
  std::string middle;
  std::string exit;
  double built_at_s = 0.0;
  bool used = false;
};

struct SimResult {
  std::vector<TransferRecord> transfers;  // sorted by completion time
  std::vector<CircuitRecord> circuits;    // build order
};

namespace detail {

constexpr std::uint64_t kLaneClientPositions = 101;
constexpr std::uint64_t kLaneClientBehavior = 102;
constexpr std::uint64_t kLaneClientCircuits = 103;

constexpr std::array<double, 5> kWebPageKib = {3, 12, 82, 276, 911};
constexpr std::array<double, 5> kBulkFileMib = {1, 5, 10, 20, 50};

// Deterministic fluid-flow event loop. Time advances between transfer
// boundaries and client timers; rates are max-min fair shares of node
// uplink/downlink capacities, recomputed whenever the flow set changes.
class Simulation {
 public:
  Simulation(const SimConfig& config, const Directory& directory, const Topology& topology)
      : cfg_(config), topo_(topology) {
    if (cfg_.total_clients < 1) throw ValidationError("simulation: need at least one client");
    if (!(cfg_.duration_s >= 0.0)) throw ValidationError("simulation: duration must be >= 0");
    if (!(cfg_.circuit_lifetime_s > 0.0))
      throw ValidationError("simulation: circuit lifetime must be positive");
    if (cfg_.backup_circuits < 0)
      throw ValidationError("simulation: backup circuit count must be >= 0");
    if (directory.size() < 3) throw InsufficientRelaysError("simulation: need >= 3 relays");
    if (topo_.servers.empty()) throw ValidationError("simulation: need at least one server");

    // The directory must be a view of the topology's relay population.
    std::unordered_map<std::string, std::size_t> relay_index;
    for (std::size_t i = 0; i < topo_.relays.size(); ++i)
      relay_index[topo_.relays[i].relay.id] = i;
    dir_relays_.reserve(directory.size());
    for (const Relay& r : directory.relays()) {
      auto it = relay_index.find(r.id);
      if (it == relay_index.end() || !(topo_.relays[it->second].relay.geo == r.geo))
        throw ValidationError("simulation: directory relay \"" + r.id +
                              "\" is not part of the topology");
      dir_relays_.push_back(it->second);
    }
    directory_ = &directory;

    build_capacity_table();
    init_clients();
  }

  SimResult run() {
    for (int c = 0; c < cfg_.total_clients; ++c) schedule(0.0, EventKind::Rotate, c);

    while (true) {
      const double t_event = queue_.empty() ? kInf : queue_.top().time;
      const auto [t_flow, flow_idx] = next_completion();
      const double t = std::min(t_event, t_flow);
      if (t > cfg_.duration_s || t == kInf) break;
      advance_to(t);
      if (t_flow <= t_event) {
        complete_flow(flow_idx);
      } else {
        const Event ev = queue_.top();
        queue_.pop();
        dispatch(ev);
      }
    }

    std::sort(result_.transfers.begin(), result_.transfers.end(),
              [](const TransferRecord& a, const TransferRecord& b) {
                if (a.completed_at_s() != b.completed_at_s())
                  return a.completed_at_s() < b.completed_at_s();
                if (a.client != b.client) return a.client < b.client;
                return a.issued_at_s < b.issued_at_s;
              });
    return std::move(result_);
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  enum class EventKind { Rotate, Issue, FlowStart };

  struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Rotate;
    int client = 0;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  struct ActiveCircuit {
    std::size_t entry = 0, middle = 0, exit = 0;  // topology relay indices
    int log_index = -1;
    double ready_at = 0.0;
  };

  struct PendingFlow {
    std::vector<std::size_t> slots;
    double bytes = 0.0;
    double issue_time = 0.0;
    double prop_s = 0.0;  // one-way path propagation
    int circuit_log = -1;
  };

  struct Flow {
    std::vector<std::size_t> slots;
    double remaining = 0.0;
    double delivered = 0.0;
    double rate = 0.0;  // bytes/s
    double bytes = 0.0;
    double issue_time = 0.0;
    double start_send = 0.0;
    double prop_s = 0.0;
    int client = 0;
    std::uint64_t seq = 0;
  };

  struct Client {
    GeoPoint geo;
    ClientProfile profile;
    RandomStream behavior{0};
    RandomStream circuits{0};
    std::vector<std::uint64_t> visits;  // per-server visit counts
    ActiveCircuit active;
    PendingFlow pending;
    std::uint64_t pages = 0;
    bool started = false;
  };

  void build_capacity_table() {
    const std::size_t relays = topo_.relays.size();
    const std::size_t servers = topo_.servers.size();
    const auto clients = static_cast<std::size_t>(cfg_.total_clients);
    capacity_.resize(2 * (relays + servers + clients));
    for (std::size_t i = 0; i < relays; ++i) {
      capacity_[relay_up(i)] = topo_.relays[i].up_kbps * 1024.0;
      capacity_[relay_down(i)] = topo_.relays[i].down_kbps * 1024.0;
    }
    for (std::size_t i = 0; i < servers; ++i) {
      capacity_[server_up(i)] = topo_.servers[i].up_kbps * 1024.0;
      capacity_[server_down(i)] = topo_.servers[i].down_kbps * 1024.0;
    }
  }

  void init_clients() {
    RandomStream root(cfg_.seed);
    RandomStream positions = root.split(kLaneClientPositions);
    RandomStream behavior = root.split(kLaneClientBehavior);
    RandomStream circuits = root.split(kLaneClientCircuits);
    const auto roster = build_roster(cfg_.total_clients);
    clients_.resize(roster.size());
    for (std::size_t i = 0; i < roster.size(); ++i) {
      Client& c = clients_[i];
      c.profile = roster[i];
      c.geo = {positions.next_unit() * topo_.region_units,
               positions.next_unit() * topo_.region_units};
      c.behavior = behavior.split(i);
      c.circuits = circuits.split(i);
      c.visits.assign(topo_.servers.size(), 0);
      capacity_[client_up(i)] = c.profile.uplink_kbps * 1024.0;
      capacity_[client_down(i)] = c.profile.downlink_kbps * 1024.0;
    }
  }

  std::size_t relay_up(std::size_t i) const { return 2 * i; }
  std::size_t relay_down(std::size_t i) const { return 2 * i + 1; }
  std::size_t server_up(std::size_t i) const { return 2 * topo_.relays.size() + 2 * i; }
  std::size_t server_down(std::size_t i) const { return 2 * topo_.relays.size() + 2 * i + 1; }
  std::size_t client_up(std::size_t i) const {
    return 2 * (topo_.relays.size() + topo_.servers.size()) + 2 * i;
  }
  std::size_t client_down(std::size_t i) const {
    return 2 * (topo_.relays.size() + topo_.servers.size()) + 2 * i + 1;
  }

  void schedule(double time, EventKind kind, int client) {
    queue_.push({time, next_seq_++, kind, client});
  }

  std::pair<double, std::size_t> next_completion() const {
    double best = kInf;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      const double t = now_ + std::max(flows_[i].remaining, 0.0) / flows_[i].rate;
      if (t < best) {
        best = t;
        best_idx = i;
      }
    }
    return {best, best_idx};
  }

  void advance_to(double t) {
    const double dt = t - now_;
    if (dt > 0.0) {
      for (Flow& f : flows_) {
        const double moved = f.rate * dt;
        f.remaining -= moved;
        f.delivered += moved;
      }
    }
    now_ = t;
  }

  void recompute_rates() {
    if (flows_.empty()) return;
    std::vector<std::vector<std::size_t>> paths;
    paths.reserve(flows_.size());
    for (const Flow& f : flows_) paths.push_back(f.slots);
    const auto rates = max_min_rates(paths, capacity_);
    for (std::size_t i = 0; i < flows_.size(); ++i) flows_[i].rate = rates[i];
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::Rotate: on_rotate(ev.client); break;
      case EventKind::Issue: on_issue(ev.client); break;
      case EventKind::FlowStart: on_flow_start(ev.client); break;
    }
  }

  VisitHistory history_of(const Client& c) const {
    VisitHistory h;
    for (std::size_t s = 0; s < c.visits.size(); ++s)
      if (c.visits[s] > 0) h.add(topo_.servers[s].geo, c.visits[s]);
    return h;
  }

  ActiveCircuit build_circuit(Client& c, double built_at) {
    const PathResult res = select_path(cfg_.strategy, c.geo,
                                       cfg_.use_history ? history_of(c) : VisitHistory{},
                                       *directory_, c.circuits);
    ActiveCircuit ac;
    ac.entry = topo_relay(res.circuit.entry);
    ac.middle = topo_relay(res.circuit.middle);
    ac.exit = topo_relay(res.circuit.exit);
    ac.log_index = static_cast<int>(result_.circuits.size());
    result_.circuits.push_back({static_cast<int>(&c - clients_.data()), res.circuit.entry,
                                res.circuit.middle, res.circuit.exit, built_at, false});
    return ac;
  }

  std::size_t topo_relay(const std::string& id) const {
    for (std::size_t i = 0; i < dir_relays_.size(); ++i)
      if (topo_.relays[dir_relays_[i]].relay.id == id) return dir_relays_[i];
    throw ValidationError("simulation: selected relay missing from topology");
  }

  // Incremental circuit construction: each hop costs one round trip over the
  // partial path, serialized.
  double build_time_s(const Client& c, const ActiveCircuit& ac) const {
    const double d1 = dist(c.geo, topo_.relays[ac.entry].relay.geo);
    const double d2 = dist(topo_.relays[ac.entry].relay.geo, topo_.relays[ac.middle].relay.geo);
    const double d3 = dist(topo_.relays[ac.middle].relay.geo, topo_.relays[ac.exit].relay.geo);
    return 2.0 * (3.0 * d1 + 2.0 * d2 + d3) / 1000.0;
  }

  void on_rotate(int client) {
    Client& c = clients_[static_cast<std::size_t>(client)];
    ActiveCircuit ac = build_circuit(c, now_);
    ac.ready_at = now_ + build_time_s(c, ac);
    c.active = ac;
    // Backups are built serially after the active circuit; they only matter
    // to the circuit log while relay failures stay disabled.
    double at = ac.ready_at;
    for (int b = 0; b < cfg_.backup_circuits; ++b) {
      const ActiveCircuit backup = build_circuit(c, at);
      at += build_time_s(c, backup);
    }
    if (!c.started) {
      c.started = true;
      schedule(ac.ready_at, EventKind::Issue, client);
    }
    schedule(now_ + cfg_.circuit_lifetime_s, EventKind::Rotate, client);
  }

  void on_issue(int client) {
    Client& c = clients_[static_cast<std::size_t>(client)];
    const std::size_t server = uniform_index(topo_.servers.size(), c.behavior.next_unit());
    c.visits[server] += 1;
    const std::size_t pick = uniform_index(5, c.behavior.next_unit());
    const double bytes = c.profile.kind == ClientKind::Web
                             ? kWebPageKib[pick] * 1024.0
                             : kBulkFileMib[pick] * 1024.0 * 1024.0;

    const std::size_t ci = static_cast<std::size_t>(client);
    const ActiveCircuit& ac = c.active;
    const GeoPoint& entry_geo = topo_.relays[ac.entry].relay.geo;
    const GeoPoint& middle_geo = topo_.relays[ac.middle].relay.geo;
    const GeoPoint& exit_geo = topo_.relays[ac.exit].relay.geo;
    const GeoPoint& server_geo = topo_.servers[server].geo;
    const double prop_units = dist(c.geo, entry_geo) + dist(entry_geo, middle_geo) +
                              dist(middle_geo, exit_geo) + dist(exit_geo, server_geo);

    PendingFlow p;
    p.slots = {server_up(server),    relay_down(ac.exit),  relay_up(ac.exit),
               relay_down(ac.middle), relay_up(ac.middle), relay_down(ac.entry),
               relay_up(ac.entry),    client_down(ci)};
    p.bytes = bytes;
    p.issue_time = now_;
    p.prop_s = prop_units / 1000.0;
    p.circuit_log = ac.log_index;
    c.pending = std::move(p);

    const double departs = std::max(now_, ac.ready_at);
    schedule(departs + c.pending.prop_s, EventKind::FlowStart, client);
  }

  void on_flow_start(int client) {
    Client& c = clients_[static_cast<std::size_t>(client)];
    Flow f;
    f.slots = std::move(c.pending.slots);
    f.remaining = c.pending.bytes;
    f.bytes = c.pending.bytes;
    f.issue_time = c.pending.issue_time;
    f.start_send = now_;
    f.prop_s = c.pending.prop_s;
    f.client = client;
    f.seq = next_seq_++;
    result_.circuits[static_cast<std::size_t>(c.pending.circuit_log)].used = true;
    flow_circuit_.push_back(c.pending.circuit_log);
    flows_.push_back(std::move(f));
    recompute_rates();
  }

  void complete_flow(std::size_t idx) {
    Flow f = std::move(flows_[idx]);
    const int circuit_log = flow_circuit_[idx];
    flows_.erase(flows_.begin() + static_cast<std::ptrdiff_t>(idx));
    flow_circuit_.erase(flow_circuit_.begin() + static_cast<std::ptrdiff_t>(idx));
    recompute_rates();

    if (std::abs(f.delivered + std::max(f.remaining, 0.0) - f.bytes) > 1e-6 * f.bytes + 1.0)
      throw Error("simulation: transferred bytes diverged from the request size");

    const double arrival = now_ + f.prop_s;
    if (arrival <= cfg_.duration_s) {
      TransferRecord rec;
      rec.client = f.client;
      rec.kind = clients_[static_cast<std::size_t>(f.client)].profile.kind;
      rec.bytes = static_cast<std::uint64_t>(f.bytes);
      rec.ttfb_s = (f.start_send - f.issue_time) + f.prop_s;
      rec.duration_s = arrival - f.issue_time;
      rec.issued_at_s = f.issue_time;
      rec.circuit = circuit_log;
      result_.transfers.push_back(std::move(rec));
    }

    Client& c = clients_[static_cast<std::size_t>(f.client)];
    if (c.profile.kind == ClientKind::Web) {
      c.pages += 1;
      const double u = c.behavior.next_unit();
      const double think = (c.pages % 150 == 0) ? 900.0 + u * 300.0 : 5.0 + u * 10.0;
      schedule(arrival + think, EventKind::Issue, f.client);
    } else {
      schedule(arrival, EventKind::Issue, f.client);
    }
  }

  SimConfig cfg_;
  const Topology& topo_;
  const Directory* directory_ = nullptr;
  std::vector<std::size_t> dir_relays_;
  std::vector<double> capacity_;
  std::vector<Client> clients_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::vector<Flow> flows_;
  std::vector<int> flow_circuit_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
  SimResult result_;
};

}  // namespace detail

inline SimResult run_simulation(const SimConfig& config, const Directory& directory,
                                const Topology& topology) {
  return detail::Simulation(config, directory, topology).run();
}

}  // namespace torpath
