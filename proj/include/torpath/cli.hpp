#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "torpath/anonymity.hpp"
#include "torpath/csv.hpp"
#include "torpath/errors.hpp"
#include "torpath/json_io.hpp"
#include "torpath/path_selection.hpp"
#include "torpath/scenario.hpp"
#include "torpath/simulation.hpp"
#include "torpath/summary.hpp"
#include "torpath/topology.hpp"

namespace torpath {

// What one `simulate` invocation should execute: every (strategy, seed)
// pair of the cross product, over one scenario, into one output directory.
struct RunManifest {
  std::filesystem::path scenario;
  std::filesystem::path out_dir;
  std::vector<StrategyTag> strategies;  // empty: the scenario's own strategy
  std::vector<std::uint64_t> seeds;     // empty: the scenario's own seed
  int jobs = 1;
};

namespace detail {

struct RunOutput {
  StrategyTag strategy;
  std::uint64_t seed = 0;
  Summary summary;
  AnonymityReport anonymity;
  std::size_t circuits_built = 0;
};

inline std::string run_tag(StrategyTag strategy, std::uint64_t seed) {
  return std::string(to_string(strategy)) + "_seed" + std::to_string(seed);
}

inline std::vector<LoggedCircuit> to_logged(const std::vector<CircuitRecord>& circuits) {
  std::vector<LoggedCircuit> rows;
  rows.reserve(circuits.size());
  for (const CircuitRecord& c : circuits) rows.push_back({c.entry, c.middle, c.exit, c.used});
  return rows;
}

inline void write_report(const std::filesystem::path& path, const Scenario& scenario,
                         const std::vector<RunOutput>& runs) {
  auto out = open_out(path);
  out << "scenario: relays=" << scenario.topology.relay_count
      << " servers=" << scenario.topology.server_count
      << " clients=" << scenario.config.total_clients
      << " duration_s=" << scenario.config.duration_s
      << " circuit_lifetime_s=" << scenario.config.circuit_lifetime_s
      << " backups=" << scenario.config.backup_circuits << "\n\n";
  out << "performance (median over per-client mean throughput; ttfb median over transfers)\n";
  char line[256];
  std::snprintf(line, sizeof(line), "  %-10s %-8s %14s %14s\n", "strategy", "seed",
                "median_kbps", "median_ttfb_s");
  out << line;
  for (const RunOutput& r : runs) {
    std::snprintf(line, sizeof(line), "  %-10s %-8llu %14.3f %14.3f\n",
                  std::string(to_string(r.strategy)).c_str(),
                  static_cast<unsigned long long>(r.seed), r.summary.median_client_kbps,
                  r.summary.median_ttfb_s);
    out << line;
  }
  out << "\nanonymity (over all built circuits)\n";
  std::snprintf(line, sizeof(line), "  %-10s %-8s %7s %7s %7s %7s %10s %8s\n", "strategy",
                "seed", "first", "middle", "end", "combos", "entropy", "degree");
  out << line;
  for (const RunOutput& r : runs) {
    std::snprintf(line, sizeof(line), "  %-10s %-8llu %7llu %7llu %7llu %7llu %10.3f %8.3f\n",
                  std::string(to_string(r.strategy)).c_str(),
                  static_cast<unsigned long long>(r.seed),
                  static_cast<unsigned long long>(r.anonymity.diversity.distinct_first),
                  static_cast<unsigned long long>(r.anonymity.diversity.distinct_middle),
                  static_cast<unsigned long long>(r.anonymity.diversity.distinct_end),
                  static_cast<unsigned long long>(r.anonymity.diversity.start_end_combinations),
                  r.anonymity.entropy_bits, r.anonymity.degree);
    out << line;
  }
}

}  // namespace detail

// Runs every (strategy, seed) pair and writes transfers/circuits/anonymity
// CSVs per run plus one report.txt. Outputs are removed again if any run
// fails, so a zero exit status means the directory holds the complete set.
inline void cmd_simulate(const RunManifest& manifest, std::ostream& log = std::cerr) {
  std::vector<StrategyTag> strategies = manifest.strategies;
  std::vector<std::uint64_t> seeds = manifest.seeds;
  if (manifest.jobs < 1) throw ValidationError("simulate: --jobs must be >= 1");

  const Scenario scenario = load_scenario(manifest.scenario);
  if (strategies.empty()) strategies.push_back(scenario.config.strategy);
  if (seeds.empty()) seeds.push_back(scenario.config.seed);
  const BandwidthProfile profile = scenario.profile();

  std::filesystem::create_directories(manifest.out_dir);

  struct RunSpec {
    StrategyTag strategy;
    std::uint64_t seed;
  };
  std::vector<RunSpec> runs;
  for (const StrategyTag s : strategies)
    for (const std::uint64_t seed : seeds) runs.push_back({s, seed});

  std::vector<detail::RunOutput> outputs(runs.size());
  std::vector<std::filesystem::path> created;
  std::mutex mu;
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= runs.size()) return;
      try {
        SimConfig config = scenario.config;
        config.strategy = runs[i].strategy;
        config.seed = runs[i].seed;
        const Topology topo = generate_topology(scenario.topology, config.seed, profile);
        const Directory directory = make_directory(topo);
        const SimResult result = run_simulation(config, directory, topo);

        const std::string tag = detail::run_tag(config.strategy, config.seed);
        const auto transfers_path = manifest.out_dir / ("transfers_" + tag + ".csv");
        const auto circuits_path = manifest.out_dir / ("circuits_" + tag + ".csv");
        const auto anonymity_path = manifest.out_dir / ("anonymity_" + tag + ".csv");
        {
          std::lock_guard<std::mutex> lock(mu);
          created.push_back(transfers_path);
          created.push_back(circuits_path);
          created.push_back(anonymity_path);
        }
        write_transfers_csv(transfers_path, result.transfers);
        write_circuits_csv(circuits_path, result.circuits);
        const AnonymityReport anonymity =
            analyze_log(detail::to_logged(result.circuits),
                        static_cast<std::uint64_t>(scenario.topology.relay_count));
        write_anonymity_csv(anonymity_path, std::string(to_string(config.strategy)), anonymity);

        detail::RunOutput out;
        out.strategy = config.strategy;
        out.seed = config.seed;
        out.summary = summarize(result.transfers);
        out.anonymity = anonymity;
        out.circuits_built = result.circuits.size();
        outputs[i] = std::move(out);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(manifest.jobs), runs.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (failure) {
    std::error_code ec;
    for (const auto& p : created) std::filesystem::remove(p, ec);
    std::rethrow_exception(failure);
  }

  const auto report_path = manifest.out_dir / "report.txt";
  detail::write_report(report_path, scenario, outputs);
  for (const auto& r : outputs)
    log << to_string(r.strategy) << " seed " << r.seed << ": " << r.circuits_built
        << " circuits, median " << r.summary.median_client_kbps << " KB/s, degree "
        << r.anonymity.degree << "\n";
}

// One-shot circuit build over a directory file; prints the chosen triple and
// the per-stage diagnostics in construction order.
inline void cmd_select(const std::filesystem::path& directory_path,
                       const std::optional<std::filesystem::path>& history_path, GeoPoint source,
                       StrategyTag strategy, std::uint64_t seed, std::ostream& out = std::cout) {
  const Directory directory = load_directory(directory_path);
  const VisitHistory history = history_path ? load_history(*history_path) : VisitHistory{};
  RandomStream rng(seed);
  const PathResult res = select_path(strategy, source, history, directory, rng);

  auto stage = [&out](const char* position, const StagePick& pick) {
    out << position << ' ' << pick.relay_id << " rd=" << detail::fixed6(pick.rd)
        << " rank=" << detail::fixed6(pick.rank) << (pick.uniform ? " (uniform)" : "") << '\n';
  };
  out << "strategy " << to_string(strategy) << " seed " << seed << '\n';
  stage("entry ", res.entry_pick);
  stage("middle", res.middle_pick);
  stage("exit  ", res.exit_pick);
}

// Re-runs the anonymity analysis over an existing circuits.csv.
inline void cmd_analyze(const std::filesystem::path& circuits_path, const std::string& label,
                        std::uint64_t relay_population, bool used_only,
                        const std::optional<std::filesystem::path>& out_path,
                        std::ostream& out = std::cout) {
  const auto circuits = read_circuits_csv(circuits_path);
  const AnonymityReport report =
      analyze_log(detail::to_logged(circuits), relay_population, used_only);
  if (out_path) {
    write_anonymity_csv(*out_path, label, report);
  } else {
    out << kAnonymityHeader << '\n'
        << label << ',' << report.diversity.distinct_first << ','
        << report.diversity.distinct_middle << ',' << report.diversity.distinct_end << ','
        << report.diversity.start_end_combinations << ','
        << detail::fixed6(report.entropy_bits) << ',' << detail::fixed6(report.degree) << '\n';
  }
}

}  // namespace torpath
