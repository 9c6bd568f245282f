#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "torpath/cli.hpp"
#include "torpath/errors.hpp"
#include "torpath/geo.hpp"
#include "torpath/strategy.hpp"

namespace {

torpath::GeoPoint parse_source(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw torpath::ValidationError("--source expects \"x,y\"");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw torpath::ValidationError("--source expects \"x,y\" with numeric coordinates");
  }
}

std::vector<torpath::StrategyTag> parse_strategies(const std::vector<std::string>& names) {
  std::vector<torpath::StrategyTag> out;
  for (const std::string& n : names) out.push_back(torpath::parse_strategy(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circuit path-selection strategies, network simulator and anonymity analyzer"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run seeded simulations per strategy");
  std::string scenario_path;
  std::string out_dir;
  std::vector<std::string> strategy_names;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;
  simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "output directory")->required();
  simulate->add_option("--strategies", strategy_names,
                       "strategies to compare (default: the scenario's)")
      ->delimiter(',');
  simulate->add_option("--seed", seeds, "seed (repeatable; default: the scenario's)");
  simulate->add_option("--jobs", jobs, "parallel runs (outputs are unaffected)");

  // select
  auto* select = app.add_subcommand("select", "build one circuit from a directory file");
  std::string directory_path;
  std::string history_path;
  std::string source_text = "0,0";
  std::string strategy_name = "composite";
  std::uint64_t select_seed = 1;
  select->add_option("--directory", directory_path, "relay directory JSON file")->required();
  select->add_option("--history", history_path, "visit history JSON file");
  select->add_option("--source", source_text, "client coordinates \"x,y\"");
  select->add_option("--strategy", strategy_name, "random|default|geo|composite");
  select->add_option("--seed", select_seed, "random stream seed");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "anonymity metrics over an existing circuits.csv");
  std::string circuits_path;
  std::string analyze_out;
  std::string label = "unknown";
  std::uint64_t relays = 0;
  bool used_only = false;
  analyze->add_option("--circuits", circuits_path, "circuits.csv from a simulation run")
      ->required();
  analyze->add_option("--out", analyze_out, "write CSV here instead of stdout");
  analyze->add_option("--strategy", label, "strategy label for the output row");
  analyze->add_option("--relays", relays,
                      "relay population for the entropy bound (default: distinct observed)");
  analyze->add_flag("--used-only", used_only, "ignore circuits that never carried traffic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) {
      torpath::RunManifest manifest;
      manifest.scenario = scenario_path;
      manifest.out_dir = out_dir;
      manifest.strategies = parse_strategies(strategy_names);
      manifest.seeds = seeds;
      manifest.jobs = jobs;
      torpath::cmd_simulate(manifest);
    } else if (select->parsed()) {
      std::optional<std::filesystem::path> history;
      if (!history_path.empty()) history = history_path;
      torpath::cmd_select(directory_path, history, parse_source(source_text),
                          torpath::parse_strategy(strategy_name), select_seed);
    } else if (analyze->parsed()) {
      std::optional<std::filesystem::path> out;
      if (!analyze_out.empty()) out = analyze_out;
      torpath::cmd_analyze(circuits_path, label, relays, used_only, out);
    }
  } catch (const torpath::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
