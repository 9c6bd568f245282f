#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "torpath/bandwidth_profile.hpp"
#include "torpath/errors.hpp"
#include "torpath/json_io.hpp"
#include "torpath/simulation.hpp"
#include "torpath/strategy.hpp"
#include "torpath/topology.hpp"

namespace torpath {

// One experiment description: the simulation knobs plus the synthetic
// topology parameters. bandwidth_profile is resolved relative to the
// scenario file; omitted, the bundled consensus approximation is used.
struct Scenario {
  SimConfig config;
  TopologyParams topology;
  std::optional<std::filesystem::path> bandwidth_profile;

  BandwidthProfile profile() const {
    return bandwidth_profile ? BandwidthProfile::load(*bandwidth_profile)
                             : BandwidthProfile::consensus_2012();
  }
};

inline Scenario load_scenario(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const nlohmann::json doc = detail::parse_json(text, path.string());
  const std::string where = path.string();
  if (!doc.is_object()) throw ParseError(where + ": expected a JSON object");

  static constexpr const char* kKnown[] = {
      "seed",          "strategy",       "relay_count",        "server_count",
      "total_clients", "duration_s",     "circuit_lifetime_s", "backup_circuits",
      "bandwidth_profile", "region_units", "server_kbps",      "use_history"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    bool known = false;
    for (const char* k : kKnown)
      if (key == k) known = true;
    if (!known) throw ParseError(where + ": unknown key \"" + key + "\"");
  }
  for (const char* k : {"seed", "strategy", "relay_count", "server_count", "total_clients",
                        "duration_s"})
    if (!doc.contains(k)) throw ParseError(where + ": missing key \"" + k + "\"");

  Scenario s;
  if (!doc.at("seed").is_number_unsigned())
    throw ParseError(where + ": \"seed\" must be a non-negative integer");
  s.config.seed = doc.at("seed").get<std::uint64_t>();
  if (!doc.at("strategy").is_string())
    throw ParseError(where + ": \"strategy\" must be a string");
  s.config.strategy = parse_strategy(doc.at("strategy").get<std::string>());
  s.topology.relay_count = static_cast<int>(detail::number_field(doc, "relay_count", where));
  s.topology.server_count = static_cast<int>(detail::number_field(doc, "server_count", where));
  s.config.total_clients = static_cast<int>(detail::number_field(doc, "total_clients", where));
  s.config.duration_s = detail::number_field(doc, "duration_s", where);
  if (doc.contains("circuit_lifetime_s"))
    s.config.circuit_lifetime_s = detail::number_field(doc, "circuit_lifetime_s", where);
  if (doc.contains("backup_circuits"))
    s.config.backup_circuits = static_cast<int>(detail::number_field(doc, "backup_circuits", where));
  if (doc.contains("use_history")) {
    if (!doc.at("use_history").is_boolean())
      throw ParseError(where + ": \"use_history\" must be a boolean");
    s.config.use_history = doc.at("use_history").get<bool>();
  }
  if (doc.contains("region_units"))
    s.topology.region_units = detail::number_field(doc, "region_units", where);
  if (doc.contains("server_kbps"))
    s.topology.server_kbps = detail::number_field(doc, "server_kbps", where);
  if (doc.contains("bandwidth_profile")) {
    if (!doc.at("bandwidth_profile").is_string())
      throw ParseError(where + ": \"bandwidth_profile\" must be a path string");
    s.bandwidth_profile =
        path.parent_path() / doc.at("bandwidth_profile").get<std::string>();
  }

  if (s.topology.relay_count < 3)
    throw ValidationError(where + ": relay_count must be >= 3");
  if (s.topology.server_count < 1)
    throw ValidationError(where + ": server_count must be >= 1");
  if (s.config.total_clients < 1)
    throw ValidationError(where + ": total_clients must be >= 1");
  if (!(s.config.circuit_lifetime_s > 0.0))
    throw ValidationError(where + ": circuit_lifetime_s must be positive");
  if (!(s.config.duration_s > s.config.circuit_lifetime_s))
    throw ValidationError(where + ": duration_s must exceed circuit_lifetime_s");
  if (s.config.backup_circuits < 0)
    throw ValidationError(where + ": backup_circuits must be >= 0");
  return s;
}

}  // namespace torpath
