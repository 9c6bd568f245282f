#include <doctest.h>

#include <map>

#include "torpath/roster.hpp"

using torpath::ClientKind;
using torpath::build_roster;

namespace {

std::map<std::string, int> country_counts(const std::vector<torpath::ClientProfile>& roster) {
  std::map<std::string, int> out;
  for (const auto& c : roster) out[c.country] += 1;
  return out;
}

int bulk_count(const std::vector<torpath::ClientProfile>& roster) {
  int n = 0;
  for (const auto& c : roster)
    if (c.kind == ClientKind::Bulk) ++n;
  return n;
}

}  // namespace

TEST_SUITE("roster") {

TEST_CASE("900 clients reproduce the reference split") {
  const auto roster = build_roster(900);
  REQUIRE(roster.size() == 900);
  const auto counts = country_counts(roster);
  CHECK(counts.at("US") == 270);
  CHECK(counts.at("Germany") == 180);
  CHECK(counts.at("Iran") == 180);
  CHECK(counts.at("Italy") == 180);
  CHECK(counts.at("France") == 90);
  CHECK(counts.count("other") == 0);
  CHECK(bulk_count(roster) == 30);
}

TEST_CASE("90 clients scale proportionally") {
  const auto roster = build_roster(90);
  REQUIRE(roster.size() == 90);
  const auto counts = country_counts(roster);
  CHECK(counts.at("US") == 27);
  CHECK(counts.at("Germany") == 18);
  CHECK(counts.at("Iran") == 18);
  CHECK(counts.at("Italy") == 18);
  CHECK(counts.at("France") == 9);
  CHECK(bulk_count(roster) == 3);
}

TEST_CASE("a single client is a web client in the other bucket") {
  const auto roster = build_roster(1);
  REQUIRE(roster.size() == 1);
  CHECK(roster[0].country == "other");
  CHECK(roster[0].kind == ClientKind::Web);
}

TEST_CASE("caps convert Mbps to KB/s") {
  const auto roster = build_roster(900);
  // US: 12.67 Mbps down, 3.39 Mbps up
  CHECK(roster[0].downlink_kbps == doctest::Approx(12.67 * 125000.0 / 1024.0));
  CHECK(roster[0].uplink_kbps == doctest::Approx(3.39 * 125000.0 / 1024.0));
}

TEST_CASE("bulk marking spreads across the population") {
  const auto roster = build_roster(900);
  int first_bulk = -1, last_bulk = -1;
  for (int i = 0; i < 900; ++i) {
    if (roster[static_cast<std::size_t>(i)].kind == ClientKind::Bulk) {
      if (first_bulk < 0) first_bulk = i;
      last_bulk = i;
    }
  }
  CHECK(first_bulk < 100);
  CHECK(last_bulk >= 800);
}

TEST_CASE("rejects an empty roster") {
  CHECK_THROWS_AS(build_roster(0), torpath::ValidationError);
}

}  // TEST_SUITE
