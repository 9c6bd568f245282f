#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "torpath/path_selection.hpp"

using torpath::Directory;
using torpath::GeoPoint;
using torpath::GuardSelection;
using torpath::RandomStream;
using torpath::Relay;

namespace {

Relay relay_at_bearing(std::string id, const GeoPoint& source, double degrees, double radius,
                       double bw, double up) {
  const double rad = degrees * std::numbers::pi / 180.0;
  return testutil::relay(std::move(id), source.x + radius * std::cos(rad),
                         source.y + radius * std::sin(rad), bw, up);
}

}  // namespace

TEST_SUITE("entry_guards") {

TEST_CASE("one relay per sector: each becomes the guard for its sector") {
  const GeoPoint src{100, 100};
  const Directory dir({relay_at_bearing("g0", src, 10, 50, 100, 3600),
                       relay_at_bearing("g1", src, 130, 50, 100, 3600),
                       relay_at_bearing("g2", src, 250, 50, 100, 3600)});
  RandomStream rng(3);
  const GuardSelection sel = torpath::select_entry_guards(src, dir, rng);
  CHECK_FALSE(sel.degraded());
  CHECK(sel.guard_ids[0] == "g0");
  CHECK(sel.guard_ids[1] == "g1");
  CHECK(sel.guard_ids[2] == "g2");
}

TEST_CASE("all relays in one sector: two guards come from the degraded redraw") {
  const GeoPoint src{0, 0};
  const Directory dir({relay_at_bearing("a", src, 20, 40, 100, 3600),
                       relay_at_bearing("b", src, 40, 50, 200, 3600),
                       relay_at_bearing("c", src, 60, 60, 300, 3600),
                       relay_at_bearing("d", src, 80, 70, 400, 3600)});
  RandomStream rng(9);
  const GuardSelection sel = torpath::select_entry_guards(src, dir, rng);
  CHECK(sel.degraded());
  CHECK(sel.from_sector[0]);
  CHECK_FALSE(sel.from_sector[1]);
  CHECK_FALSE(sel.from_sector[2]);
  const std::set<std::string> ids(sel.guard_ids.begin(), sel.guard_ids.end());
  CHECK(ids.size() == 3);  // guards stay distinct across redraws
}

TEST_CASE("sector boundaries: bearing 0 is in the first sector, splits near 120/240") {
  const GeoPoint src{0, 0};
  // east sits at bearing 0 exactly; the others straddle the 120 and 240 cuts
  const Directory dir({relay_at_bearing("east", src, 0, 10, 1, 1),        // sector 0
                       relay_at_bearing("b119", src, 119, 10, 1, 1),      // sector 0
                       relay_at_bearing("b121", src, 121, 10, 1, 1),      // sector 1
                       relay_at_bearing("b239", src, 239, 10, 1, 1),      // sector 1
                       relay_at_bearing("b241", src, 241, 10, 1, 1)});    // sector 2
  RandomStream rng(4);
  const GuardSelection sel = torpath::select_entry_guards(src, dir, rng);
  CHECK_FALSE(sel.degraded());
  CHECK((sel.guard_ids[0] == "east" || sel.guard_ids[0] == "b119"));
  CHECK((sel.guard_ids[1] == "b121" || sel.guard_ids[1] == "b239"));
  CHECK(sel.guard_ids[2] == "b241");
}

TEST_CASE("12-relay fixture: within-sector frequencies follow the sector-local weights") {
  const GeoPoint src{500, 500};
  // four candidates per sector with staggered radii and bandwidths
  std::vector<Relay> relays;
  for (int s = 0; s < 3; ++s) {
    const double base = 120.0 * s;
    const std::string p = "s" + std::to_string(s) + "_";
    relays.push_back(relay_at_bearing(p + "a", src, base + 15, 60, 800, 86400));
    relays.push_back(relay_at_bearing(p + "b", src, base + 45, 80, 400, 86400));
    relays.push_back(relay_at_bearing(p + "c", src, base + 75, 100, 200, 86400));
    relays.push_back(relay_at_bearing(p + "d", src, base + 105, 120, 800, 86400));
  }
  const Directory dir(std::move(relays));

  // sector-local weights, recomputed by hand: max distance 120, max bw 800,
  // uptimes equal so the log factor is 1 for everyone
  //   a: 1.0 * (1 - 60/120)  = 0.5
  //   b: 0.5 * (1 - 80/120)  = 1/6
  //   c: 0.25 * (1 - 100/120) = 1/24
  //   d: 1.0 * (1 - 1)        = 0
  const double total = 0.5 + 1.0 / 6 + 1.0 / 24;
  const std::map<char, double> want = {
      {'a', 0.5 / total}, {'b', (1.0 / 6) / total}, {'c', (1.0 / 24) / total}, {'d', 0.0}};

  RandomStream rng(271828);
  const int n = 100000;
  std::map<std::string, int> hits;
  for (int i = 0; i < n; ++i) {
    const GuardSelection sel = torpath::select_entry_guards(src, dir, rng);
    CHECK_FALSE(sel.degraded());
    for (int s = 0; s < 3; ++s) hits[sel.guard_ids[static_cast<std::size_t>(s)]] += 1;
  }
  for (int s = 0; s < 3; ++s) {
    const std::string p = "s" + std::to_string(s) + "_";
    CHECK(hits[p + "d"] == 0);
    for (const auto& [suffix, prob] : want) {
      if (prob == 0.0) continue;
      const double sigma = std::sqrt(prob * (1 - prob) / n);
      CHECK(std::abs(static_cast<double>(hits[p + suffix]) / n - prob) < 3 * sigma);
    }
  }
}

TEST_CASE("needs at least three relays") {
  const Directory dir({testutil::relay("a", 1, 0, 1, 1), testutil::relay("b", 0, 1, 1, 1)});
  RandomStream rng(1);
  CHECK_THROWS_AS(torpath::select_entry_guards({0, 0}, dir, rng),
                  torpath::InsufficientRelaysError);
}

}  // TEST_SUITE
