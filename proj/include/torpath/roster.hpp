#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "torpath/errors.hpp"

namespace torpath {

enum class ClientKind { Web, Bulk };

inline std::string_view to_string(ClientKind k) {
  return k == ClientKind::Web ? "web" : "bulk";
}

// Access-link caps in KB/s (1 KB = 1024 bytes; 1 Mbps = 125000 bytes/s).
struct ClientProfile {
  ClientKind kind = ClientKind::Web;
  std::string country;
  double downlink_kbps = 0.0;
  double uplink_kbps = 0.0;
};

namespace detail {

constexpr double kKbPerMbps = 125000.0 / 1024.0;

struct CountryShare {
  const char* name;
  double share;     // fraction of the client population
  double dl_mbps;
  double ul_mbps;
};

// Top-5 countries of the June 2012 client population; shares are the
// 270/180/180/180/90-of-900 proportions. Whatever the floor division leaves
// over lands in "other" at the median caps of the named countries.
inline constexpr std::array<CountryShare, 5> kCountries = {{
    {"US", 0.30, 12.67, 3.39},
    {"Germany", 0.20, 14.67, 2.14},
    {"Iran", 0.20, 1.50, 0.91},
    {"Italy", 0.20, 5.46, 1.09},
    {"France", 0.10, 12.02, 2.88},
}};

constexpr double kOtherDlMbps = 12.02;  // median downlink of the named countries
constexpr double kOtherUlMbps = 2.14;   // median uplink

}  // namespace detail

// Scales the 900-client population proportionally: counts per country are
// floor(total * share) in listed order, the remainder is bucketed as "other",
// and 30-in-900 clients are marked bulk (rounded half up), spread across the
// roster by stride so every country keeps its mix.
inline std::vector<ClientProfile> build_roster(int total_clients) {
  if (total_clients < 1) throw ValidationError("build_roster: need at least one client");
  const auto total = static_cast<std::size_t>(total_clients);

  std::vector<ClientProfile> roster;
  roster.reserve(total);
  for (const auto& c : detail::kCountries) {
    const auto n = static_cast<std::size_t>(static_cast<double>(total) * c.share);
    for (std::size_t i = 0; i < n && roster.size() < total; ++i)
      roster.push_back({ClientKind::Web, c.name, c.dl_mbps * detail::kKbPerMbps,
                        c.ul_mbps * detail::kKbPerMbps});
  }
  while (roster.size() < total)
    roster.push_back({ClientKind::Web, "other", detail::kOtherDlMbps * detail::kKbPerMbps,
                      detail::kOtherUlMbps * detail::kKbPerMbps});

  const std::size_t bulk = (total * 30 + 450) / 900;  // round(total * 30/900) half up
  for (std::size_t j = 0; j < bulk; ++j) roster[j * total / bulk].kind = ClientKind::Bulk;
  return roster;
}

}  // namespace torpath
