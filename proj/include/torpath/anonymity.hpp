#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "torpath/errors.hpp"

namespace torpath {

// (entry id, exit id) -> times that pair appeared in a circuit log.
// Only observed pairs are stored; total is the sum over all cells.
struct CombinationCounts {
  std::map<std::pair<std::string, std::string>, std::uint64_t> table;
  std::uint64_t total = 0;

  void add(const std::string& entry, const std::string& exit, std::uint64_t n = 1) {
    table[{entry, exit}] += n;
    total += n;
  }
};

// Shannon entropy in bits of the empirical (entry, exit) distribution.
inline double entropy(const CombinationCounts& counts) {
  if (counts.total < 1 || counts.table.empty())
    throw ValidationError("entropy: empty combination table");
  const double total = static_cast<double>(counts.total);
  double bits = 0.0;
  for (const auto& [cell, count] : counts.table) {
    (void)cell;
    const double p = static_cast<double>(count) / total;
    bits -= p * std::log2(p);
  }
  return bits;
}

// Observed entropy over the maximum achievable with n relays, log2(n^2).
// The n^2 normalizer counts the diagonal even though circuits never reuse a
// relay, keeping values comparable with the usual convention for this metric.
inline double anonymity_degree(double entropy_bits, std::uint64_t relay_population) {
  if (relay_population < 2) throw std::domain_error("anonymity_degree: population must be >= 2");
  if (entropy_bits < 0.0) throw std::domain_error("anonymity_degree: entropy must be >= 0");
  const double n = static_cast<double>(relay_population);
  double d = entropy_bits / std::log2(n * n);
  if (d > 1.0 && d <= 1.0 + 1e-12) d = 1.0;  // numerical slack only
  return std::clamp(d, 0.0, 1.0);
}

// Distinct relays seen per circuit position and distinct start-end pairs.
struct PositionDiversity {
  std::uint64_t distinct_first = 0;   // entry position
  std::uint64_t distinct_middle = 0;
  std::uint64_t distinct_end = 0;     // exit position
  std::uint64_t start_end_combinations = 0;
};

struct AnonymityReport {
  PositionDiversity diversity;
  CombinationCounts combinations;
  double entropy_bits = 0.0;
  double degree = 0.0;
};

// Log rows only need the three relay ids and whether the circuit carried
// traffic; any richer record can be projected down to this.
struct LoggedCircuit {
  std::string entry;
  std::string middle;
  std::string exit;
  bool used = true;
};

// Tallies a circuit log. With used_only set, backup circuits that never
// carried traffic are skipped. relay_population == 0 derives the population
// from the distinct relay ids observed anywhere in the log.
template <typename Range>
AnonymityReport analyze_log(const Range& log, std::uint64_t relay_population = 0,
                            bool used_only = false) {
  AnonymityReport report;
  std::set<std::string> first, middle, end, everyone;
  for (const auto& row : log) {
    if (used_only && !row.used) continue;
    first.insert(row.entry);
    middle.insert(row.middle);
    end.insert(row.exit);
    everyone.insert(row.entry);
    everyone.insert(row.middle);
    everyone.insert(row.exit);
    report.combinations.add(row.entry, row.exit);
  }
  if (report.combinations.total == 0) throw ValidationError("analyze_log: empty circuit log");
  report.diversity.distinct_first = first.size();
  report.diversity.distinct_middle = middle.size();
  report.diversity.distinct_end = end.size();
  report.diversity.start_end_combinations = report.combinations.table.size();
  report.entropy_bits = entropy(report.combinations);
  report.degree = anonymity_degree(report.entropy_bits,
                                   relay_population > 0 ? relay_population : everyone.size());
  return report;
}

}  // namespace torpath
