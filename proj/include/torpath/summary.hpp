#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "torpath/errors.hpp"
#include "torpath/simulation.hpp"

namespace torpath {

namespace detail {

// Quantile by linear interpolation between order statistics; q=1 is the max.
inline double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] + t * (sorted[lo + 1] - sorted[lo]);
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile(values, 0.5);
}

}  // namespace detail

// Per-client mean throughput and the distribution across clients.
// Throughput of one record is bytes/duration; a client's figure is the mean
// over its records; the CDF is emitted at 1% quantile steps over clients.
struct Summary {
  std::map<int, double> client_mean_kbps;
  double median_client_kbps = 0.0;
  double median_ttfb_s = 0.0;  // over all records
  std::vector<double> cdf_kbps;  // 101 quantiles, 0% .. 100%
};

inline Summary summarize(std::span<const TransferRecord> records) {
  if (records.empty()) throw ValidationError("summarize: no records");
  Summary out;

  std::map<int, std::pair<double, std::uint64_t>> acc;  // client -> (sum, n)
  std::vector<double> ttfbs;
  ttfbs.reserve(records.size());
  for (const TransferRecord& r : records) {
    auto& [sum, n] = acc[r.client];
    sum += r.throughput_kbps();
    n += 1;
    ttfbs.push_back(r.ttfb_s);
  }
  std::vector<double> means;
  means.reserve(acc.size());
  for (const auto& [client, sum_n] : acc) {
    const double mean = sum_n.first / static_cast<double>(sum_n.second);
    out.client_mean_kbps[client] = mean;
    means.push_back(mean);
  }
  std::sort(means.begin(), means.end());
  out.median_client_kbps = detail::quantile(means, 0.5);
  out.median_ttfb_s = detail::median(std::move(ttfbs));
  out.cdf_kbps.reserve(101);
  for (int pct = 0; pct <= 100; ++pct)
    out.cdf_kbps.push_back(detail::quantile(means, static_cast<double>(pct) / 100.0));
  return out;
}

}  // namespace torpath
