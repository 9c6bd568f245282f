#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "torpath/anonymity.hpp"
#include "torpath/errors.hpp"
#include "torpath/simulation.hpp"

namespace torpath {

namespace detail {

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (const char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace detail

inline constexpr const char* kTransfersHeader =
    "client_id,kind,bytes,ttfb_s,duration_s,throughput_kbps";
inline constexpr const char* kCircuitsHeader = "client_id,entry,middle,exit,built_at_s,used";
inline constexpr const char* kAnonymityHeader =
    "strategy,distinct_first,distinct_middle,distinct_end,combinations,entropy_bits,degree";

inline void write_transfers_csv(const std::filesystem::path& path,
                                std::span<const TransferRecord> records) {
  auto out = detail::open_out(path);
  out << kTransfersHeader << '\n';
  for (const TransferRecord& r : records)
    out << r.client << ',' << to_string(r.kind) << ',' << r.bytes << ','
        << detail::fixed6(r.ttfb_s) << ',' << detail::fixed6(r.duration_s) << ','
        << detail::fixed6(r.throughput_kbps()) << '\n';
}

inline void write_circuits_csv(const std::filesystem::path& path,
                               std::span<const CircuitRecord> circuits) {
  auto out = detail::open_out(path);
  out << kCircuitsHeader << '\n';
  for (const CircuitRecord& c : circuits)
    out << c.client << ',' << c.entry << ',' << c.middle << ',' << c.exit << ','
        << detail::fixed6(c.built_at_s) << ',' << (c.used ? 1 : 0) << '\n';
}

inline void write_anonymity_csv(const std::filesystem::path& path, const std::string& strategy,
                                const AnonymityReport& report) {
  auto out = detail::open_out(path);
  out << kAnonymityHeader << '\n';
  out << strategy << ',' << report.diversity.distinct_first << ','
      << report.diversity.distinct_middle << ',' << report.diversity.distinct_end << ','
      << report.diversity.start_end_combinations << ',' << detail::fixed6(report.entropy_bits)
      << ',' << detail::fixed6(report.degree) << '\n';
}

inline std::vector<CircuitRecord> read_circuits_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  if (detail::split_csv_line(line) != detail::split_csv_line(kCircuitsHeader))
    throw ParseError(path.string() + ": unexpected header");
  std::vector<CircuitRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 6)
      throw ParseError(path.string() + ": line " + std::to_string(lineno) +
                       ": expected 6 fields");
    try {
      CircuitRecord c;
      c.client = std::stoi(fields[0]);
      c.entry = fields[1];
      c.middle = fields[2];
      c.exit = fields[3];
      c.built_at_s = std::stod(fields[4]);
      c.used = fields[5] == "1";
      rows.push_back(std::move(c));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": line " + std::to_string(lineno) + ": bad field");
    }
  }
  return rows;
}

inline std::vector<TransferRecord> read_transfers_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  if (detail::split_csv_line(line) != detail::split_csv_line(kTransfersHeader))
    throw ParseError(path.string() + ": unexpected header");
  std::vector<TransferRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 6)
      throw ParseError(path.string() + ": line " + std::to_string(lineno) +
                       ": expected 6 fields");
    try {
      TransferRecord r;
      r.client = std::stoi(fields[0]);
      r.kind = fields[1] == "bulk" ? ClientKind::Bulk : ClientKind::Web;
      r.bytes = std::stoull(fields[2]);
      r.ttfb_s = std::stod(fields[3]);
      r.duration_s = std::stod(fields[4]);
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": line " + std::to_string(lineno) + ": bad field");
    }
  }
  return rows;
}

}  // namespace torpath
