#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "torpath/errors.hpp"
#include "torpath/geo.hpp"
#include "torpath/relay.hpp"

namespace torpath {

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Parses with the byte offset of syntax errors converted to a line number.
inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": parse error at line " + std::to_string(line_of_byte(text, e.byte)) +
                     ": " + e.what());
  }
}

inline void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys,
                         const std::string& where) {
  for (const char* k : keys)
    if (!obj.contains(k)) throw ParseError(where + ": missing key \"" + k + "\"");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* k : keys)
      if (key == k) known = true;
    if (!known) throw ParseError(where + ": unknown key \"" + key + "\"");
  }
}

inline double number_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(where + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace detail

// Directory file: JSON array of {id, x, y, bandwidth_kbps, uptime_s}.
// Order is preserved; invariants are checked here, not at use time.
inline Directory load_directory(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const nlohmann::json doc = detail::parse_json(text, path.string());
  if (!doc.is_array()) throw ParseError(path.string() + ": expected a JSON array of relays");
  std::vector<Relay> relays;
  relays.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    const std::string where = path.string() + ": relay record " + std::to_string(i);
    if (!rec.is_object()) throw ParseError(where + ": expected an object");
    detail::require_keys(rec, {"id", "x", "y", "bandwidth_kbps", "uptime_s"}, where);
    if (!rec.at("id").is_string()) throw ParseError(where + ": \"id\" must be a string");
    Relay r;
    r.id = rec.at("id").get<std::string>();
    r.geo.x = detail::number_field(rec, "x", where);
    r.geo.y = detail::number_field(rec, "y", where);
    r.bandwidth_kbps = detail::number_field(rec, "bandwidth_kbps", where);
    r.uptime_s = detail::number_field(rec, "uptime_s", where);
    relays.push_back(std::move(r));
  }
  try {
    return Directory(std::move(relays));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// History file: JSON array of {x, y, count}. An empty array is a fresh client.
inline VisitHistory load_history(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const nlohmann::json doc = detail::parse_json(text, path.string());
  if (!doc.is_array()) throw ParseError(path.string() + ": expected a JSON array of visits");
  std::vector<VisitEntry> entries;
  entries.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    const std::string where = path.string() + ": visit record " + std::to_string(i);
    if (!rec.is_object()) throw ParseError(where + ": expected an object");
    detail::require_keys(rec, {"x", "y", "count"}, where);
    VisitEntry e;
    e.point.x = detail::number_field(rec, "x", where);
    e.point.y = detail::number_field(rec, "y", where);
    const double c = detail::number_field(rec, "count", where);
    if (c < 1.0 || c != static_cast<double>(static_cast<std::uint64_t>(c)))
      throw ValidationError(where + ": \"count\" must be a positive integer");
    e.count = static_cast<std::uint64_t>(c);
    entries.push_back(e);
  }
  try {
    return VisitHistory(std::move(entries));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace torpath
