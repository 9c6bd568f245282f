#pragma once

#include <array>
#include <string>
#include <string_view>

#include "torpath/errors.hpp"

namespace torpath {

enum class StrategyTag { Random, Default, Geo, Composite };

inline constexpr std::array<StrategyTag, 4> kAllStrategies = {
    StrategyTag::Random, StrategyTag::Default, StrategyTag::Geo, StrategyTag::Composite};

inline std::string_view to_string(StrategyTag s) {
  switch (s) {
    case StrategyTag::Random: return "random";
    case StrategyTag::Default: return "default";
    case StrategyTag::Geo: return "geo";
    case StrategyTag::Composite: return "composite";
  }
  return "?";
}

inline StrategyTag parse_strategy(std::string_view name) {
  for (StrategyTag s : kAllStrategies)
    if (name == to_string(s)) return s;
  throw ValidationError("unknown strategy \"" + std::string(name) +
                        "\" (expected random, default, geo, or composite)");
}

}  // namespace torpath
