#pragma once

#include <stdexcept>

namespace torpath {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file: JSON syntax, missing field, wrong type, unknown key.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid input that violates a documented invariant.
struct ValidationError : Error {
  using Error::Error;
};

// A circuit was requested from a directory with fewer than three relays.
struct InsufficientRelaysError : ValidationError {
  using ValidationError::ValidationError;
};

// avg_geo over an empty history; callers branch to uniform exit selection.
struct EmptyHistoryError : Error {
  using Error::Error;
};

}  // namespace torpath
