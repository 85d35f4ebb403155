#pragma once

#include <stdexcept>
#include <string>

namespace nashsplit {

/// Block shapes or matrix dimensions disagree.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A descriptor failed validation at construction time.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A solver configuration violates the admissible step range (or another
/// run-time contract); refused before any iteration is taken.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Problem file could not be parsed or failed schema validation.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nashsplit
