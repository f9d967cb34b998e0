#pragma once

#include <stdexcept>
#include <string>

namespace gg {

// Base for all library failures; the CLI maps these to diagnostics + exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct IndexError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Raised when a gradient or parameter goes non-finite during training.
struct DivergenceError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace gg
