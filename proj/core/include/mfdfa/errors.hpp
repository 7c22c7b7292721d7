#pragma once

#include <stdexcept>

namespace mfdfa {

/// Base class of everything this library throws.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The three subclasses map onto the CLI exit codes:
//   config_error  -> 2   bad parameters, grid/range violations
//   data_error    -> 3   malformed or insufficient input data
//   numeric_error -> 4   degenerate series, failed fits or transforms

class config_error : public error {
 public:
  using error::error;
};

class data_error : public error {
 public:
  using error::error;
};

class numeric_error : public error {
 public:
  using error::error;
};

}  // namespace mfdfa
