#pragma once

#include <stdexcept>
#include <string>

namespace scalelaw {

/// Invalid or inconsistent input data (bad rows, unfittable sets, mismatched
/// groups). The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad invocation: unknown flags, missing required options, malformed ranges.
/// The CLI maps this to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bootstrap could not draw a replicate with two distinct abscissae within
/// the configured number of redraws.
class DegenerateBootstrap : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace scalelaw
