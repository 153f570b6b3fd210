#pragma once

#include <stdexcept>
#include <string>

namespace cqft {

/// Malformed input: bad partition, inconsistent dimensions, missing normalization data.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Fock-space operation would exceed the particle-number cutoff.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cqft
