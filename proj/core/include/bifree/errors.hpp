#pragma once

#include <stdexcept>
#include <string>

namespace bifree {

// Malformed or inconsistent input: bad chi-word, partition not covering {1..n},
// unknown symbol, dimension mismatch.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A well-formed request that could not be carried out: truncation overflow,
// non-finite values, failed internal consistency checks.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bifree
