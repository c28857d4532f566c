#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace herman {

/// Raised for malformed input: bad literals, wrong parity, points off the simplex.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested state space is larger than the configured solver bound.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated trajectory exceeded the step cap. Treated as a bug, never as data.
class StepCapError : public std::runtime_error {
 public:
  StepCapError(std::uint64_t run_index, std::uint64_t cap)
      : std::runtime_error("run " + std::to_string(run_index) + " exceeded step cap " +
                           std::to_string(cap)),
        run_index_(run_index),
        cap_(cap) {}

  std::uint64_t run_index() const { return run_index_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t run_index_;
  std::uint64_t cap_;
};

}  // namespace herman
