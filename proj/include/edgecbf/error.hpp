#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgecbf {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatches, invalid indices, bad parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

// A linear objective has no finite maximizer over a polytope.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

// A corridor cannot be used as given (goal outside the last set, broken chain).
class CorridorError : public Error {
 public:
  using Error::Error;
};

// Occupancy grid has no free 4-connected path from start to goal.
class NoPathError : public Error {
 public:
  using Error::Error;
};

// An edge point is already outside its active set when constraints are built.
class UnsafeStateError : public Error {
 public:
  UnsafeStateError(std::size_t edge, std::size_t set, double value)
      : Error("edge point " + std::to_string(edge) + " is outside set " +
              std::to_string(set) + " (barrier " + std::to_string(value) + ")"),
        edge_(edge),
        set_(set),
        value_(value) {}

  std::size_t edge() const { return edge_; }
  std::size_t set() const { return set_; }
  double value() const { return value_; }

 private:
  std::size_t edge_;
  std::size_t set_;
  double value_;
};

}  // namespace edgecbf
