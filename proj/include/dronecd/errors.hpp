#pragma once

#include <stdexcept>
#include <string>

namespace dronecd {

/// Instance data violates n > q >= 1, r_i > 0 or c >= 0.
struct InstanceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A drone with no routes was passed where every drone must work.
struct IdleDroneError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A size budget (variables, terms, enumeration count) was exceeded.
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// No legal rebalancing block could be drawn.
struct DegenerateSelectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dronecd

namespace dronecd {

/// A route/drone block is malformed or inconsistent with the assignment.
struct InvalidSelectionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace dronecd
