#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dronecd/errors.hpp"

namespace dronecd {

/// n routes with completion times r, q identical drones, recharge time c
/// between consecutive routes on the same drone.
///
/// Indices are zero-based throughout: route i in [0, n), drone j in [0, q).
class ScheduleInstance {
 public:
  /// Throws InstanceError unless n > q >= 1, every r_i > 0 and c >= 0.
  ScheduleInstance(Eigen::VectorXd routes, int drones, double recharge);

  /// Same checks except n > q. Sub-models and worked examples (more drones
  /// than routes) are valid inputs for the QUBO builders but not for
  /// solving.
  static ScheduleInstance relaxed(Eigen::VectorXd routes, int drones,
                                  double recharge);

  int n() const { return static_cast<int>(routes_.size()); }
  int q() const { return drones_; }
  double c() const { return recharge_; }
  const Eigen::VectorXd& r() const { return routes_; }
  double r(int i) const { return routes_[i]; }

  bool operator==(const ScheduleInstance& other) const {
    return drones_ == other.drones_ && recharge_ == other.recharge_ &&
           routes_ == other.routes_;
  }

 private:
  ScheduleInstance(Eigen::VectorXd routes, int drones, double recharge,
                   bool require_more_routes);

  Eigen::VectorXd routes_;
  int drones_;
  double recharge_;
};

/// Route -> drone map; drone_of[i] is the drone flying route i.
struct Assignment {
  std::vector<int> drone_of;

  bool operator==(const Assignment&) const = default;
};

/// Flat route-major binary encoding: bit i*q + j is x_{i,j}.
using BitAssignment = std::vector<std::uint8_t>;

/// Number of routes on each drone. Throws DimensionError on a size or
/// drone-index mismatch.
std::vector<int> route_counts(const ScheduleInstance& inst,
                              const Assignment& a);

/// Every route on a drone in [0, q) and no drone idle.
bool is_feasible(const ScheduleInstance& inst, const Assignment& a);

/// T_j = sum of r_i on drone j + c * (count_j - 1). Throws IdleDroneError if
/// any drone has no route.
Eigen::VectorXd completion_times(const ScheduleInstance& inst,
                                 const Assignment& a);

double makespan(const ScheduleInstance& inst, const Assignment& a);

/// Sum over drones of T_j, which is the same for every assignment without
/// idle drones: sum r_i + c * (n - q).
double total_time(const ScheduleInstance& inst);

/// max(max_i r_i, T / q).
double lower_bound(const ScheduleInstance& inst);

BitAssignment to_bits(const ScheduleInstance& inst, const Assignment& a);

/// Inverse of to_bits for one-hot rows; returns false if some route block
/// does not contain exactly one set bit.
bool from_bits(const ScheduleInstance& inst, std::span<const std::uint8_t> bits,
               Assignment& out);

}  // namespace dronecd
