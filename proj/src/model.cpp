#include "dronecd/model.hpp"

#include <cmath>
#include <string>

namespace dronecd {

ScheduleInstance::ScheduleInstance(Eigen::VectorXd routes, int drones,
                                   double recharge)
    : ScheduleInstance(std::move(routes), drones, recharge, true) {}

ScheduleInstance ScheduleInstance::relaxed(Eigen::VectorXd routes, int drones,
                                           double recharge) {
  return ScheduleInstance(std::move(routes), drones, recharge, false);
}

ScheduleInstance::ScheduleInstance(Eigen::VectorXd routes, int drones,
                                   double recharge, bool require_more_routes)
    : routes_(std::move(routes)), drones_(drones), recharge_(recharge) {
  if (drones_ < 1) throw InstanceError("drone count q must be >= 1");
  if (routes_.size() < 1) throw InstanceError("at least one route required");
  if (require_more_routes && routes_.size() <= drones_)
    throw InstanceError("route count n = " + std::to_string(routes_.size()) +
                        " must exceed drone count q = " +
                        std::to_string(drones_));
  if (!std::isfinite(recharge_) || recharge_ < 0.0)
    throw InstanceError("recharge time c must be finite and >= 0");
  for (Eigen::Index i = 0; i < routes_.size(); ++i) {
    if (!std::isfinite(routes_[i]) || routes_[i] <= 0.0)
      throw InstanceError("route time r[" + std::to_string(i) +
                          "] must be finite and > 0");
  }
}

std::vector<int> route_counts(const ScheduleInstance& inst,
                              const Assignment& a) {
  if (static_cast<int>(a.drone_of.size()) != inst.n())
    throw DimensionError("assignment covers " +
                         std::to_string(a.drone_of.size()) + " routes, expected " +
                         std::to_string(inst.n()));
  std::vector<int> counts(inst.q(), 0);
  for (int j : a.drone_of) {
    if (j < 0 || j >= inst.q())
      throw DimensionError("drone index " + std::to_string(j) + " out of range");
    ++counts[j];
  }
  return counts;
}

bool is_feasible(const ScheduleInstance& inst, const Assignment& a) {
  if (static_cast<int>(a.drone_of.size()) != inst.n()) return false;
  std::vector<int> counts(inst.q(), 0);
  for (int j : a.drone_of) {
    if (j < 0 || j >= inst.q()) return false;
    ++counts[j];
  }
  for (int cnt : counts)
    if (cnt == 0) return false;
  return true;
}

Eigen::VectorXd completion_times(const ScheduleInstance& inst,
                                 const Assignment& a) {
  const auto counts = route_counts(inst, a);
  for (int j = 0; j < inst.q(); ++j)
    if (counts[j] == 0)
      throw IdleDroneError("drone " + std::to_string(j) + " has no routes");

  Eigen::VectorXd t = Eigen::VectorXd::Zero(inst.q());
  for (int i = 0; i < inst.n(); ++i) t[a.drone_of[i]] += inst.r(i);
  for (int j = 0; j < inst.q(); ++j) t[j] += inst.c() * (counts[j] - 1);
  return t;
}

double makespan(const ScheduleInstance& inst, const Assignment& a) {
  return completion_times(inst, a).maxCoeff();
}

double total_time(const ScheduleInstance& inst) {
  return inst.r().sum() + inst.c() * (inst.n() - inst.q());
}

double lower_bound(const ScheduleInstance& inst) {
  return std::max(inst.r().maxCoeff(), total_time(inst) / inst.q());
}

BitAssignment to_bits(const ScheduleInstance& inst, const Assignment& a) {
  route_counts(inst, a);  // validates indices
  BitAssignment bits(static_cast<std::size_t>(inst.n()) * inst.q(), 0);
  for (int i = 0; i < inst.n(); ++i)
    bits[static_cast<std::size_t>(i) * inst.q() + a.drone_of[i]] = 1;
  return bits;
}

bool from_bits(const ScheduleInstance& inst, std::span<const std::uint8_t> bits,
               Assignment& out) {
  const auto q = static_cast<std::size_t>(inst.q());
  if (bits.size() != static_cast<std::size_t>(inst.n()) * q) return false;
  Assignment a;
  a.drone_of.resize(inst.n());
  for (int i = 0; i < inst.n(); ++i) {
    int chosen = -1;
    for (std::size_t j = 0; j < q; ++j) {
      if (!bits[i * q + j]) continue;
      if (chosen >= 0) return false;
      chosen = static_cast<int>(j);
    }
    if (chosen < 0) return false;
    a.drone_of[i] = chosen;
  }
  out = std::move(a);
  return true;
}

}  // namespace dronecd
