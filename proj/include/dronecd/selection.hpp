#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dronecd/model.hpp"

namespace dronecd {

/// Route subset N and drone subset Q; the free block is N x Q. Both lists
/// are kept sorted ascending and duplicate-free.
struct Selection {
  std::vector<int> routes;
  std::vector<int> drones;

  int num_vars() const {
    return static_cast<int>(routes.size() * drones.size());
  }
  bool operator==(const Selection&) const = default;
};

struct SelectionPolicy {
  int qubits = 20;        // m
  int target_drones = 4;  // preferred |Q|
  int max_retries = 32;
};

enum class SelectionViolation {
  none,
  malformed,         // empty, out-of-range, unsorted or repeated indices
  qubit_budget,      // |N| * |Q| <= m
  unhosted_route,    // every route in N sits on a drone in Q
  missing_busiest,   // argmax_j T_j in Q
  missing_idlest,    // argmin_j T_j in Q
};

struct SelectionCheck {
  SelectionViolation violation = SelectionViolation::none;
  std::string detail;

  bool ok() const { return violation == SelectionViolation::none; }
};

const char* to_string(SelectionViolation v);

/// Lowest index among the maximal / minimal entries.
int busiest_drone(const Eigen::VectorXd& completion);
int idlest_drone(const Eigen::VectorXd& completion);

/// Reports the first violated condition, checked in the order listed in
/// SelectionViolation. Needs only the assignment and completion times, so
/// states with idle drones can be checked too.
SelectionCheck validate_selection(const Assignment& current, int drones,
                                  const Eigen::VectorXd& completion,
                                  const Selection& sel, int qubits);

SelectionCheck validate_selection(const ScheduleInstance& inst,
                                  const Assignment& current,
                                  const Eigen::VectorXd& completion,
                                  const Selection& sel, int qubits);

/// Draws a block around the busiest and idlest drones.
///
/// Q holds argmax T and argmin T plus uniformly drawn distinct drones up to
/// min(q, target_drones, m/2) (never fewer than the two forced drones);
/// |N| = m / |Q|, drawn without replacement from the routes currently
/// flown by drones in Q. A draw where every drone in Q flies exactly one
/// route cannot change anything and is redrawn up to max_retries times.
///
/// Throws DegenerateSelectionError when q < 2 or no useful draw was found.
Selection select_subsets(const ScheduleInstance& inst, const Assignment& current,
                         const Eigen::VectorXd& completion,
                         const SelectionPolicy& policy, std::mt19937_64& rng);

}  // namespace dronecd
