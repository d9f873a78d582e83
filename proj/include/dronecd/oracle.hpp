#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dronecd/model.hpp"
#include "dronecd/qubo.hpp"

namespace dronecd {

// Exhaustive references. Desk-scale only; every entry point has a budget.

struct MakespanOptimum {
  double makespan = 0;
  Assignment assignment;  // lexicographically first optimum over drone_of
};

/// Enumerates every route->drone map with no idle drone. Throws
/// CapacityError when q^n exceeds max_assignments.
MakespanOptimum brute_force_makespan(const ScheduleInstance& inst,
                                     std::uint64_t max_assignments = 10'000'000);

struct QuboOptimum {
  double energy = 0;
  std::uint64_t bits = 0;  // lowest-index minimizer, bit i = variable i
};

/// Evaluates all 2^k bit vectors with qubo_energy. Throws CapacityError past
/// max_vars.
QuboOptimum brute_force_qubo_min(const QuboModel<double>& model, int max_vars = 24);

struct SurrogateGap {
  double optimal_makespan = 0;
  double surrogate_energy = 0;       // min of the penalized objective
  bool surrogate_feasible = false;   // its minimizer is one-hot with no idle drone
  double surrogate_makespan = 0;     // makespan of that minimizer when feasible
  bool agree = false;
};

/// Compares the makespan optimum with the minimizer of the penalized
/// balance objective (default penalty). n*q must be <= 24.
SurrogateGap surrogate_gap(const ScheduleInstance& inst);

struct SurrogateGapReport {
  std::vector<SurrogateGap> entries;
  double agreement_rate = 0;
};

SurrogateGapReport surrogate_gap_report(std::span<const ScheduleInstance> instances);

}  // namespace dronecd
