#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dronecd/model.hpp"
#include "dronecd/quantum.hpp"
#include "dronecd/selection.hpp"

namespace dronecd {

enum class Acceptance {
  always,    // take every repaired candidate
  monotone,  // only when the balance objective does not increase
};

struct SolverConfig {
  int qubits = 20;  // m, variables per block
  int max_iterations = 400;
  int stagnation_window = 0;  // stop after this many iterations without a new best; 0 = off
  Acceptance acceptance = Acceptance::always;
  std::optional<double> penalty;  // default_penalty(inst) when unset
  int target_drones = 4;
  int selection_retries = 32;
  VqeConfig vqe;
  std::uint64_t seed = 0;

  SelectionPolicy selection_policy() const {
    return {qubits, target_drones, selection_retries};
  }
};

/// Largest block (and energy table) the engine will simulate.
inline constexpr int kMaxQubits = 24;

struct TraceRecord {
  int iter = 0;
  double f = 0;         // balance objective of the current assignment
  double makespan = 0;  // of the current assignment
  double best_makespan = 0;
  int n_sel = 0;  // |N|, 0 when the iteration was skipped
  int q_sel = 0;  // |Q|
  bool accepted = false;

  bool operator==(const TraceRecord&) const = default;
};

struct SolverState {
  int k = 0;
  double penalty = 0;
  Assignment current;
  Eigen::VectorXd completion;  // T_j of current
  double current_f = 0;
  Assignment best;
  double best_makespan = 0;
  double best_f = 0;
  int last_improvement = 0;  // iteration of the latest best update
  std::vector<TraceRecord> trace;
};

/// Everything one iteration saw, for observers and tests.
struct StepReport {
  int iter = 0;
  Assignment before;
  Eigen::VectorXd completion_before;
  std::optional<Selection> selection;  // empty when skipped
  std::optional<Assignment> candidate;  // empty when skipped or repair rejected
  std::uint64_t vqe_bits = 0;
  double vqe_energy = 0;
  bool accepted = false;
};

using StepObserver = std::function<void(const StepReport&, const SolverState&)>;

/// Longest-route-first greedy: routes by descending r (lower index first on
/// ties) each go to the drone with the smallest resulting completion time
/// (lowest index on ties). An empty drone always wins, so no drone idles.
Assignment initialize(const ScheduleInstance& inst);

/// sum_j (T_j - T/q)^2: the penalized objective at a feasible point, where
/// the penalty term vanishes. `penalty` is accepted for symmetry with the
/// QUBO and does not change the value.
double objective_f(const ScheduleInstance& inst, double penalty, const Assignment& a);

/// Turns a block solution (bit a*|Q| + b for route sel.routes[a] on drone
/// sel.drones[b]) into a full assignment. One-hot routes keep their drone;
/// the rest, by descending r, go to the set drone (or, with none set, the
/// selected drone) with the smallest resulting completion time. Returns
/// nullopt when a drone would end up idle.
std::optional<Assignment> repair(std::span<const std::uint8_t> block_bits,
                                 const Selection& sel, const ScheduleInstance& inst,
                                 const Assignment& current);

/// Initial state (LPT assignment, iteration 0, empty trace).
SolverState start(const ScheduleInstance& inst, const SolverConfig& cfg);

/// One select / build / VQE / repair / accept round. Degenerate selections
/// and rejected repairs leave the assignment unchanged but still add a
/// trace record.
void step(const ScheduleInstance& inst, SolverState& state, const SolverConfig& cfg,
          std::mt19937_64& rng, const StepObserver& observer = {});

struct SolveResult {
  Assignment best;
  double best_makespan = 0;
  double initial_makespan = 0;
  double penalty = 0;
  std::vector<TraceRecord> trace;
  double seconds = 0;
};

/// Runs up to max_iterations steps (fewer with a stagnation window). A
/// single-drone instance has only one assignment and runs no iterations.
/// Deterministic for a fixed config, seed included.
SolveResult solve(const ScheduleInstance& inst, const SolverConfig& cfg,
                  const StepObserver& observer = {});

}  // namespace dronecd
