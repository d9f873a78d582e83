#include "dronecd/engine.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "dronecd/qubo.hpp"

namespace dronecd {

namespace {

// Completion time of a drone after it takes one more route.
double loaded(double load, int count, double r, double c) {
  return count > 0 ? load + r + c : r;
}

std::vector<int> by_descending_time(const ScheduleInstance& inst, std::vector<int> routes) {
  std::stable_sort(routes.begin(), routes.end(),
                   [&](int a, int b) { return inst.r(a) > inst.r(b); });
  return routes;
}

void validate(const SolverConfig& cfg) {
  if (cfg.qubits < 2 || cfg.qubits > kMaxQubits)
    throw std::invalid_argument("qubit budget must be in [2, " +
                                std::to_string(kMaxQubits) + "]");
  if (cfg.max_iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (cfg.stagnation_window < 0) throw std::invalid_argument("stagnation window must be >= 0");
  if (cfg.target_drones < 2) throw std::invalid_argument("target drones must be >= 2");
  if (cfg.penalty && !(*cfg.penalty >= 0.0)) throw std::invalid_argument("penalty must be >= 0");
  if (cfg.vqe.layers < 1 || cfg.vqe.restarts < 1 || cfg.vqe.top_k < 1)
    throw std::invalid_argument("VQE layers, restarts and top_k must be >= 1");
}

}  // namespace

Assignment initialize(const ScheduleInstance& inst) {
  std::vector<int> order(inst.n());
  std::iota(order.begin(), order.end(), 0);
  order = by_descending_time(inst, std::move(order));

  std::vector<double> load(inst.q(), 0.0);
  std::vector<int> count(inst.q(), 0);
  Assignment a;
  a.drone_of.assign(inst.n(), -1);
  for (int i : order) {
    int pick = 0;
    double pick_time = loaded(load[0], count[0], inst.r(i), inst.c());
    for (int j = 1; j < inst.q(); ++j) {
      const double t = loaded(load[j], count[j], inst.r(i), inst.c());
      if (t < pick_time) {
        pick = j;
        pick_time = t;
      }
    }
    a.drone_of[i] = pick;
    load[pick] = pick_time;
    ++count[pick];
  }
  return a;
}

double objective_f(const ScheduleInstance& inst, double /*penalty*/, const Assignment& a) {
  const Eigen::VectorXd t = completion_times(inst, a);
  return (t.array() - total_time(inst) / inst.q()).square().sum();
}

std::optional<Assignment> repair(std::span<const std::uint8_t> block_bits,
                                 const Selection& sel, const ScheduleInstance& inst,
                                 const Assignment& current) {
  const std::size_t nsel = sel.routes.size(), qsel = sel.drones.size();
  if (block_bits.size() != nsel * qsel)
    throw DimensionError("block has " + std::to_string(block_bits.size()) +
                         " bits, selection needs " + std::to_string(nsel * qsel));
  route_counts(inst, current);  // validates indices

  Assignment out = current;
  std::vector<char> in_block(inst.n(), 0);
  for (int i : sel.routes) in_block[i] = 1;

  std::vector<double> load(inst.q(), 0.0);
  std::vector<int> count(inst.q(), 0);
  auto place = [&](int i, int j) {
    load[j] = loaded(load[j], count[j], inst.r(i), inst.c());
    ++count[j];
    out.drone_of[i] = j;
  };
  for (int i = 0; i < inst.n(); ++i)
    if (!in_block[i]) place(i, current.drone_of[i]);

  std::vector<int> pending;
  std::vector<std::vector<int>> chosen(nsel);
  for (std::size_t a = 0; a < nsel; ++a) {
    for (std::size_t b = 0; b < qsel; ++b)
      if (block_bits[a * qsel + b]) chosen[a].push_back(sel.drones[b]);
    if (chosen[a].size() == 1)
      place(sel.routes[a], chosen[a].front());
    else
      pending.push_back(static_cast<int>(a));
  }

  std::stable_sort(pending.begin(), pending.end(), [&](int a, int b) {
    return inst.r(sel.routes[a]) > inst.r(sel.routes[b]);
  });
  for (int a : pending) {
    const int i = sel.routes[a];
    const std::vector<int>& options = chosen[a].empty() ? sel.drones : chosen[a];
    int pick = options.front();
    double pick_time = loaded(load[pick], count[pick], inst.r(i), inst.c());
    for (int j : options) {
      const double t = loaded(load[j], count[j], inst.r(i), inst.c());
      if (t < pick_time || (t == pick_time && j < pick)) {
        pick = j;
        pick_time = t;
      }
    }
    place(i, pick);
  }

  if (std::find(count.begin(), count.end(), 0) != count.end()) return std::nullopt;
  return out;
}

SolverState start(const ScheduleInstance& inst, const SolverConfig& cfg) {
  validate(cfg);
  SolverState s;
  s.penalty = cfg.penalty.value_or(default_penalty(inst));
  s.current = initialize(inst);
  s.completion = completion_times(inst, s.current);
  s.current_f = objective_f(inst, s.penalty, s.current);
  s.best = s.current;
  s.best_makespan = s.completion.maxCoeff();
  s.best_f = s.current_f;
  return s;
}

void step(const ScheduleInstance& inst, SolverState& state, const SolverConfig& cfg,
          std::mt19937_64& rng, const StepObserver& observer) {
  StepReport report;
  report.iter = ++state.k;
  report.before = state.current;
  report.completion_before = state.completion;

  try {
    report.selection = select_subsets(inst, state.current, state.completion,
                                      cfg.selection_policy(), rng);
  } catch (const DegenerateSelectionError&) {
    report.selection.reset();
  }

  if (report.selection) {
    const Selection& sel = *report.selection;
    const auto sub = build_subproblem_qubo(inst, state.penalty, state.current, sel, cfg.qubits);
    const auto table = precompute_energy_table(sub.model, kMaxQubits);
    const auto vqe = vqe_minimize(sub.model, table, cfg.vqe, rng);
    report.vqe_bits = vqe.best_bits;
    report.vqe_energy = vqe.best_energy;

    std::vector<std::uint8_t> bits(sub.vars.size());
    for (std::size_t v = 0; v < bits.size(); ++v) bits[v] = (vqe.best_bits >> v) & 1;
    report.candidate = repair(bits, sel, inst, state.current);
  }

  if (report.candidate) {
    const Assignment& cand = *report.candidate;
    const double cand_f = objective_f(inst, state.penalty, cand);
    const double cand_makespan = makespan(inst, cand);
    if (cand_makespan < state.best_makespan ||
        (cand_makespan == state.best_makespan && cand_f < state.best_f)) {
      if (cand_makespan < state.best_makespan) state.last_improvement = state.k;
      state.best = cand;
      state.best_makespan = cand_makespan;
      state.best_f = cand_f;
    }
    report.accepted = cfg.acceptance == Acceptance::always || cand_f <= state.current_f;
    if (report.accepted) {
      state.current = cand;
      state.completion = completion_times(inst, cand);
      state.current_f = cand_f;
    }
  }

  TraceRecord rec;
  rec.iter = state.k;
  rec.f = state.current_f;
  rec.makespan = state.completion.maxCoeff();
  rec.best_makespan = state.best_makespan;
  if (report.selection) {
    rec.n_sel = static_cast<int>(report.selection->routes.size());
    rec.q_sel = static_cast<int>(report.selection->drones.size());
  }
  rec.accepted = report.accepted;
  state.trace.push_back(rec);

  if (observer) observer(report, state);
}

SolveResult solve(const ScheduleInstance& inst, const SolverConfig& cfg,
                  const StepObserver& observer) {
  const auto t0 = std::chrono::steady_clock::now();
  SolverState state = start(inst, cfg);
  SolveResult result;
  result.initial_makespan = state.best_makespan;
  result.penalty = state.penalty;

  if (inst.q() >= 2) {
    std::mt19937_64 rng(cfg.seed);
    for (int it = 0; it < cfg.max_iterations; ++it) {
      step(inst, state, cfg, rng, observer);
      if (cfg.stagnation_window > 0 &&
          state.k - state.last_improvement >= cfg.stagnation_window)
        break;
    }
  }

  result.best = std::move(state.best);
  result.best_makespan = state.best_makespan;
  result.trace = std::move(state.trace);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace dronecd
