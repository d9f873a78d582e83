#include "dronecd/oracle.hpp"

#include <cmath>
#include <limits>

namespace dronecd {

MakespanOptimum brute_force_makespan(const ScheduleInstance& inst,
                                     std::uint64_t max_assignments) {
  const int n = inst.n(), q = inst.q();
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > max_assignments / static_cast<std::uint64_t>(q))
      throw CapacityError("q^n exceeds the enumeration budget of " +
                          std::to_string(max_assignments));
    total *= static_cast<std::uint64_t>(q);
  }

  MakespanOptimum best;
  best.makespan = std::numeric_limits<double>::infinity();
  std::vector<int> digits(n, 0);
  std::vector<double> load(q);
  std::vector<int> count(q);
  for (std::uint64_t step = 0; step < total; ++step) {
    std::fill(load.begin(), load.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (int i = 0; i < n; ++i) {
      load[digits[i]] += inst.r(i);
      ++count[digits[i]];
    }
    bool surjective = true;
    double worst = 0;
    for (int j = 0; j < q && surjective; ++j) {
      surjective = count[j] > 0;
      worst = std::max(worst, load[j] + inst.c() * (count[j] - 1));
    }
    if (surjective && worst < best.makespan) {
      best.makespan = worst;
      best.assignment.drone_of = digits;
    }
    // Odometer, route 0 most significant.
    for (int i = n - 1; i >= 0; --i) {
      if (++digits[i] < q) break;
      digits[i] = 0;
    }
  }
  return best;
}

QuboOptimum brute_force_qubo_min(const QuboModel<double>& model, int max_vars) {
  const auto k = model.num_vars();
  if (k > max_vars)
    throw CapacityError("brute force over " + std::to_string(k) +
                        " variables exceeds cap " + std::to_string(max_vars));
  QuboOptimum best;
  best.energy = std::numeric_limits<double>::infinity();
  BitAssignment bits(k);
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << k); ++z) {
    for (Eigen::Index i = 0; i < k; ++i) bits[i] = (z >> i) & 1;
    const double e = qubo_energy(model, bits);
    if (e < best.energy) {
      best.energy = e;
      best.bits = z;
    }
  }
  return best;
}

SurrogateGap surrogate_gap(const ScheduleInstance& inst) {
  SurrogateGap gap;
  gap.optimal_makespan = brute_force_makespan(inst).makespan;

  const auto model = build_full_qubo(inst, default_penalty(inst));
  const auto opt = brute_force_qubo_min(model);
  gap.surrogate_energy = opt.energy;

  BitAssignment bits(model.num_vars());
  for (Eigen::Index i = 0; i < model.num_vars(); ++i) bits[i] = (opt.bits >> i) & 1;
  Assignment a;
  gap.surrogate_feasible = from_bits(inst, bits, a) && is_feasible(inst, a);
  if (gap.surrogate_feasible) {
    gap.surrogate_makespan = makespan(inst, a);
    gap.agree = std::abs(gap.surrogate_makespan - gap.optimal_makespan) <=
                1e-9 * std::max(1.0, gap.optimal_makespan);
  }
  return gap;
}

SurrogateGapReport surrogate_gap_report(std::span<const ScheduleInstance> instances) {
  SurrogateGapReport report;
  int agreed = 0;
  for (const auto& inst : instances) {
    report.entries.push_back(surrogate_gap(inst));
    agreed += report.entries.back().agree;
  }
  if (!instances.empty())
    report.agreement_rate = static_cast<double>(agreed) / static_cast<double>(instances.size());
  return report;
}

}  // namespace dronecd
