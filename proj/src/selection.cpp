#include "dronecd/selection.hpp"

#include <algorithm>
#include <numeric>

#include "dronecd/errors.hpp"

namespace dronecd {

namespace {

bool sorted_unique_in_range(const std::vector<int>& v, int limit) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < 0 || v[k] >= limit) return false;
    if (k > 0 && v[k] <= v[k - 1]) return false;
  }
  return true;
}

bool contains(const std::vector<int>& sorted, int x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

// First `count` entries of `pool` become a uniform sample without
// replacement (partial Fisher-Yates).
void partial_shuffle(std::vector<int>& pool, std::size_t count,
                     std::mt19937_64& rng) {
  count = std::min(count, pool.size());
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
}

}  // namespace

const char* to_string(SelectionViolation v) {
  switch (v) {
    case SelectionViolation::none: return "ok";
    case SelectionViolation::malformed: return "malformed selection";
    case SelectionViolation::qubit_budget: return "block exceeds qubit budget";
    case SelectionViolation::unhosted_route: return "selected route not hosted in Q";
    case SelectionViolation::missing_busiest: return "busiest drone not in Q";
    case SelectionViolation::missing_idlest: return "idlest drone not in Q";
  }
  return "unknown";
}

int busiest_drone(const Eigen::VectorXd& completion) {
  Eigen::Index j = 0;
  completion.maxCoeff(&j);  // first occurrence
  return static_cast<int>(j);
}

int idlest_drone(const Eigen::VectorXd& completion) {
  Eigen::Index j = 0;
  completion.minCoeff(&j);
  return static_cast<int>(j);
}

SelectionCheck validate_selection(const Assignment& current, int drones,
                                  const Eigen::VectorXd& completion,
                                  const Selection& sel, int qubits) {
  const int n = static_cast<int>(current.drone_of.size());
  if (sel.routes.empty() || sel.drones.empty() ||
      !sorted_unique_in_range(sel.routes, n) ||
      !sorted_unique_in_range(sel.drones, drones) || completion.size() != drones)
    return {SelectionViolation::malformed, "indices empty, repeated or out of range"};

  if (sel.num_vars() > qubits)
    return {SelectionViolation::qubit_budget,
            std::to_string(sel.num_vars()) + " variables > " + std::to_string(qubits)};

  for (int i : sel.routes)
    if (!contains(sel.drones, current.drone_of[i]))
      return {SelectionViolation::unhosted_route,
              "route " + std::to_string(i) + " flies on drone " +
                  std::to_string(current.drone_of[i])};

  if (const int j = busiest_drone(completion); !contains(sel.drones, j))
    return {SelectionViolation::missing_busiest, "drone " + std::to_string(j)};
  if (const int j = idlest_drone(completion); !contains(sel.drones, j))
    return {SelectionViolation::missing_idlest, "drone " + std::to_string(j)};
  return {};
}

SelectionCheck validate_selection(const ScheduleInstance& inst,
                                  const Assignment& current,
                                  const Eigen::VectorXd& completion,
                                  const Selection& sel, int qubits) {
  if (static_cast<int>(current.drone_of.size()) != inst.n())
    return {SelectionViolation::malformed, "assignment size mismatch"};
  return validate_selection(current, inst.q(), completion, sel, qubits);
}

Selection select_subsets(const ScheduleInstance& inst, const Assignment& current,
                         const Eigen::VectorXd& completion,
                         const SelectionPolicy& policy, std::mt19937_64& rng) {
  const int q = inst.q();
  if (q < 2) throw DegenerateSelectionError("a single drone has nothing to rebalance");
  if (policy.qubits < 2) throw std::invalid_argument("qubit budget must be >= 2");
  if (completion.size() != q) throw DimensionError("completion vector size != q");

  std::vector<int> forced{busiest_drone(completion), idlest_drone(completion)};
  std::sort(forced.begin(), forced.end());
  forced.erase(std::unique(forced.begin(), forced.end()), forced.end());

  const int forced_count = static_cast<int>(forced.size());
  const int drone_count = std::max(
      forced_count, std::min({q, policy.target_drones, policy.qubits / 2}));
  const int route_count = policy.qubits / drone_count;

  std::vector<int> others;
  for (int j = 0; j < q; ++j)
    if (!std::binary_search(forced.begin(), forced.end(), j)) others.push_back(j);
  const bool has_choice =
      drone_count > forced_count &&
      static_cast<int>(others.size()) > drone_count - forced_count;

  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    Selection sel;
    sel.drones = forced;
    partial_shuffle(others, drone_count - forced_count, rng);
    sel.drones.insert(sel.drones.end(), others.begin(),
                      others.begin() + (drone_count - forced_count));
    std::sort(sel.drones.begin(), sel.drones.end());

    std::vector<int> pool;
    for (int i = 0; i < inst.n(); ++i)
      if (contains(sel.drones, current.drone_of[i])) pool.push_back(i);

    if (pool.size() > sel.drones.size()) {
      partial_shuffle(pool, route_count, rng);
      pool.resize(std::min<std::size_t>(pool.size(), route_count));
      std::sort(pool.begin(), pool.end());
      sel.routes = std::move(pool);
      return sel;
    }
    if (!has_choice) break;
  }
  throw DegenerateSelectionError(
      "every candidate drone block flies one route per drone");
}

}  // namespace dronecd
