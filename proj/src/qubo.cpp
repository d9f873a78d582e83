#include "dronecd/qubo.hpp"

#include <algorithm>

namespace dronecd {

double default_penalty(const ScheduleInstance& inst) {
  return inst.r().sum() + inst.c() * inst.n();
}

QuboModel<double> build_full_qubo(const ScheduleInstance& inst, double penalty,
                                  const FullQuboLimits& limits) {
  if (!(penalty >= 0.0)) throw std::invalid_argument("penalty must be >= 0");
  const Eigen::Index n = inst.n(), q = inst.q();
  const Eigen::Index vars = n * q;
  const Eigen::Index terms = vars + q * (n * (n - 1) / 2) + n * (q * (q - 1) / 2);
  if (vars > limits.max_vars || terms > limits.max_terms)
    throw CapacityError("full model needs " + std::to_string(vars) + " variables and " +
                        std::to_string(terms) + " terms");

  // T_j - T/q = sum_i w_i x_ij - k with w_i = r_i + c and k = c + T/q.
  const Eigen::VectorXd w = inst.r().array() + inst.c();
  const double k = inst.c() + total_time(inst) / static_cast<double>(q);

  QuboBuilder<double> b(vars);
  b.add_offset(static_cast<double>(q) * k * k + penalty * static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < q; ++j)
      b.add_linear(i * q + j, w[i] * w[i] - 2.0 * k * w[i] - penalty);

  for (Eigen::Index j = 0; j < q; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index i2 = i + 1; i2 < n; ++i2)
        b.add_quadratic(i * q + j, i2 * q + j, 2.0 * w[i] * w[i2]);

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < q; ++j)
      for (Eigen::Index j2 = j + 1; j2 < q; ++j2)
        b.add_quadratic(i * q + j, i * q + j2, 2.0 * penalty);

  return b.build();
}

SubproblemQubo build_subproblem_qubo(const ScheduleInstance& inst, double penalty,
                                     const Assignment& current,
                                     const Selection& sel, Eigen::Index max_vars) {
  if (!(penalty >= 0.0)) throw std::invalid_argument("penalty must be >= 0");
  const int n = inst.n(), q = inst.q();
  if (static_cast<int>(current.drone_of.size()) != n)
    throw InvalidSelectionError("assignment size does not match instance");
  for (int j : current.drone_of)
    if (j < 0 || j >= q) throw InvalidSelectionError("assignment drone index out of range");

  auto check_indices = [](const std::vector<int>& v, int limit, const char* what) {
    if (v.empty()) throw InvalidSelectionError(std::string("empty ") + what + " set");
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k] < 0 || v[k] >= limit || (k > 0 && v[k] <= v[k - 1]))
        throw InvalidSelectionError(std::string(what) +
                                    " indices must be sorted, unique and in range");
  };
  check_indices(sel.routes, n, "route");
  check_indices(sel.drones, q, "drone");

  const auto nsel = static_cast<Eigen::Index>(sel.routes.size());
  const auto qsel = static_cast<Eigen::Index>(sel.drones.size());
  if (nsel * qsel > max_vars)
    throw CapacityError("block of " + std::to_string(nsel * qsel) +
                        " variables exceeds budget " + std::to_string(max_vars));

  std::vector<int> drone_pos(q, -1);
  for (Eigen::Index b = 0; b < qsel; ++b) drone_pos[sel.drones[b]] = static_cast<int>(b);
  std::vector<char> in_block(n, 0);
  for (int i : sel.routes) {
    if (drone_pos[current.drone_of[i]] < 0)
      throw InvalidSelectionError("route " + std::to_string(i) +
                                  " is not flown by a selected drone");
    in_block[i] = 1;
  }

  // Frozen part of T_j: routes outside N keep their drone.
  Eigen::VectorXd base = Eigen::VectorXd::Constant(q, -inst.c());
  for (int i = 0; i < n; ++i)
    if (!in_block[i]) base[current.drone_of[i]] += inst.r(i) + inst.c();
  const double mean = total_time(inst) / static_cast<double>(q);

  SubproblemQubo out;
  QuboBuilder<double> b(nsel * qsel);
  for (int j = 0; j < q; ++j)
    if (drone_pos[j] < 0) b.add_offset((base[j] - mean) * (base[j] - mean));

  for (Eigen::Index bq = 0; bq < qsel; ++bq) {
    const double k = mean - base[sel.drones[bq]];
    b.add_offset(k * k);
    for (Eigen::Index a = 0; a < nsel; ++a) {
      const double w = inst.r(sel.routes[a]) + inst.c();
      b.add_linear(a * qsel + bq, w * w - 2.0 * k * w);
      for (Eigen::Index a2 = a + 1; a2 < nsel; ++a2) {
        const double w2 = inst.r(sel.routes[a2]) + inst.c();
        b.add_quadratic(a * qsel + bq, a2 * qsel + bq, 2.0 * w * w2);
      }
    }
  }

  for (Eigen::Index a = 0; a < nsel; ++a) {
    b.add_offset(penalty);
    for (Eigen::Index bq = 0; bq < qsel; ++bq) {
      b.add_linear(a * qsel + bq, -penalty);
      for (Eigen::Index bq2 = bq + 1; bq2 < qsel; ++bq2)
        b.add_quadratic(a * qsel + bq, a * qsel + bq2, 2.0 * penalty);
    }
  }

  out.model = b.build();
  out.vars.reserve(nsel * qsel);
  for (int i : sel.routes)
    for (int j : sel.drones) out.vars.emplace_back(i, j);
  return out;
}

}  // namespace dronecd
