#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dronecd/errors.hpp"
#include "dronecd/nelder_mead.hpp"
#include "dronecd/qubo.hpp"

namespace dronecd {

// Basis ordering is little-endian: qubit i is bit i of the basis index, and
// QUBO variable i is measured on qubit i.

template <typename Scalar>
using StateVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Per layer: first rotation block theta_0[0..k), then theta_1[0..k).
template <typename Scalar>
using AnsatzParams = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Diagonal Hamiltonian: entry z is the energy of basis state z.
template <typename Scalar>
class EnergyTable {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit EnergyTable(Vector energies) : energies_(std::move(energies)) {
    const auto size = static_cast<std::uint64_t>(energies_.size());
    if (size == 0 || !std::has_single_bit(size))
      throw DimensionError("energy table length must be a power of two");
    if (!energies_.allFinite()) throw std::invalid_argument("non-finite energy");
  }

  int num_qubits() const {
    return std::countr_zero(static_cast<std::uint64_t>(energies_.size()));
  }
  Eigen::Index size() const { return energies_.size(); }
  Scalar operator[](Eigen::Index z) const { return energies_[z]; }
  const Vector& energies() const { return energies_; }

 private:
  Vector energies_;
};

namespace detail {

template <typename Scalar>
void apply_ry(StateVector<Scalar>& psi, int qubit, Scalar theta) {
  const Scalar c = std::cos(theta / 2), s = std::sin(theta / 2);
  const Eigen::Index stride = Eigen::Index{1} << qubit;
  const Eigen::Index dim = psi.size();
  for (Eigen::Index base = 0; base < dim; base += 2 * stride)
    for (Eigen::Index z = base; z < base + stride; ++z) {
      const auto a0 = psi[z], a1 = psi[z + stride];
      psi[z] = c * a0 - s * a1;
      psi[z + stride] = s * a0 + c * a1;
    }
}

// CZ on every consecutive pair (i, i+1): sign flips once per adjacent pair
// of set bits.
template <typename Scalar>
void apply_cz_chain(StateVector<Scalar>& psi, int k) {
  const std::uint64_t chain = (k >= 2) ? ((std::uint64_t{1} << (k - 1)) - 1) : 0;
  for (Eigen::Index z = 0; z < psi.size(); ++z) {
    const auto u = static_cast<std::uint64_t>(z);
    if (std::popcount(u & (u >> 1) & chain) & 1) psi[z] = -psi[z];
  }
}

}  // namespace detail

/// Hardware-efficient ansatz on |0...0>: each layer applies an Ry block,
/// a CZ chain on (0,1), (1,2), ..., (k-2,k-1), then a second Ry block.
/// Ry(theta) = [[cos theta/2, -sin theta/2], [sin theta/2, cos theta/2]].
template <typename Scalar>
StateVector<Scalar> apply_ansatz(const AnsatzParams<Scalar>& params, int k,
                                 int layers = 1) {
  if (k < 1 || k > 30) throw DimensionError("qubit count must be in [1, 30]");
  if (layers < 1) throw DimensionError("at least one layer required");
  if (params.size() != Eigen::Index{2} * k * layers)
    throw DimensionError("ansatz expects " + std::to_string(2 * k * layers) +
                         " parameters, got " + std::to_string(params.size()));
  // The first Ry block on |0...0> is a product state; build it directly.
  StateVector<Scalar> psi(Eigen::Index{1} << k);
  psi[0] = 1;
  for (int i = 0; i < k; ++i) {
    const Eigen::Index half = Eigen::Index{1} << i;
    const Scalar c = std::cos(params[i] / 2), s = std::sin(params[i] / 2);
    for (Eigen::Index z = 0; z < half; ++z) {
      psi[z + half] = s * psi[z];
      psi[z] *= c;
    }
  }
  for (int layer = 0; layer < layers; ++layer) {
    const Eigen::Index base = Eigen::Index{2} * k * layer;
    if (layer > 0)
      for (int i = 0; i < k; ++i) detail::apply_ry(psi, i, params[base + i]);
    detail::apply_cz_chain(psi, k);
    for (int i = 0; i < k; ++i) detail::apply_ry(psi, i, params[base + k + i]);
  }
  return psi;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> probabilities(const StateVector<Scalar>& psi) {
  return psi.cwiseAbs2();
}

/// <psi|H|psi> for diagonal H; exact, no sampling.
template <typename Scalar>
Scalar expectation(const StateVector<Scalar>& psi, const EnergyTable<Scalar>& table) {
  if (psi.size() != table.size())
    throw DimensionError("state and energy table dimensions differ");
  return psi.cwiseAbs2().dot(table.energies());
}

/// Energies of all 2^k bit patterns. Each entry extends a smaller pattern by
/// its highest set bit, so every value is at most k partial sums away from
/// the offset.
template <typename Scalar>
EnergyTable<Scalar> precompute_energy_table(const QuboModel<Scalar>& model,
                                            int max_qubits = 20) {
  const auto k = static_cast<int>(model.num_vars());
  if (k > max_qubits)
    throw CapacityError("energy table for " + std::to_string(k) +
                        " variables exceeds the " + std::to_string(max_qubits) +
                        "-qubit cap");

  // Partners below each variable: column lists of the upper triangle.
  std::vector<std::vector<std::pair<int, Scalar>>> lower(k);
  for (Eigen::Index row = 0; row < model.quad().outerSize(); ++row)
    for (typename QuboModel<Scalar>::Sparse::InnerIterator it(model.quad(), row); it; ++it)
      lower[it.col()].emplace_back(static_cast<int>(row), it.value());

  typename EnergyTable<Scalar>::Vector e(Eigen::Index{1} << k);
  e[0] = model.offset();
  for (std::uint64_t z = 1; z < static_cast<std::uint64_t>(e.size()); ++z) {
    const int h = std::bit_width(z) - 1;
    const std::uint64_t rest = z ^ (std::uint64_t{1} << h);
    Scalar delta = model.linear()[h];
    for (const auto& [j, a] : lower[h])
      if ((rest >> j) & 1) delta += a;
    e[z] = e[rest] + delta;
  }
  return EnergyTable<Scalar>(std::move(e));
}

/// Closed-form <H> of a QUBO Hamiltonian in the single-layer ansatz state.
///
/// Conjugating Z_a through the circuit gives cos(t1_a) Z_a - sin(t1_a) X_a
/// Z_{a-1} Z_{a+1} acting on the product state of the first Ry block, where
/// <Z> = cos t0 and <X> = sin t0. Every one- and two-point correlator is then
/// a product of single-site factors; any site that picks up a Y contributes
/// zero. Cost is O(k + terms) per call instead of O(k 2^k).
template <typename Scalar>
class AnsatzQuboExpectation {
 public:
  explicit AnsatzQuboExpectation(const QuboModel<Scalar>& model)
      : k_(static_cast<int>(model.num_vars())),
        offset_(model.offset()),
        linear_(model.linear()) {
    if (k_ < 1 || k_ > 63) throw DimensionError("qubit count must be in [1, 63]");
    for (Eigen::Index row = 0; row < model.quad().outerSize(); ++row)
      for (typename QuboModel<Scalar>::Sparse::InnerIterator it(model.quad(), row); it; ++it)
        pairs_.push_back({static_cast<int>(row), static_cast<int>(it.col()), it.value(),
                          std::abs(static_cast<int>(it.col()) - static_cast<int>(row)) <= 2});
    const std::uint64_t all = (std::uint64_t{1} << k_) - 1;
    for (int a = 0; a < k_; ++a) {
      const std::uint64_t site = std::uint64_t{1} << a;
      z_string_.push_back({0, site});
      x_string_.push_back({site, ((site << 1) | (site >> 1)) & all});
    }
  }

  int num_qubits() const { return k_; }

  Scalar operator()(const AnsatzParams<Scalar>& theta) const {
    if (theta.size() != 2 * k_)
      throw DimensionError("expected " + std::to_string(2 * k_) + " parameters");
    for (int i = 0; i < k_; ++i) {
      z_value_[i] = std::cos(theta[i]);
      x_value_[i] = std::sin(theta[i]);
      cos1_[i] = std::cos(theta[k_ + i]);
      sin1_[i] = std::sin(theta[k_ + i]);
    }
    for (int a = 0; a < k_; ++a)
      mean_z_[a] = cos1_[a] * eval(z_string_[a]) - sin1_[a] * eval(x_string_[a]);

    // x = (1 - Z) / 2
    Scalar e = offset_;
    for (int a = 0; a < k_; ++a) e += linear_[a] * (1 - mean_z_[a]) / 2;
    for (const auto& t : pairs_) {
      const int a = t.a, b = t.b;
      // Disjoint supports factorize in the product state.
      const Scalar zz = !t.near ? mean_z_[a] * mean_z_[b]
                                : cos1_[a] * cos1_[b] * eval(z_string_[a] * z_string_[b]) -
                                      cos1_[a] * sin1_[b] * eval(z_string_[a] * x_string_[b]) -
                                      sin1_[a] * cos1_[b] * eval(x_string_[a] * z_string_[b]) +
                                      sin1_[a] * sin1_[b] * eval(x_string_[a] * x_string_[b]);
      e += t.value * (1 - mean_z_[a] - mean_z_[b] + zz) / 4;
    }
    return e;
  }

 private:
  // Pauli string up to phase: X on x bits, Z on z bits, Y on both.
  struct Pauli {
    std::uint64_t x, z;
    Pauli operator*(const Pauli& o) const { return {x ^ o.x, z ^ o.z}; }
  };
  struct Term {
    int a, b;
    Scalar value;
    bool near;  // |a - b| <= 2: conjugated strings overlap
  };

  Scalar eval(const Pauli& p) const {
    if (p.x & p.z) return 0;
    Scalar v = 1;
    for (std::uint64_t m = p.x; m; m &= m - 1) v *= x_value_[std::countr_zero(m)];
    for (std::uint64_t m = p.z; m; m &= m - 1) v *= z_value_[std::countr_zero(m)];
    return v;
  }

  int k_;
  Scalar offset_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> linear_;
  std::vector<Term> pairs_;
  std::vector<Pauli> z_string_, x_string_;
  mutable std::vector<Scalar> z_value_ = std::vector<Scalar>(k_),
                              x_value_ = std::vector<Scalar>(k_),
                              cos1_ = std::vector<Scalar>(k_),
                              sin1_ = std::vector<Scalar>(k_),
                              mean_z_ = std::vector<Scalar>(k_);
};

struct VqeConfig {
  int layers = 1;
  int max_evaluations = 0;  // per restart; 0 means 200 * qubits
  int restarts = 4;
  int top_k = 16;
  double value_tolerance = 1e-6;  // relative to max - min of the table
  double param_tolerance = 1e-4;  // radians
  double initial_step = 0.5;      // radians
};

template <typename Scalar>
struct VqeResult {
  std::uint64_t best_bits = 0;  // basis index, bit i = variable i
  Scalar best_energy = 0;
  Scalar best_expectation = 0;  // <H> at final_params
  AnsatzParams<Scalar> final_params;
  int eval_count = 0;
};

/// Up to `count` basis states by descending probability, lowest index first
/// on ties.
template <typename Scalar>
std::vector<std::uint64_t> most_probable_states(const StateVector<Scalar>& psi,
                                                int count) {
  const auto dim = static_cast<std::uint64_t>(psi.size());
  const auto keep = static_cast<std::size_t>(
      std::min<std::uint64_t>(dim, static_cast<std::uint64_t>(std::max(count, 1))));
  using Entry = std::pair<Scalar, std::uint64_t>;
  auto better = [](const Entry& a, const Entry& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  };
  std::vector<Entry> top;
  top.reserve(keep + 1);
  for (std::uint64_t z = 0; z < dim; ++z) {
    const Entry e{std::norm(psi[static_cast<Eigen::Index>(z)]), z};
    if (top.size() == keep && !better(e, top.back())) continue;
    top.insert(std::upper_bound(top.begin(), top.end(), e, better), e);
    if (top.size() > keep) top.pop_back();
  }
  std::vector<std::uint64_t> out;
  for (const auto& e : top) out.push_back(e.second);
  return out;
}

namespace detail {

template <typename Scalar, typename Objective>
VqeResult<Scalar> run_vqe(const EnergyTable<Scalar>& table, const VqeConfig& cfg,
                          std::mt19937_64& rng, Objective&& objective) {
  const int k = table.num_qubits();
  const Eigen::Index dim = Eigen::Index{2} * k * cfg.layers;
  const Scalar lo = table.energies().minCoeff(), hi = table.energies().maxCoeff();

  NelderMeadOptions opt;
  opt.max_evaluations = cfg.max_evaluations > 0 ? cfg.max_evaluations : 200 * std::max(k, 1);
  opt.value_tolerance = cfg.value_tolerance * static_cast<double>(hi - lo);
  opt.param_tolerance = cfg.param_tolerance;
  opt.initial_step = cfg.initial_step;

  VqeResult<Scalar> result;
  result.final_params = AnsatzParams<Scalar>::Zero(dim);
  result.best_expectation = std::numeric_limits<Scalar>::infinity();
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

  if (hi > lo) {
    for (int restart = 0; restart < std::max(cfg.restarts, 1); ++restart) {
      AnsatzParams<Scalar> start(dim);
      for (Eigen::Index i = 0; i < dim; ++i) start[i] = static_cast<Scalar>(angle(rng));
      auto nm = nelder_mead<Scalar>(objective, start, opt);
      result.eval_count += nm.evaluations;
      if (nm.value < result.best_expectation) {
        result.best_expectation = nm.value;
        result.final_params = std::move(nm.x);
      }
    }
  } else {
    result.best_expectation = lo;  // flat landscape
  }

  const auto psi = apply_ansatz<Scalar>(result.final_params, k, cfg.layers);
  auto candidates = most_probable_states(psi, cfg.top_k);  // [0] is the argmax
  result.best_bits = candidates.front();
  result.best_energy = table[static_cast<Eigen::Index>(candidates.front())];
  for (auto z : candidates) {
    const Scalar e = table[static_cast<Eigen::Index>(z)];
    if (e < result.best_energy || (e == result.best_energy && z < result.best_bits)) {
      result.best_energy = e;
      result.best_bits = z;
    }
  }
  return result;
}

}  // namespace detail

/// Variational minimization of a diagonal Hamiltonian with the
/// hardware-efficient ansatz. Each restart draws theta uniformly from
/// [-pi, pi] and runs Nelder-Mead on the exact statevector expectation; the
/// lowest final state is decoded by checking its top_k most probable basis
/// states against the table.
template <typename Scalar>
VqeResult<Scalar> vqe_minimize(const EnergyTable<Scalar>& table, const VqeConfig& cfg,
                               std::mt19937_64& rng) {
  const int k = table.num_qubits();
  if (k < 1) {
    VqeResult<Scalar> r;
    r.best_energy = r.best_expectation = table[0];
    return r;
  }
  auto objective = [&](const AnsatzParams<Scalar>& theta) {
    return expectation(apply_ansatz<Scalar>(theta, k, cfg.layers), table);
  };
  return detail::run_vqe(table, cfg, rng, objective);
}

/// Same search, but single-layer expectations come from the closed form over
/// the QUBO terms. `table` must be precompute_energy_table(model).
template <typename Scalar>
VqeResult<Scalar> vqe_minimize(const QuboModel<Scalar>& model,
                               const EnergyTable<Scalar>& table, const VqeConfig& cfg,
                               std::mt19937_64& rng) {
  if (table.size() != (Eigen::Index{1} << model.num_vars()))
    throw DimensionError("energy table does not match model");
  if (cfg.layers != 1 || model.num_vars() < 1) return vqe_minimize(table, cfg, rng);
  const AnsatzQuboExpectation<Scalar> closed_form(model);
  return detail::run_vqe(table, cfg, rng, closed_form);
}

}  // namespace dronecd
