#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dronecd/errors.hpp"
#include "dronecd/model.hpp"
#include "dronecd/selection.hpp"

namespace dronecd {

/// offset + sum_i b_i x_i + sum_{i<j} a_ij x_i x_j over binary x.
///
/// The quadratic part is a sparse, strictly upper-triangular matrix. The
/// offset is carried explicitly so that clamped sub-models report energies
/// on the same scale as the model they came from.
template <typename Scalar>
class QuboModel {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

  QuboModel() : QuboModel(0) {}
  explicit QuboModel(Eigen::Index num_vars)
      : offset_(0), linear_(Vector::Zero(num_vars)), quad_(num_vars, num_vars) {}

  QuboModel(Scalar offset, Vector linear, Sparse quad)
      : offset_(offset), linear_(std::move(linear)), quad_(std::move(quad)) {
    if (quad_.rows() != linear_.size() || quad_.cols() != linear_.size())
      throw DimensionError("quadratic block does not match variable count");
    quad_.makeCompressed();
    if (!std::isfinite(static_cast<double>(offset_)) || !linear_.allFinite())
      throw std::invalid_argument("non-finite QUBO coefficient");
    for (Eigen::Index row = 0; row < quad_.outerSize(); ++row)
      for (typename Sparse::InnerIterator it(quad_, row); it; ++it) {
        if (it.col() <= it.row())
          throw std::invalid_argument("quadratic term not strictly upper-triangular");
        if (!std::isfinite(static_cast<double>(it.value())))
          throw std::invalid_argument("non-finite QUBO coefficient");
      }
  }

  Eigen::Index num_vars() const { return linear_.size(); }
  Scalar offset() const { return offset_; }
  const Vector& linear() const { return linear_; }
  const Sparse& quad() const { return quad_; }

  /// Linear plus quadratic term count (explicit nonzeros).
  Eigen::Index num_terms() const {
    return (linear_.array() != Scalar(0)).count() + quad_.nonZeros();
  }

  Scalar max_abs_coefficient() const {
    Scalar m = std::abs(offset_);
    if (linear_.size() > 0) m = std::max(m, linear_.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < quad_.nonZeros(); ++k)
      m = std::max(m, std::abs(quad_.valuePtr()[k]));
    return m;
  }

 private:
  Scalar offset_;
  Vector linear_;
  Sparse quad_;
};

/// Accumulates terms in any order; repeated (i, j) entries are summed and
/// (j, i) is folded onto (i, j).
template <typename Scalar>
class QuboBuilder {
 public:
  explicit QuboBuilder(Eigen::Index num_vars)
      : num_vars_(num_vars), linear_(QuboModel<Scalar>::Vector::Zero(num_vars)) {}

  void add_offset(Scalar v) { offset_ += v; }
  void add_linear(Eigen::Index i, Scalar v) { linear_[i] += v; }
  void add_quadratic(Eigen::Index i, Eigen::Index j, Scalar v) {
    if (i == j) {
      linear_[i] += v;  // x^2 == x
      return;
    }
    if (i > j) std::swap(i, j);
    triplets_.emplace_back(i, j, v);
  }

  QuboModel<Scalar> build() const {
    typename QuboModel<Scalar>::Sparse quad(num_vars_, num_vars_);
    quad.setFromTriplets(triplets_.begin(), triplets_.end());
    return QuboModel<Scalar>(offset_, linear_, std::move(quad));
  }

 private:
  Eigen::Index num_vars_;
  Scalar offset_ = 0;
  typename QuboModel<Scalar>::Vector linear_;
  std::vector<Eigen::Triplet<Scalar>> triplets_;
};

template <typename Scalar>
Scalar qubo_energy(const QuboModel<Scalar>& model,
                   std::span<const std::uint8_t> bits) {
  if (static_cast<Eigen::Index>(bits.size()) != model.num_vars())
    throw DimensionError("bit vector has " + std::to_string(bits.size()) +
                         " entries, model has " +
                         std::to_string(model.num_vars()) + " variables");
  Scalar e = model.offset();
  const auto& quad = model.quad();
  for (Eigen::Index i = 0; i < model.num_vars(); ++i) {
    if (!bits[i]) continue;
    e += model.linear()[i];
    for (typename QuboModel<Scalar>::Sparse::InnerIterator it(quad, i); it; ++it)
      if (bits[it.col()]) e += it.value();
  }
  return e;
}

template <typename Scalar>
struct ClampResult {
  QuboModel<Scalar> model;
  /// free_to_original[k] is the original index of reduced variable k.
  std::vector<Eigen::Index> free_to_original;
};

/// Substitutes the fixed bits and returns the model over the remaining
/// variables, in ascending original order.
template <typename Scalar>
ClampResult<Scalar> clamp(const QuboModel<Scalar>& model,
                          const std::map<Eigen::Index, std::uint8_t>& fixed) {
  const Eigen::Index n = model.num_vars();
  constexpr Eigen::Index kFree = -1;
  std::vector<Eigen::Index> new_index(n, kFree);
  std::vector<std::int8_t> value(n, -1);
  for (const auto& [var, bit] : fixed) {
    if (var < 0 || var >= n)
      throw DimensionError("fixed variable " + std::to_string(var) + " out of range");
    value[var] = bit ? 1 : 0;
  }
  std::vector<Eigen::Index> free_to_original;
  for (Eigen::Index i = 0; i < n; ++i)
    if (value[i] < 0) {
      new_index[i] = static_cast<Eigen::Index>(free_to_original.size());
      free_to_original.push_back(i);
    }

  QuboBuilder<Scalar> b(static_cast<Eigen::Index>(free_to_original.size()));
  b.add_offset(model.offset());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (value[i] < 0)
      b.add_linear(new_index[i], model.linear()[i]);
    else if (value[i] == 1)
      b.add_offset(model.linear()[i]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (typename QuboModel<Scalar>::Sparse::InnerIterator it(model.quad(), i); it; ++it) {
      const Eigen::Index j = it.col();
      const bool free_i = value[i] < 0, free_j = value[j] < 0;
      if (free_i && free_j)
        b.add_quadratic(new_index[i], new_index[j], it.value());
      else if (free_i && value[j] == 1)
        b.add_linear(new_index[i], it.value());
      else if (free_j && value[i] == 1)
        b.add_linear(new_index[j], it.value());
      else if (value[i] == 1 && value[j] == 1)
        b.add_offset(it.value());
    }
  }
  return {b.build(), std::move(free_to_original)};
}

/// Dense upper-triangular view: diagonal holds b, strict upper holds a_ij.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense_coefficients(
    const QuboModel<Scalar>& model) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m = model.quad().toDense();
  m.diagonal() = model.linear();
  return m;
}

/// Offset, linear and quadratic coefficients agree within
/// rel_tol * (largest absolute coefficient of either model).
template <typename Scalar>
bool coefficients_match(const QuboModel<Scalar>& a, const QuboModel<Scalar>& b,
                        Scalar rel_tol = Scalar(1e-9)) {
  if (a.num_vars() != b.num_vars()) return false;
  const Scalar tol =
      rel_tol * std::max({a.max_abs_coefficient(), b.max_abs_coefficient(), Scalar(1)});
  if (std::abs(a.offset() - b.offset()) > tol) return false;
  if (a.num_vars() == 0) return true;
  return (dense_coefficients(a) - dense_coefficients(b)).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// The scheduling objective
//
//   f(x) = sum_j (T_j - T/q)^2 + p * sum_i (sum_j x_ij - 1)^2,
//   T_j  = sum_i r_i x_ij + c * (sum_i x_ij - 1).

/// p = sum r_i + c * n.
double default_penalty(const ScheduleInstance& inst);

struct FullQuboLimits {
  Eigen::Index max_vars = 4096;
  Eigen::Index max_terms = 20'000'000;
};

/// Expands f over all n*q variables, route-major (variable i*q + j is x_ij).
/// Term count grows as n^2 q^2; throws CapacityError past the limits.
QuboModel<double> build_full_qubo(const ScheduleInstance& inst, double penalty,
                                  const FullQuboLimits& limits = {});

struct SubproblemQubo {
  QuboModel<double> model;
  /// (route, drone) of each variable; variable a*|Q| + b pairs the a-th
  /// smallest selected route with the b-th smallest selected drone.
  std::vector<std::pair<int, int>> vars;
};

/// f restricted to the block N x Q with every other x_ij frozen at `current`,
/// built directly in O(|N|^2 |Q|^2 + n + q) without the full model.
/// Throws InvalidSelectionError for malformed or unhosted selections and
/// CapacityError when |N|*|Q| exceeds max_vars.
SubproblemQubo build_subproblem_qubo(const ScheduleInstance& inst, double penalty,
                                     const Assignment& current,
                                     const Selection& sel,
                                     Eigen::Index max_vars = 24);

}  // namespace dronecd
