#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace dronecd {

struct NelderMeadOptions {
  int max_evaluations = 1000;
  double value_tolerance = 1e-8;  // spread of simplex values
  double param_tolerance = 1e-6;  // max-norm distance of vertices to the best
  double initial_step = 0.5;
};

template <typename Scalar>
struct NelderMeadResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar value;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimizer using the dimension-adaptive
/// coefficients of Gao and Han (2012).
///
/// Stops when both tolerances hold or the evaluation budget is spent; the
/// objective is never called more than max_evaluations times.
template <typename Scalar, typename Objective>
NelderMeadResult<Scalar> nelder_mead(Objective&& objective,
                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& start,
                                     const NelderMeadOptions& opt) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index dim = start.size();
  const Scalar d = static_cast<Scalar>(std::max<Eigen::Index>(dim, 1));
  const Scalar reflect = 1;
  const Scalar expand = 1 + 2 / d;
  const Scalar contract = Scalar(0.75) - 1 / (2 * d);
  const Scalar shrink = 1 - 1 / d;

  int evals = 0;
  bool exhausted = false;
  auto eval = [&](const Vector& x) -> Scalar {
    if (evals >= opt.max_evaluations) {
      exhausted = true;
      return std::numeric_limits<Scalar>::infinity();
    }
    ++evals;
    return static_cast<Scalar>(objective(x));
  };

  std::vector<Vector> pts(dim + 1, start);
  std::vector<Scalar> vals(dim + 1);
  vals[0] = eval(start);
  for (Eigen::Index i = 0; i < dim; ++i) {
    pts[i + 1][i] += static_cast<Scalar>(opt.initial_step);
    vals[i + 1] = eval(pts[i + 1]);
  }

  std::vector<Eigen::Index> order(dim + 1);
  bool converged = false;
  Vector centroid(dim), xr(dim), xe(dim), xc(dim);
  Vector sum = Vector::Zero(dim);  // running sum of all vertices
  for (const auto& p : pts) sum += p;
  while (!exhausted) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return vals[a] < vals[b]; });
    const Eigen::Index best = order.front(), worst = order.back();
    const Eigen::Index second_worst = order[dim > 0 ? dim - 1 : 0];

    if (dim == 0 || vals[worst] - vals[best] <= opt.value_tolerance) {
      Scalar xspread = 0;
      for (Eigen::Index i = 0; i <= dim; ++i)
        if (i != best)
          xspread = std::max(xspread, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
      if (xspread <= opt.param_tolerance) {
        converged = true;
        break;
      }
    }

    centroid = (sum - pts[worst]) / d;
    auto replace_worst = [&](const Vector& x, Scalar v) {
      sum += x - pts[worst];
      pts[worst] = x;
      vals[worst] = v;
    };

    xr = centroid + reflect * (centroid - pts[worst]);
    const Scalar fr = eval(xr);
    if (fr < vals[best]) {
      xe = centroid + expand * (xr - centroid);
      const Scalar fe = eval(xe);
      replace_worst(fe < fr ? xe : xr, std::min(fe, fr));
      continue;
    }
    if (fr < vals[second_worst]) {
      replace_worst(xr, fr);
      continue;
    }

    bool accepted = false;
    if (fr < vals[worst]) {
      xc = centroid + contract * (xr - centroid);
      const Scalar fc = eval(xc);
      if (fc <= fr) {
        replace_worst(xc, fc);
        accepted = true;
      }
    } else {
      xc = centroid + contract * (pts[worst] - centroid);
      const Scalar fc = eval(xc);
      if (fc < vals[worst]) {
        replace_worst(xc, fc);
        accepted = true;
      }
    }
    if (accepted) continue;

    for (Eigen::Index i = 0; i <= dim && !exhausted; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + shrink * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
    sum.setZero();
    for (const auto& p : pts) sum += p;
  }

  const auto best =
      std::min_element(vals.begin(), vals.end()) - vals.begin();
  return {pts[best], vals[best], evals, converged};
}

}  // namespace dronecd
