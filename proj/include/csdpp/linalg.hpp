// Copyright 2026 The csdpp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Jacobi>

#include "csdpp/errors.hpp"
#include "csdpp/tolerances.hpp"

namespace csdpp {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Eigenpairs of a small symmetric matrix. Eigenvalues are sorted
/// non-increasing; column j of `eigenvectors` belongs to eigenvalues[j].
template <typename Scalar>
struct SymmetricEigenResult {
  VectorX<Scalar> eigenvalues;
  MatrixX<Scalar> eigenvectors;
};

/// Cyclic Jacobi eigen-decomposition. Intended for the (M+2)-dimensional
/// matrices of the capped MSG update; cost is O(n^3) per sweep.
template <typename Derived>
SymmetricEigenResult<typename Derived::Scalar> symmetric_eigen(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw DimensionError("symmetric_eigen: matrix is not square");
  // Relative check; single precision gets a looser floor.
  const Scalar floor = std::max(Scalar(Tolerances::kSymmetry), Scalar(64) * Eigen::NumTraits<Scalar>::epsilon());
  if (n > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > floor * std::max(Scalar(1), m.cwiseAbs().maxCoeff())) {
    throw ContractViolation("symmetric_eigen: input is not symmetric");
  }

  MatrixX<Scalar> a = m;
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);
  const Scalar scale = std::max(Scalar(1), a.norm());
  const Scalar target = Scalar(Tolerances::kJacobiOffDiagonal) * scale;

  auto off_diagonal = [&]() {
    Scalar s(0);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = j + 1; i < n; ++i) s += a(i, j) * a(i, j);
    return std::sqrt(Scalar(2) * s);
  };

  for (int sweep = 0; sweep < Tolerances::kJacobiMaxSweeps && off_diagonal() > target; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == Scalar(0)) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(a, p, q);
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        v.applyOnTheRight(p, q, rot);
        a(p, q) = a(q, p) = Scalar(0);
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  SymmetricEigenResult<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]);
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Sum of clip(v[i] - tau, 0, 1); non-increasing and piecewise linear in tau.
template <typename Derived>
typename Derived::Scalar capped_mass(const Eigen::MatrixBase<Derived>& v,
                                     typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  return (v.array() - tau).max(Scalar(0)).min(Scalar(1)).sum();
}

/// Euclidean projection of v onto {w : 0 <= w[i] <= 1, sum w = budget}.
///
/// The minimizer has the form w = clip(v - tau, 0, 1) for the shift tau that
/// meets the budget. capped_mass is linear between the 2n breakpoints
/// {v[i], v[i] - 1}, so tau is found by bisection over the sorted breakpoints
/// followed by one linear solve.
template <typename Derived>
VectorX<typename Derived::Scalar> project_capped_simplex(const Eigen::MatrixBase<Derived>& v,
                                                         typename Derived::Scalar budget) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = v.size();
  if (!v.allFinite()) throw ContractViolation("project_capped_simplex: non-finite input");
  if (!(budget > Scalar(0)) || budget > Scalar(n)) {
    throw InvalidBudget("project_capped_simplex: budget " + std::to_string(double(budget)) +
                        " outside (0, " + std::to_string(n) + "]");
  }

  std::vector<Scalar> breaks;
  breaks.reserve(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    breaks.push_back(v(i));
    breaks.push_back(v(i) - Scalar(1));
  }
  std::sort(breaks.begin(), breaks.end());

  // mass(breaks.front()) == n >= budget, mass(breaks.back()) == 0 < budget.
  std::size_t lo = 0, hi = breaks.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (capped_mass(v, breaks[mid]) >= budget)
      lo = mid;
    else
      hi = mid;
  }
  const Scalar mass_lo = capped_mass(v, breaks[lo]);
  const Scalar mass_hi = capped_mass(v, breaks[hi]);
  Scalar tau = breaks[lo];
  if (mass_lo > mass_hi) tau += (mass_lo - budget) / (mass_lo - mass_hi) * (breaks[hi] - breaks[lo]);

  return (v.array() - tau).max(Scalar(0)).min(Scalar(1)).matrix();
}

/// Largest deviation of R R^T from the identity.
template <typename Derived>
typename Derived::Scalar row_orthonormality_error(const Eigen::MatrixBase<Derived>& r) {
  using Scalar = typename Derived::Scalar;
  if (r.rows() == 0) return Scalar(0);
  return (r * r.transpose() - MatrixX<Scalar>::Identity(r.rows(), r.rows())).cwiseAbs().maxCoeff();
}

/// Spectral norm of a symmetric matrix (largest-magnitude eigenvalue).
template <typename Derived>
typename Derived::Scalar symmetric_spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0) return Scalar(0);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Componentwise sign with sign(0) = +1.
template <typename Derived>
VectorX<typename Derived::Scalar> sign_of(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  return v.unaryExpr([](Scalar s) { return s >= Scalar(0) ? Scalar(1) : Scalar(-1); });
}

}  // namespace csdpp
