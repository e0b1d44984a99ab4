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

#include <cmath>
#include <cstdint>

#include "csdpp/linalg.hpp"
#include "csdpp/online_pca.hpp"

namespace csdpp {

/// How the linear regressor is updated: exact recursive ridge or plain
/// online gradient descent (for large d*K).
enum class RegressionEngine { kRidge, kSgd };

/// Step size for the gradient engine: base / sqrt(t).
struct SgdSchedule {
  double base = 1.0;
  double operator()(std::int64_t t) const { return base / std::sqrt(static_cast<double>(t)); }
};

/// A^{-1} = (lambda I + sum x x^T)^{-1}, maintained by Sherman-Morrison.
/// The Gram matrix itself is accumulated as well so the inverse can be
/// rebuilt periodically.
template <typename Scalar>
struct RidgeCommonState {
  MatrixX<Scalar> a_inv;
  MatrixX<Scalar> gram;
  Scalar lambda = Scalar(1);
  std::int64_t updates = 0;

  static RidgeCommonState make(Eigen::Index feature_dim, Scalar lambda) {
    if (!(lambda > Scalar(0))) throw ConfigError("ridge: lambda must be positive");
    RidgeCommonState s;
    s.lambda = lambda;
    s.a_inv = MatrixX<Scalar>::Identity(feature_dim, feature_dim) / lambda;
    s.gram = MatrixX<Scalar>::Identity(feature_dim, feature_dim) * lambda;
    return s;
  }

  Eigen::Index feature_dim() const { return a_inv.rows(); }

  /// Rank-one update with x. Returns A_old^{-1} x / (1 + x^T A_old^{-1} x),
  /// the gain vector every ridge variant applies to its residual.
  template <typename Derived>
  VectorX<Scalar> absorb(const Eigen::MatrixBase<Derived>& x) {
    if (x.size() != feature_dim()) throw DimensionError("ridge: feature length mismatch");
    const VectorX<Scalar> ax = a_inv * x;
    const Scalar gamma = x.dot(ax);
    VectorX<Scalar> gain = ax / (Scalar(1) + gamma);
    a_inv.noalias() -= gain * ax.transpose();
    gram.noalias() += x * x.transpose();
    ++updates;
    if (updates % Tolerances::kInverseRefreshPeriod == 0) refresh();
    return gain;
  }

  void refresh() {
    a_inv = gram.ldlt().solve(MatrixX<Scalar>::Identity(gram.rows(), gram.cols()));
    a_inv = (a_inv + a_inv.transpose()) / Scalar(2);
  }
};

/// PBC: full d x K ridge solution H; the code-space regressor for any basis
/// P is H P^T.
template <typename Scalar>
struct PbcState {
  RidgeCommonState<Scalar> common;
  MatrixX<Scalar> h;

  static PbcState make(Eigen::Index feature_dim, Eigen::Index label_dim, Scalar lambda) {
    return {RidgeCommonState<Scalar>::make(feature_dim, lambda),
            MatrixX<Scalar>::Zero(feature_dim, label_dim)};
  }
};

/// PBT: compact d x M regressor W together with the basis it refers to.
template <typename Scalar>
struct PbtState {
  RidgeCommonState<Scalar> common;
  MatrixX<Scalar> w;
  ProjectionMatrix<Scalar> basis;

  static PbtState make(Eigen::Index feature_dim, Scalar lambda, ProjectionMatrix<Scalar> basis) {
    const Eigen::Index m = basis.code_dim();
    return {RidgeCommonState<Scalar>::make(feature_dim, lambda), MatrixX<Scalar>::Zero(feature_dim, m),
            std::move(basis)};
  }
};

/// Recursive ridge toward whichever code vectors arrive; ignores basis drift.
template <typename Scalar>
struct NaiveState {
  RidgeCommonState<Scalar> common;
  MatrixX<Scalar> w;

  static NaiveState make(Eigen::Index feature_dim, Eigen::Index code_dim, Scalar lambda) {
    return {RidgeCommonState<Scalar>::make(feature_dim, lambda), MatrixX<Scalar>::Zero(feature_dim, code_dim)};
  }
};

/// P (H^T x) = (H P^T)^T x.
template <typename Scalar, typename Derived>
VectorX<Scalar> pbc_predict(const PbcState<Scalar>& state, const Eigen::MatrixBase<Derived>& x,
                            const ProjectionMatrix<Scalar>& p) {
  if (x.size() != state.h.rows() || p.label_dim() != state.h.cols())
    throw DimensionError("pbc_predict: dimension mismatch");
  return p.rows * (state.h.transpose() * x);
}

/// H <- H - A^{-1} x (H^T x - y)^T / (1 + x^T A^{-1} x).
template <typename Scalar, typename DX, typename DY>
void pbc_update(PbcState<Scalar>& state, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  if (y.size() != state.h.cols()) throw DimensionError("pbc_update: label length mismatch");
  const VectorX<Scalar> residual = state.h.transpose() * x - y;
  const VectorX<Scalar> gain = state.common.absorb(x);
  state.h.noalias() -= gain * residual.transpose();
}

/// Moves W to the new basis: W <- W P_old P_new^T.
template <typename Scalar>
void pbt_transform(PbtState<Scalar>& state, const ProjectionMatrix<Scalar>& next) {
  if (next.rows.rows() != state.basis.rows.rows() || next.rows.cols() != state.basis.rows.cols())
    throw DimensionError("pbt_transform: basis shape mismatch");
  const MatrixX<Scalar> change = state.basis.rows * next.rows.transpose();  // M x M
  state.w = state.w * change;
  state.basis = next;
}

template <typename Scalar, typename Derived>
VectorX<Scalar> pbt_predict(const PbtState<Scalar>& state, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != state.w.rows()) throw DimensionError("pbt_predict: feature length mismatch");
  return state.w.transpose() * x;
}

/// Transform to `next`, then one Sherman-Morrison step toward next * y.
template <typename Scalar, typename DX, typename DY>
void pbt_update(PbtState<Scalar>& state, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                const ProjectionMatrix<Scalar>& next) {
  pbt_transform(state, next);
  if (y.size() != next.label_dim()) throw DimensionError("pbt_update: label length mismatch");
  const VectorX<Scalar> residual = state.w.transpose() * x - next.rows * y;
  const VectorX<Scalar> gain = state.common.absorb(x);
  state.w.noalias() -= gain * residual.transpose();
}

template <typename Scalar, typename Derived>
VectorX<Scalar> naive_predict(const NaiveState<Scalar>& state, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != state.w.rows()) throw DimensionError("naive_predict: feature length mismatch");
  return state.w.transpose() * x;
}

template <typename Scalar, typename DX, typename DZ>
void naive_update(NaiveState<Scalar>& state, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DZ>& z) {
  if (z.size() != state.w.cols()) throw DimensionError("naive_update: code length mismatch");
  const VectorX<Scalar> residual = state.w.transpose() * x - z;
  const VectorX<Scalar> gain = state.common.absorb(x);
  state.w.noalias() -= gain * residual.transpose();
}

/// Gradient of 0.5 ||W^T x - target||^2 with respect to W.
template <typename Scalar, typename DX, typename DT>
MatrixX<Scalar> squared_loss_gradient(const MatrixX<Scalar>& weights, const Eigen::MatrixBase<DX>& x,
                                      const Eigen::MatrixBase<DT>& target) {
  return x * (weights.transpose() * x - target).transpose();
}

/// One gradient step on 0.5 ||W^T x - target||^2.
template <typename Scalar, typename DX, typename DT>
void sgd_update(MatrixX<Scalar>& weights, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DT>& target,
                Scalar step) {
  if (step < Scalar(0)) throw ContractViolation("sgd_update: negative step");
  if (x.size() != weights.rows() || target.size() != weights.cols())
    throw DimensionError("sgd_update: dimension mismatch");
  weights.noalias() -= step * squared_loss_gradient(weights, x, target);
}

/// Gradient engine for PBT: transform first, then step toward next * y.
template <typename Scalar, typename DX, typename DY>
void pbt_sgd_update(PbtState<Scalar>& state, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                    const ProjectionMatrix<Scalar>& next, Scalar step) {
  pbt_transform(state, next);
  const VectorX<Scalar> target = next.rows * y;
  sgd_update(state.w, x, target, step);
}

/// Recommends the gradient engine when the d x K solution gets too large.
inline RegressionEngine suggest_engine(Eigen::Index feature_dim, Eigen::Index label_dim,
                                       double threshold = Tolerances::kSgdSuggestEntries) {
  return static_cast<double>(feature_dim) * static_cast<double>(label_dim) > threshold
             ? RegressionEngine::kSgd
             : RegressionEngine::kRidge;
}

}  // namespace csdpp
