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
#include <string>

#include "csdpp/linalg.hpp"
#include "csdpp/rng.hpp"

namespace csdpp {

/// t -> eta_t. The default is the decaying rate (2 / sqrt(t)) * (M / K).
struct LearningRateSchedule {
  enum class Kind { kDecaying, kConstant };

  Kind kind = Kind::kDecaying;
  double base = 2.0;

  static LearningRateSchedule decaying(double base = 2.0) { return {Kind::kDecaying, base}; }
  static LearningRateSchedule constant(double eta) { return {Kind::kConstant, eta}; }

  double operator()(std::int64_t t, int target_dim, int label_dim) const {
    if (kind == Kind::kConstant) return base;
    return base / std::sqrt(static_cast<double>(t)) * target_dim / label_dim;
  }
};

/// Left-orthogonal M x K encoder (P P^T = I_M).
template <typename Scalar>
struct ProjectionMatrix {
  MatrixX<Scalar> rows;

  Eigen::Index code_dim() const { return rows.rows(); }
  Eigen::Index label_dim() const { return rows.cols(); }
};

/// Removal distribution over the M+1 rows of Q.
template <typename Scalar>
struct SamplerDistribution {
  VectorX<Scalar> removal_probabilities;
};

/// Capped MSG state: U = Q^T diag(sigma) Q with Q (M+1) x K row-orthonormal,
/// 0 <= sigma <= 1 and sum(sigma) = M.
template <typename Scalar>
class CappedMsg {
 public:
  CappedMsg() = default;

  /// Seeded random rotation of M+1 identity rows with a uniform spectrum.
  static CappedMsg init(int label_dim, int target_dim, std::uint64_t seed,
                        LearningRateSchedule schedule = {}) {
    if (target_dim < 1 || target_dim >= label_dim) {
      throw DimensionError("CappedMsg: need 1 <= M < K, got M=" + std::to_string(target_dim) +
                           " K=" + std::to_string(label_dim));
    }
    Rng rng = Rng::substream(seed, StreamPurpose::kInit);
    MatrixX<Scalar> g(label_dim, target_dim + 1);
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = Scalar(rng.normal());
    Eigen::HouseholderQR<MatrixX<Scalar>> qr(g);
    MatrixX<Scalar> basis = qr.householderQ() * MatrixX<Scalar>::Identity(label_dim, target_dim + 1);

    CappedMsg s;
    s.q_ = basis.transpose();
    s.sigma_ = VectorX<Scalar>::Constant(target_dim + 1, Scalar(target_dim) / Scalar(target_dim + 1));
    s.target_dim_ = target_dim;
    s.schedule_ = schedule;
    return s;
  }

  /// Builds a state from explicit factors; validates the invariants.
  static CappedMsg from_factors(MatrixX<Scalar> q, VectorX<Scalar> sigma, int target_dim,
                                std::int64_t steps = 0, LearningRateSchedule schedule = {}) {
    CappedMsg s;
    s.q_ = std::move(q);
    s.sigma_ = std::move(sigma);
    s.target_dim_ = target_dim;
    s.steps_ = steps;
    s.schedule_ = schedule;
    if (s.q_.rows() != target_dim + 1 || s.sigma_.size() != target_dim + 1)
      throw DimensionError("CappedMsg: factors must have M+1 rows");
    if (!s.feasible()) throw ContractViolation("CappedMsg: factors violate the state invariants");
    return s;
  }

  /// One projected stochastic-gradient step with the scheduled rate.
  template <typename Derived>
  void update(const Eigen::MatrixBase<Derived>& y) {
    const Scalar eta = Scalar(schedule_(steps_ + 1, target_dim_, static_cast<int>(label_dim())));
    update_with_rate(y, eta);
  }

  /// U <- P(U + eta y y^T) over {0 <= U <= I, tr U = M, rank U <= M+1}.
  template <typename Derived>
  void update_with_rate(const Eigen::MatrixBase<Derived>& y, Scalar eta) {
    const Eigen::Index k = label_dim();
    const Eigen::Index m1 = q_.rows();
    if (y.size() != k) throw DimensionError("CappedMsg::update: label length mismatch");
    const Scalar ynorm = y.norm();
    if (ynorm > Scalar(1) + Scalar(Tolerances::kUnitNorm))
      throw ContractViolation("CappedMsg::update: ||y|| = " + std::to_string(double(ynorm)) +
                              " exceeds 1");

    // Modified Gram-Schmidt split into in-span coefficients and residual.
    VectorX<Scalar> coeff = VectorX<Scalar>::Zero(m1);
    VectorX<Scalar> residual = y;
    auto sweep = [&]() {
      for (Eigen::Index i = 0; i < m1; ++i) {
        const Scalar c = q_.row(i).dot(residual);
        coeff(i) += c;
        residual.noalias() -= c * q_.row(i).transpose();
      }
    };
    sweep();
    Scalar rnorm = residual.norm();
    if (rnorm < Scalar(Tolerances::kReorthogonalize) * ynorm) {
      sweep();
      rnorm = residual.norm();
    }
    const bool extend = rnorm > Scalar(Tolerances::kInSpan) * std::max(ynorm, Scalar(1e-300)) &&
                        m1 < k;

    const Eigen::Index n = extend ? m1 + 1 : m1;
    VectorX<Scalar> b(n);
    b.head(m1) = coeff;
    if (extend) b(m1) = rnorm;

    MatrixX<Scalar> small = MatrixX<Scalar>::Zero(n, n);
    small.diagonal().head(m1) = sigma_;
    small.noalias() += eta * b * b.transpose();
    const auto eig = symmetric_eigen(small);

    // Rank cap: at most M+1 eigenvalues survive; the smallest is dropped.
    const VectorX<Scalar> kept = eig.eigenvalues.head(m1);
    sigma_ = project_capped_simplex(kept, Scalar(target_dim_));

    MatrixX<Scalar> rotation = eig.eigenvectors.leftCols(m1).transpose();  // m1 x n
    MatrixX<Scalar> next(m1, k);
    next.noalias() = rotation.leftCols(m1) * q_;
    if (extend) next.noalias() += rotation.col(m1) * (residual / rnorm).transpose();
    q_ = std::move(next);
    ++steps_;
  }

  SamplerDistribution<Scalar> sampler() const {
    return {(VectorX<Scalar>::Ones(sigma_.size()) - sigma_).cwiseMax(Scalar(0))};
  }

  /// Index of the row removed by one draw from the sampler.
  Eigen::Index sample_removed_row(Rng& rng) const {
    const VectorX<Scalar> probs = sampler().removal_probabilities;
    const Scalar total = probs.sum();
    const Scalar u = Scalar(rng.uniform()) * total;
    Scalar cumulative(0);
    Eigen::Index last_positive = probs.size() - 1;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      if (probs(i) <= Scalar(0)) continue;
      last_positive = i;
      cumulative += probs(i);
      if (u < cumulative) return i;
    }
    return last_positive;
  }

  /// Q with one row removed, drawn with probability 1 - sigma[i].
  ProjectionMatrix<Scalar> sample_projection(Rng& rng) const {
    return without_row(sample_removed_row(rng));
  }

  ProjectionMatrix<Scalar> without_row(Eigen::Index removed) const {
    const Eigen::Index m1 = q_.rows();
    ProjectionMatrix<Scalar> p;
    p.rows.resize(m1 - 1, q_.cols());
    p.rows.topRows(removed) = q_.topRows(removed);
    p.rows.bottomRows(m1 - 1 - removed) = q_.bottomRows(m1 - 1 - removed);
    return p;
  }

  /// Dense K x K U = E[P^T P].
  MatrixX<Scalar> reconstruct() const { return q_.transpose() * sigma_.asDiagonal() * q_; }

  bool feasible(double tol = Tolerances::kOrthonormality) const {
    if (!q_.allFinite() || !sigma_.allFinite()) return false;
    if ((sigma_.array() < Scalar(-tol)).any() || (sigma_.array() > Scalar(1 + tol)).any()) return false;
    if (std::abs(double(sigma_.sum()) - target_dim_) > Tolerances::kTrace) return false;
    return double(row_orthonormality_error(q_)) <= tol;
  }

  const MatrixX<Scalar>& q() const { return q_; }
  const VectorX<Scalar>& sigma() const { return sigma_; }
  int target_dim() const { return target_dim_; }
  Eigen::Index label_dim() const { return q_.cols(); }
  std::int64_t steps() const { return steps_; }
  const LearningRateSchedule& schedule() const { return schedule_; }

 private:
  MatrixX<Scalar> q_;
  VectorX<Scalar> sigma_;
  int target_dim_ = 0;
  std::int64_t steps_ = 0;
  LearningRateSchedule schedule_;
};

}  // namespace csdpp
