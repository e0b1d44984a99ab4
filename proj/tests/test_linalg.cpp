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

#include <gtest/gtest.h>

#include "csdpp/errors.hpp"
#include "csdpp/linalg.hpp"
#include "csdpp/rng.hpp"
#include "csdpp/verify.hpp"

namespace csdpp {
namespace {

TEST(SymmetricEigen, IdentityHasUnitEigenvaluesAndOrthonormalBasis) {
  const auto r = symmetric_eigen(Matrix::Identity(2, 2));
  EXPECT_NEAR(r.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(r.eigenvalues(1), 1.0, 1e-14);
  EXPECT_LT((r.eigenvectors.transpose() * r.eigenvectors - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(SymmetricEigen, DiagonalInputKeepsAxes) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 3.0;
  const auto r = symmetric_eigen(m);
  EXPECT_DOUBLE_EQ(r.eigenvalues(0), 3.0);
  EXPECT_DOUBLE_EQ(r.eigenvalues(1), 1.0);
  EXPECT_NEAR(std::abs(r.eigenvectors(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(r.eigenvectors(0, 1)), 1.0, 1e-14);
}

TEST(SymmetricEigen, TwoByTwoMatchesCharacteristicPolynomial) {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const auto r = symmetric_eigen(m);
  EXPECT_NEAR(r.eigenvalues(0), 3.0, 1e-13);
  EXPECT_NEAR(r.eigenvalues(1), 1.0, 1e-13);
}

TEST(SymmetricEigen, RejectsNonSymmetricInput) {
  Matrix m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_THROW(symmetric_eigen(m), ContractViolation);
}

TEST(SymmetricEigen, ReconstructsRandomMatricesAndAgreesWithEigen) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(10));
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    const Matrix s = a + a.transpose();
    const auto r = symmetric_eigen(s);
    const Matrix rebuilt = r.eigenvectors * r.eigenvalues.asDiagonal() * r.eigenvectors.transpose();
    EXPECT_LT((rebuilt - s).cwiseAbs().maxCoeff(), 1e-11);
    for (int i = 1; i < n; ++i) EXPECT_GE(r.eigenvalues(i - 1), r.eigenvalues(i));
    Eigen::SelfAdjointEigenSolver<Matrix> reference(s);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(r.eigenvalues(i), reference.eigenvalues()(n - 1 - i), 1e-11);
  }
}

TEST(SymmetricEigen, WorksInSinglePrecision) {
  Eigen::MatrixXf m(2, 2);
  m << 2, 1, 1, 2;
  const auto r = symmetric_eigen(m);
  EXPECT_NEAR(r.eigenvalues(0), 3.0f, 1e-5f);
}

TEST(CappedSimplex, FeasibleInputIsUnchanged) {
  Vector v(3);
  v << 1.0, 0.5, 0.5;
  EXPECT_LT((project_capped_simplex(v, 2.0) - v).norm(), 1e-14);
}

TEST(CappedSimplex, SingleCoordinateClipsToCap) {
  Vector v(1);
  v << 2.5;
  EXPECT_DOUBLE_EQ(project_capped_simplex(v, 1.0)(0), 1.0);
}

TEST(CappedSimplex, ShiftsAndClips) {
  Vector v(3), expected(3);
  v << 1.2, 0.9, 0.5;
  expected << 1.0, 0.7, 0.3;
  EXPECT_LT((project_capped_simplex(v, 2.0) - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((oracle::projection_by_tau_grid(v, 2.0) - expected).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(CappedSimplex, RejectsInvalidBudgets) {
  Vector v = Vector::Ones(3);
  EXPECT_THROW(project_capped_simplex(v, 4.0), InvalidBudget);
  EXPECT_THROW(project_capped_simplex(v, 0.0), InvalidBudget);
}

TEST(CappedSimplex, ResultIsFeasibleAndNoFartherThanGridOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(8));
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = 4.0 * rng.uniform() - 2.0;
    const double budget = 1.0 + static_cast<double>(rng.index(static_cast<std::uint64_t>(n)));
    const Vector w = project_capped_simplex(v, budget);
    EXPECT_NEAR(w.sum(), budget, 1e-10);
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_LE(w.maxCoeff(), 1.0);
    if (n <= 4) {
      // The grid solution is only feasible up to the grid step, so compare
      // the points rather than their distances to v.
      const Vector ref = oracle::projection_by_tau_grid(v, budget, 1e-5);
      EXPECT_LE((w - ref).lpNorm<Eigen::Infinity>(), 2e-5);
    }
  }
}

TEST(SpectralNorm, ZeroOnEqualInputsAndPositiveOtherwise) {
  Matrix a = Matrix::Identity(3, 3);
  EXPECT_EQ(symmetric_spectral_norm(Matrix(a - a)), 0.0);
  Matrix b = a;
  b(0, 0) = -2.0;
  EXPECT_NEAR(symmetric_spectral_norm(Matrix(a - b)), 3.0, 1e-14);
}

TEST(SignOf, ZeroMapsToPlusOne) {
  Vector v(3);
  v << 0.0, -1e-300, 2.0;
  const Vector s = sign_of(v);
  EXPECT_EQ(s(0), 1.0);
  EXPECT_EQ(s(1), -1.0);
  EXPECT_EQ(s(2), 1.0);
}

TEST(RowOrthonormality, IdentityRowsAreExact) {
  EXPECT_EQ(row_orthonormality_error(Matrix::Identity(3, 5)), 0.0);
}

}  // namespace
}  // namespace csdpp
