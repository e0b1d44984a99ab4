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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "csdpp/linalg.hpp"
#include "csdpp/regressor.hpp"

namespace csdpp {

/// Property-suite runner shared by `csdpp verify` and the acceptance tests.
/// Each property records the worst deviation it measured against its
/// threshold, plus a witness description on failure.
struct PropertyResult {
  std::string name;
  bool passed = true;
  double measured = 0.0;
  double threshold = 0.0;
  std::size_t checks = 0;
  std::string witness;
};

struct SuiteReport {
  std::string suite;
  std::vector<PropertyResult> properties;

  bool passed() const;
  nlohmann::json to_json() const;
};

std::vector<std::string> suite_names();  // lemma1 lemma3 sherman projection bounds regret

using PbcUpdateFn = std::function<void(PbcState<double>&, const Vector&, const Vector&)>;

struct VerifyOptions {
  std::uint64_t seed = 2024;
  // lemma3: restrict to one cost (empty = all built-ins) and set the number
  // of condition-check trials.
  std::string cost;
  std::size_t trials = 100000;
  // sherman: update under test (defaults to pbc_update).
  PbcUpdateFn pbc_update_override;
};

SuiteReport verify_lemma1(const VerifyOptions& options);
SuiteReport verify_lemma3(const VerifyOptions& options);
SuiteReport verify_sherman(const VerifyOptions& options);
SuiteReport verify_projection(const VerifyOptions& options);
SuiteReport verify_bounds(const VerifyOptions& options);
SuiteReport verify_regret(const VerifyOptions& options);

/// Dispatch by name; throws ConfigError for an unknown suite.
SuiteReport run_suite(const std::string& name, const VerifyOptions& options);

namespace oracle {

/// Capped-simplex projection by scanning tau on a uniform grid and keeping
/// the candidate whose mass is closest to the budget.
Vector projection_by_tau_grid(const Vector& v, double budget, double resolution = 1e-6);

/// Full K x K capped MSG step: eigendecompose U + eta y y^T, keep the top
/// M+1 eigenvalues, project them, rebuild.
Matrix dense_capped_msg_step(const Matrix& u, const Vector& y, double eta, int target_dim);

/// (lambda I + X^T X)^{-1} X^T Y over the first `count` rows.
Matrix batch_ridge(const std::vector<Vector>& xs, const std::vector<Vector>& ys, std::size_t count, double lambda);

/// Random M x K matrix with orthonormal rows.
Matrix random_left_orthogonal(int code_dim, int label_dim, std::uint64_t seed);

}  // namespace oracle

}  // namespace csdpp
