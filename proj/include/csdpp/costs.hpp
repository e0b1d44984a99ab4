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

#include "csdpp/linalg.hpp"
#include "csdpp/rng.hpp"

namespace csdpp {

/// Example-based cost c(y, y_hat) on {-1,+1}^K vectors. Implementations must
/// satisfy c(y, y) = 0 and c <= 1.
struct CostFunction {
  std::string name;
  std::function<double(const Vector& truth, const Vector& predicted)> evaluate;

  double operator()(const Vector& truth, const Vector& predicted) const { return evaluate(truth, predicted); }
};

double cost_hamming(const Vector& truth, const Vector& predicted);
/// Normalized rank loss; equal binary predictions count 1/2.
double cost_rank(const Vector& truth, const Vector& predicted);
double cost_f1(const Vector& truth, const Vector& predicted);
double cost_accuracy(const Vector& truth, const Vector& predicted);

/// Built-in costs by name: hamming | rank | f1 | accuracy.
std::optional<CostFunction> find_cost(const std::string& name);
CostFunction cost_by_name(const std::string& name);  // throws ConfigError
std::vector<std::string> builtin_cost_names();

/// A permutation of label indices; position in the vector is the order in
/// which labels are "corrected" when building the weights.
struct LabelOrder {
  std::vector<int> order;

  static LabelOrder identity(int label_dim);
  static LabelOrder random(int label_dim, std::uint64_t seed);
  bool valid(int label_dim) const;
};

/// Per-label weights delta^(k) and their square roots (the diagonal of C).
struct WeightDiagonal {
  Vector deltas;
  Vector sqrt_deltas;
};

/// delta^(k) = |c(y, y_pred^(k)) - c(y, y_real^(k))| where both pseudo
/// predictions copy y on labels ordered before k, copy y_hat after k, and
/// differ only at k (correct for "real", flipped for "pred").
WeightDiagonal label_weights(const CostFunction& cost, const Vector& truth, const Vector& predicted,
                             const LabelOrder& order);

/// C = diag(sqrt(delta)), returned as its diagonal.
Vector weight_matrix(const WeightDiagonal& w);

/// sum_k delta^(k) [y[k] != y_hat[k]].
double weighted_hamming(const WeightDiagonal& w, const Vector& truth, const Vector& predicted);

struct ConditionViolation {
  Vector truth;
  Vector predicted;
  LabelOrder order;
  int position = 0;
  double gap = 0.0;  // c(y, pred) - c(y, real), negative on violation
};

struct ConditionReport {
  std::string cost;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::vector<ConditionViolation> witnesses;  // first few only

  bool passed() const { return violations == 0; }
};

/// Samples (y, y_hat, order, k) and checks c(y, y_pred^(k)) >= c(y, y_real^(k)).
/// Label vectors have dimension 1..max_label_dim.
ConditionReport check_condition(const CostFunction& cost, std::size_t trials, int max_label_dim, Rng& rng,
                                std::size_t max_witnesses = 5);

}  // namespace csdpp
