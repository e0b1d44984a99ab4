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

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "csdpp/costs.hpp"
#include "csdpp/linalg.hpp"
#include "csdpp/online_pca.hpp"
#include "csdpp/regressor.hpp"

namespace csdpp {

enum class Algorithm { kDppPbc, kDppPbt, kDppNaive, kCsDppPbc, kCsDppPbt, kObr, kOrand };

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);
bool is_cost_sensitive(Algorithm a);
bool uses_label_reduction(Algorithm a);

struct LearnerConfig {
  Algorithm algorithm = Algorithm::kDppPbc;
  int code_dim = 1;  // M; ignored by o-br
  double lambda = 1.0;
  LearningRateSchedule eta;
  RegressionEngine engine = RegressionEngine::kRidge;
  SgdSchedule sgd;
  // Cost used to score predictions; cost-sensitive learners also train on it.
  std::string cost_name = "hamming";
  // User-supplied cost; takes precedence over cost_name when set.
  std::optional<CostFunction> custom_cost;
  // Empty means the dataset's native order.
  std::optional<LabelOrder> label_order;
  std::uint64_t seed = 0;
  // Lets cs-dpp run with a cost that fails the weight-decomposition check.
  bool allow_condition_violation = false;
};

struct PredictionRecord {
  std::int64_t t = 0;
  Vector y_hat;
  double incurred_cost = 0.0;
  std::chrono::nanoseconds elapsed{0};
};

/// Quantities of the last prediction, for bound audits. `target` is the
/// label vector in regression units (y / sqrt(K) or C y).
struct StepAudit {
  ProjectionMatrix<double> projection;
  Vector code;
  Vector target;
};

/// State behind the prediction at time t, before y_t is seen: U_t = Q^T
/// diag(sigma) Q and the PBC solution H_t.
struct RegretSnapshot {
  std::int64_t t = 0;
  Matrix q;
  Vector sigma;
  Matrix h;
};

/// sign(P^T code + o) with sign(0) = +1.
Vector decode(const ProjectionMatrix<double>& p, const Vector& code, const Vector& reference = Vector());

/// Online multi-label learner: predict, receive y, update.
class Learner {
 public:
  virtual ~Learner() = default;

  /// Predicts for x, then observes y and updates.
  PredictionRecord step(const Vector& x, const Vector& y);

  virtual Vector predict(const Vector& x) = 0;
  virtual void observe(const Vector& x, const Vector& y, const Vector& y_hat) = 0;

  /// Versioned JSON text of the complete learner state (including RNG).
  virtual std::string snapshot() const = 0;
  virtual void restore(const std::string& json_text) = 0;

  const LearnerConfig& config() const { return config_; }
  const CostFunction& cost() const { return cost_; }
  int feature_dim() const { return feature_dim_; }
  int label_dim() const { return label_dim_; }
  std::int64_t steps() const { return t_; }

  /// Enables StepAudit capture on every predict().
  void enable_audit(bool on) { audit_on_ = on; }
  const std::optional<StepAudit>& last_audit() const { return audit_; }

  /// Called from predict() with the pre-update state (PBC learners only).
  void set_snapshot_observer(std::function<void(const RegretSnapshot&)> f) { observer_ = std::move(f); }

 protected:
  Learner(LearnerConfig config, int feature_dim, int label_dim);

  LearnerConfig config_;
  CostFunction cost_;
  int feature_dim_;
  int label_dim_;
  std::int64_t t_ = 0;
  bool audit_on_ = false;
  std::optional<StepAudit> audit_;
  std::function<void(const RegretSnapshot&)> observer_;
};

/// Constructs the learner named by config.algorithm. Throws ConfigError for
/// invalid dimensions or a cost-sensitive cost failing the condition check.
std::unique_ptr<Learner> make_learner(const LearnerConfig& config, int feature_dim, int label_dim);

/// ceil(fraction * K), clamped to [1, K].
int code_dim_from_fraction(double fraction, int label_dim);

}  // namespace csdpp
