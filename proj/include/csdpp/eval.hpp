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

#include <string>
#include <utility>
#include <vector>

#include "csdpp/learners.hpp"
#include "csdpp/linalg.hpp"
#include "csdpp/online_pca.hpp"
#include "csdpp/stream.hpp"

namespace csdpp {

/// Per-iteration costs and their running average (1/t) sum_{i<=t} c_i.
struct CostTrace {
  std::vector<double> costs;
  std::vector<double> running_average;

  void track(double cost);
  double final_average() const { return running_average.empty() ? 0.0 : running_average.back(); }

 private:
  double sum_ = 0.0;
};

/// Offline PLST solution on the whole stream, with labels scaled by 1/sqrt(K)
/// like the learners: P* = top-M eigenvectors of sum y y^T, H* the
/// least-squares map x -> y, and W# = H* P*^T.
struct OfflineReference {
  ProjectionMatrix<double> p_star;
  Matrix h_star;
  Matrix w_sharp;
};

OfflineReference offline_plst(const std::vector<Instance>& stream, int code_dim);

/// Expected regret of a PBC learner against an offline reference.
struct RegretReport {
  double cumulative = 0.0;            // R, summed term by term over Gamma_t
  std::vector<double> average;        // R_t / t
  std::vector<double> delta;          // Delta_t = ||U_t - P*^T P*||_2
  double msg_part = 0.0;              // R_MSG
  double ridge_part = 0.0;            // R_ridge
  double epsilon_hat = 0.0;           // max_t ||H_t^T x_t - y_t||^2
  double max_feature_norm = 0.0;
  double max_label_norm = 0.0;

  double delta_sum() const;
  /// ||x|| <= 1 and ||y|| <= 1 for every step (the residual bound holds
  /// by construction of epsilon_hat).
  bool assumptions_hold() const;
};

/// Needs one snapshot per stream element (the pre-update state of each
/// prediction); throws ContractViolation if any are missing.
RegretReport expected_regret(const std::vector<RegretSnapshot>& log, const std::vector<Instance>& stream,
                             const OfflineReference& reference);

/// (1 + eps) sum Delta_t + (M / 2) ||H*||_F^2 + 2 eps M d log(1 + T / d).
double theorem2_bound(const RegretReport& report, double epsilon_hat, const Matrix& h_star, int code_dim,
                      int feature_dim, std::size_t horizon);

struct MeanStdErr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Mean and standard error (sample standard deviation / sqrt(n)).
MeanStdErr summarize(const std::vector<double>& values);

using HeaderFields = std::vector<std::pair<std::string, std::string>>;

/// "# key: value" comment block followed by `t,avg_cost` rows.
std::string cost_trace_csv(const CostTrace& trace, const HeaderFields& header);

/// "# key: value" comment block followed by `t,delta,avg_regret` rows,
/// every `stride`-th step plus the last one.
std::string regret_csv(const RegretReport& report, const HeaderFields& header, std::size_t stride = 1);

/// Fixed-format double rendering shared by every emitted file.
std::string format_real(double v);

}  // namespace csdpp
