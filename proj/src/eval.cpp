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

#include "csdpp/eval.hpp"

#include <cmath>
#include <cstdio>

#include "csdpp/errors.hpp"
#include "csdpp/tolerances.hpp"

namespace csdpp {

void CostTrace::track(double cost) {
  if (!(cost >= 0.0 && cost <= 1.0)) throw ContractViolation("CostTrace: cost outside [0, 1]");
  costs.push_back(cost);
  sum_ += cost;
  running_average.push_back(sum_ / static_cast<double>(costs.size()));
}

OfflineReference offline_plst(const std::vector<Instance>& stream, int code_dim) {
  if (stream.empty()) throw ContractViolation("offline_plst: empty stream");
  const Eigen::Index d = stream.front().features.size();
  const Eigen::Index k = stream.front().labels.size();
  if (code_dim < 1 || code_dim > k) throw DimensionError("offline_plst: need 1 <= M <= K");
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));

  Matrix label_scatter = Matrix::Zero(k, k);
  Matrix gram = Matrix::Identity(d, d) * Tolerances::kOfflineRidge;
  Matrix cross = Matrix::Zero(d, k);
  for (const Instance& inst : stream) {
    const Vector y = inst.labels * scale;
    label_scatter.noalias() += y * y.transpose();
    gram.noalias() += inst.features * inst.features.transpose();
    cross.noalias() += inst.features * y.transpose();
  }

  // Eigen's solver handles arbitrary K here; the Jacobi kernel is reserved
  // for the small matrices of the online update.
  Eigen::SelfAdjointEigenSolver<Matrix> es(label_scatter);
  OfflineReference ref;
  ref.p_star.rows.resize(code_dim, k);
  for (int i = 0; i < code_dim; ++i) ref.p_star.rows.row(i) = es.eigenvectors().col(k - 1 - i).transpose();
  ref.h_star = gram.ldlt().solve(cross);
  ref.w_sharp = ref.h_star * ref.p_star.rows.transpose();
  return ref;
}

double RegretReport::delta_sum() const {
  double s = 0.0;
  for (double v : delta) s += v;
  return s;
}

bool RegretReport::assumptions_hold() const {
  return max_feature_norm <= 1.0 + 1e-12 && max_label_norm <= 1.0 + 1e-12;
}

RegretReport expected_regret(const std::vector<RegretSnapshot>& log, const std::vector<Instance>& stream,
                             const OfflineReference& reference) {
  if (log.size() < stream.size())
    throw ContractViolation("expected_regret: " + std::to_string(stream.size() - log.size()) +
                            " snapshots missing");
  const Matrix& p_star = reference.p_star.rows;
  const Eigen::Index k = p_star.cols();
  const Matrix u_star = p_star.transpose() * p_star;
  const Matrix identity = Matrix::Identity(k, k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));

  RegretReport r;
  r.average.reserve(stream.size());
  r.delta.reserve(stream.size());
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const RegretSnapshot& snap = log[t];
    const Vector& x = stream[t].features;
    const Vector y = stream[t].labels * scale;
    r.max_feature_norm = std::max(r.max_feature_norm, x.norm());
    r.max_label_norm = std::max(r.max_label_norm, y.norm());

    const Vector full_pred = snap.h.transpose() * x;
    const Vector residual = full_pred - y;
    r.epsilon_hat = std::max(r.epsilon_hat, residual.squaredNorm());

    // Expected online error: enumerate P = Q^{-i} with probability 1 - sigma[i].
    const Eigen::Index rows = snap.q.rows();
    double expected_loss = 0.0;
    const bool deterministic = std::abs(snap.sigma.sum() - static_cast<double>(rows)) < 1e-12;
    if (deterministic) {
      const Matrix& p = snap.q;
      expected_loss = (p * residual).squaredNorm() + ((identity - p.transpose() * p) * y).squaredNorm();
    } else {
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double prob = 1.0 - snap.sigma(i);
        if (prob <= 0.0) continue;
        Matrix p(rows - 1, k);
        p.topRows(i) = snap.q.topRows(i);
        p.bottomRows(rows - 1 - i) = snap.q.bottomRows(rows - 1 - i);
        const double loss = (p * full_pred - p * y).squaredNorm() + ((identity - p.transpose() * p) * y).squaredNorm();
        expected_loss += prob * loss;
      }
    }
    const Vector ref_residual = reference.w_sharp.transpose() * x - p_star * y;
    const double reference_loss = ref_residual.squaredNorm() + ((identity - u_star) * y).squaredNorm();
    r.cumulative += expected_loss - reference_loss;
    r.average.push_back(r.cumulative / static_cast<double>(t + 1));

    // Split used in the regret analysis: reconstruction + regression parts,
    // computed from U_t = E[P^T P] directly.
    const Matrix u = snap.q.transpose() * snap.sigma.asDiagonal() * snap.q;
    r.msg_part += y.dot((u_star - u) * y);
    const Vector star_residual = reference.h_star.transpose() * x - y;
    r.ridge_part += residual.dot(u * residual) - (p_star * star_residual).squaredNorm();

    r.delta.push_back(symmetric_spectral_norm(u - u_star));
  }
  return r;
}

double theorem2_bound(const RegretReport& report, double epsilon_hat, const Matrix& h_star, int code_dim,
                      int feature_dim, std::size_t horizon) {
  const double d = static_cast<double>(feature_dim);
  return (1.0 + epsilon_hat) * report.delta_sum() + 0.5 * code_dim * h_star.squaredNorm() +
         2.0 * epsilon_hat * code_dim * d * std::log(1.0 + static_cast<double>(horizon) / d);
}

MeanStdErr summarize(const std::vector<double>& values) {
  MeanStdErr s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stderr_ = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string header_block(const HeaderFields& header) {
  std::string out;
  for (const auto& [key, value] : header) out += "# " + key + ": " + value + "\n";
  return out;
}

}  // namespace

std::string cost_trace_csv(const CostTrace& trace, const HeaderFields& header) {
  std::string out = header_block(header);
  out += "t,avg_cost\n";
  for (std::size_t t = 0; t < trace.running_average.size(); ++t)
    out += std::to_string(t + 1) + "," + format_real(trace.running_average[t]) + "\n";
  return out;
}

std::string regret_csv(const RegretReport& report, const HeaderFields& header, std::size_t stride) {
  if (stride == 0) stride = 1;
  std::string out = header_block(header);
  out += "t,delta,avg_regret\n";
  const std::size_t n = report.average.size();
  for (std::size_t t = 0; t < n; ++t) {
    if ((t + 1) % stride != 0 && t + 1 != n) continue;
    out += std::to_string(t + 1) + "," + format_real(report.delta[t]) + "," + format_real(report.average[t]) + "\n";
  }
  return out;
}

}  // namespace csdpp
