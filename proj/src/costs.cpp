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

#include "csdpp/costs.hpp"

#include <algorithm>
#include <cmath>

#include "csdpp/errors.hpp"

namespace csdpp {
namespace {

void check_lengths(const Vector& truth, const Vector& predicted) {
  if (truth.size() != predicted.size()) throw DimensionError("cost: label vectors differ in length");
}

struct Counts {
  int true_pos = 0, truth_pos = 0, pred_pos = 0, either_pos = 0;
};

Counts count(const Vector& truth, const Vector& predicted) {
  Counts c;
  for (Eigen::Index k = 0; k < truth.size(); ++k) {
    const bool t = truth(k) > 0, p = predicted(k) > 0;
    c.true_pos += t && p;
    c.truth_pos += t;
    c.pred_pos += p;
    c.either_pos += t || p;
  }
  return c;
}

}  // namespace

double cost_hamming(const Vector& truth, const Vector& predicted) {
  check_lengths(truth, predicted);
  if (truth.size() == 0) return 0.0;
  int wrong = 0;
  for (Eigen::Index k = 0; k < truth.size(); ++k) wrong += (truth(k) > 0) != (predicted(k) > 0);
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

double cost_rank(const Vector& truth, const Vector& predicted) {
  check_lengths(truth, predicted);
  // Pairs (i, j) with y[i] = +1, y[j] = -1: count mis-ordered and tied
  // predictions. Binary predictions reduce this to four counts.
  long pos_hat_pos = 0, pos_hat_neg = 0, neg_hat_pos = 0, neg_hat_neg = 0;
  for (Eigen::Index k = 0; k < truth.size(); ++k) {
    const bool t = truth(k) > 0, p = predicted(k) > 0;
    if (t)
      (p ? pos_hat_pos : pos_hat_neg)++;
    else
      (p ? neg_hat_pos : neg_hat_neg)++;
  }
  const long pairs = (pos_hat_pos + pos_hat_neg) * (neg_hat_pos + neg_hat_neg);
  if (pairs == 0) return 0.0;
  const double misordered = static_cast<double>(pos_hat_neg * neg_hat_pos);
  const double tied = static_cast<double>(pos_hat_pos * neg_hat_pos + pos_hat_neg * neg_hat_neg);
  return (misordered + 0.5 * tied) / static_cast<double>(pairs);
}

double cost_f1(const Vector& truth, const Vector& predicted) {
  check_lengths(truth, predicted);
  const Counts c = count(truth, predicted);
  const int denom = c.truth_pos + c.pred_pos;
  if (denom == 0) return 0.0;
  return 1.0 - 2.0 * c.true_pos / static_cast<double>(denom);
}

double cost_accuracy(const Vector& truth, const Vector& predicted) {
  check_lengths(truth, predicted);
  const Counts c = count(truth, predicted);
  if (c.either_pos == 0) return 0.0;
  return 1.0 - c.true_pos / static_cast<double>(c.either_pos);
}

std::vector<std::string> builtin_cost_names() { return {"hamming", "rank", "f1", "accuracy"}; }

std::optional<CostFunction> find_cost(const std::string& name) {
  if (name == "hamming") return CostFunction{name, cost_hamming};
  if (name == "rank") return CostFunction{name, cost_rank};
  if (name == "f1") return CostFunction{name, cost_f1};
  if (name == "accuracy") return CostFunction{name, cost_accuracy};
  return std::nullopt;
}

CostFunction cost_by_name(const std::string& name) {
  auto c = find_cost(name);
  if (!c) throw ConfigError("unknown cost '" + name + "' (expected hamming|rank|f1|accuracy)");
  return *c;
}

LabelOrder LabelOrder::identity(int label_dim) {
  LabelOrder o;
  o.order.resize(static_cast<std::size_t>(label_dim));
  for (int k = 0; k < label_dim; ++k) o.order[static_cast<std::size_t>(k)] = k;
  return o;
}

LabelOrder LabelOrder::random(int label_dim, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, StreamPurpose::kLabelOrder);
  LabelOrder o;
  for (std::size_t i : rng.permutation(static_cast<std::size_t>(label_dim))) o.order.push_back(static_cast<int>(i));
  return o;
}

bool LabelOrder::valid(int label_dim) const {
  if (order.size() != static_cast<std::size_t>(label_dim)) return false;
  std::vector<bool> seen(order.size(), false);
  for (int k : order) {
    if (k < 0 || k >= label_dim || seen[static_cast<std::size_t>(k)]) return false;
    seen[static_cast<std::size_t>(k)] = true;
  }
  return true;
}

WeightDiagonal label_weights(const CostFunction& cost, const Vector& truth, const Vector& predicted,
                             const LabelOrder& order) {
  const Eigen::Index k_dim = truth.size();
  if (predicted.size() != k_dim) throw DimensionError("label_weights: label vectors differ in length");
  if (!order.valid(static_cast<int>(k_dim))) throw ConfigError("label_weights: invalid label order");

  WeightDiagonal w;
  w.deltas.resize(k_dim);
  // `real` walks from y_hat toward y one label at a time in the given order.
  Vector real = predicted;
  for (int label : order.order) {
    real(label) = truth(label);
    Vector pred = real;
    pred(label) = -truth(label);
    w.deltas(label) = std::abs(cost(truth, pred) - cost(truth, real));
  }
  w.sqrt_deltas = w.deltas.cwiseSqrt();
  return w;
}

Vector weight_matrix(const WeightDiagonal& w) { return w.sqrt_deltas; }

double weighted_hamming(const WeightDiagonal& w, const Vector& truth, const Vector& predicted) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < truth.size(); ++k)
    if ((truth(k) > 0) != (predicted(k) > 0)) s += w.deltas(k);
  return s;
}

ConditionReport check_condition(const CostFunction& cost, std::size_t trials, int max_label_dim, Rng& rng,
                                std::size_t max_witnesses) {
  ConditionReport report;
  report.cost = cost.name;
  auto random_labels = [&](int k, double rate) {
    Vector v(k);
    for (int i = 0; i < k; ++i) v(i) = rng.uniform() < rate ? 1.0 : -1.0;
    return v;
  };
  for (std::size_t t = 0; t < trials; ++t) {
    const int k = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_label_dim)));
    // Vary the label density so sparse and dense vectors are both covered.
    const double rate = rng.uniform();
    const Vector truth = random_labels(k, rate);
    const Vector predicted = random_labels(k, rng.uniform());
    LabelOrder order;
    for (std::size_t i : rng.permutation(static_cast<std::size_t>(k))) order.order.push_back(static_cast<int>(i));
    const int position = static_cast<int>(rng.index(static_cast<std::uint64_t>(k)));

    Vector real = predicted;
    for (int p = 0; p <= position; ++p) {
      const int label = order.order[static_cast<std::size_t>(p)];
      real(label) = truth(label);
    }
    const int label = order.order[static_cast<std::size_t>(position)];
    Vector pred = real;
    pred(label) = -truth(label);
    const double gap = cost(truth, pred) - cost(truth, real);
    ++report.trials;
    if (gap < -Tolerances::kConditionSlack) {
      ++report.violations;
      if (report.witnesses.size() < max_witnesses)
        report.witnesses.push_back({truth, predicted, order, position, gap});
    }
  }
  return report;
}

}  // namespace csdpp
