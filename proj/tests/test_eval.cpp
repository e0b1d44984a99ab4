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

#include <cmath>

#include "csdpp/errors.hpp"
#include "csdpp/eval.hpp"
#include "csdpp/verify.hpp"

namespace csdpp {
namespace {

Instance make_instance(const Vector& x, const Vector& y) { return Instance{x, y}; }

// Snapshot log that replays the offline reference: U_t = P*^T P* (one extra
// orthogonal row with zero weight) and H_t = H*.
std::vector<RegretSnapshot> reference_log(const OfflineReference& ref, std::size_t count) {
  const Matrix& p = ref.p_star.rows;
  const Eigen::Index m = p.rows(), k = p.cols();
  Eigen::HouseholderQR<Matrix> qr(Matrix(p.transpose()));
  const Matrix full = Matrix(qr.householderQ()).transpose();  // k x k, first m rows span P*
  RegretSnapshot s;
  s.q.resize(m + 1, k);
  s.q.topRows(m) = p;
  s.q.row(m) = full.row(m);
  s.sigma = Vector::Ones(m + 1);
  s.sigma(m) = 0.0;
  s.h = ref.h_star;
  std::vector<RegretSnapshot> log(count, s);
  for (std::size_t t = 0; t < count; ++t) log[t].t = static_cast<std::int64_t>(t + 1);
  return log;
}

std::vector<Instance> planted_prefix(std::size_t count, int k = 6) {
  PlantedStreamConfig cfg;
  cfg.feature_dim = 8;
  cfg.label_dim = k;
  cfg.rank = 2;
  cfg.count = count;
  cfg.seed = 9;
  return make_planted_stream(cfg).instances;
}

TEST(CostTraceTest, RunningAverage) {
  CostTrace t;
  t.track(0.5);
  t.track(0.25);
  EXPECT_EQ(t.running_average, (std::vector<double>{0.5, 0.375}));
  EXPECT_EQ(t.final_average(), 0.375);
}

TEST(CostTraceTest, ZerosStayZero) {
  CostTrace t;
  for (int i = 0; i < 10; ++i) t.track(0.0);
  for (double v : t.running_average) EXPECT_EQ(v, 0.0);
}

TEST(CostTraceTest, MatchesRecomputation) {
  Rng rng(1);
  CostTrace t;
  std::vector<double> costs;
  for (int i = 0; i < 1000; ++i) {
    costs.push_back(rng.uniform());
    t.track(costs.back());
    double sum = 0.0;
    for (double c : costs) sum += c;
    ASSERT_NEAR(t.running_average.back(), sum / static_cast<double>(costs.size()), 1e-12);
  }
}

TEST(CostTraceTest, RejectsOutOfRange) {
  CostTrace t;
  EXPECT_THROW(t.track(1.5), ContractViolation);
  EXPECT_THROW(t.track(-0.1), ContractViolation);
}

TEST(OfflinePlst, ConstantLabelsAreSpannedByOneDirection) {
  Vector v(4);
  v << 1, -1, 1, 1;
  std::vector<Instance> stream;
  Rng rng(2);
  for (int i = 0; i < 30; ++i) stream.push_back(make_instance(Vector::Constant(3, rng.uniform()), v));
  const auto ref = offline_plst(stream, 1);
  const Vector y = v / 2.0;
  const Matrix& p = ref.p_star.rows;
  EXPECT_LT(((Matrix::Identity(4, 4) - p.transpose() * p) * y).norm(), 1e-12);
}

TEST(OfflinePlst, FullDimensionReconstructsEverything) {
  const auto stream = planted_prefix(200);
  const auto ref = offline_plst(stream, 6);
  const Matrix& p = ref.p_star.rows;
  EXPECT_LT((p.transpose() * p - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OfflinePlst, RankTwoLabelsAreCapturedExactly) {
  Vector a(5), b(5);
  a << 1, 1, -1, -1, 1;
  b << -1, 1, 1, -1, -1;
  std::vector<Instance> stream;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) stream.push_back(make_instance(Vector::Constant(2, rng.normal()), rng.uniform() < 0.5 ? a : b));
  const auto ref = offline_plst(stream, 2);
  const Matrix& p = ref.p_star.rows;
  double total = 0.0;
  for (const auto& inst : stream) {
    const Vector y = inst.labels / std::sqrt(5.0);
    total += ((Matrix::Identity(5, 5) - p.transpose() * p) * y).squaredNorm();
  }
  EXPECT_LE(total, 1e-8);
}

TEST(Regret, ReplayingTheReferenceHasZeroRegretAndZeroDelta) {
  const auto stream = planted_prefix(300);
  const auto ref = offline_plst(stream, 2);
  const auto report = expected_regret(reference_log(ref, stream.size()), stream, ref);
  EXPECT_NEAR(report.cumulative, 0.0, 1e-9);
  for (double d : report.delta) EXPECT_NEAR(d, 0.0, 1e-12);
  EXPECT_NEAR(report.cumulative, report.msg_part + report.ridge_part, 1e-9);
}

TEST(Regret, MissingSnapshotsAreRejected) {
  const auto stream = planted_prefix(10);
  const auto ref = offline_plst(stream, 2);
  EXPECT_THROW(expected_regret(reference_log(ref, 5), stream, ref), ContractViolation);
}

TEST(Regret, TwoRoutesAgreeOnARealRun) {
  const auto stream = planted_prefix(500);
  LearnerConfig c;
  c.algorithm = Algorithm::kDppPbc;
  c.code_dim = 2;
  c.seed = 4;
  auto l = make_learner(c, 8, 6);
  std::vector<RegretSnapshot> log;
  l->set_snapshot_observer([&](const RegretSnapshot& s) { log.push_back(s); });
  for (const auto& inst : stream) l->step(inst.features, inst.labels);
  const auto ref = offline_plst(stream, 2);
  const auto r = expected_regret(log, stream, ref);
  EXPECT_NEAR(r.cumulative, r.msg_part + r.ridge_part, 1e-8);
  EXPECT_TRUE(r.assumptions_hold());
  for (double d : r.delta) EXPECT_GE(d, 0.0);
  EXPECT_LE(r.cumulative, theorem2_bound(r, r.epsilon_hat, ref.h_star, 2, 8, stream.size()));
}

TEST(Bound, ZeroDriftAndZeroEpsilon) {
  RegretReport r;
  r.delta = {0.0, 0.0};
  Matrix h = Matrix::Ones(2, 3);
  EXPECT_NEAR(theorem2_bound(r, 0.0, h, 4, 2, 2), 2.0 * 6.0, 1e-14);
}

TEST(Bound, DirectSubstitution) {
  RegretReport r;
  r.delta = std::vector<double>(7, 0.0);
  EXPECT_NEAR(theorem2_bound(r, 1.0, Matrix::Zero(7, 3), 1, 7, 7), 2.0 * 7.0 * std::log(2.0), 1e-12);
}

TEST(Summary, MeanAndStandardError) {
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stderr_, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(summarize({7.0}).stderr_, 0.0);
}

TEST(Csv, CostTraceHasHeaderAndRows) {
  CostTrace t;
  t.track(0.5);
  t.track(0.25);
  const std::string csv = cost_trace_csv(t, {{"algorithm", "dpp-pbc"}, {"seed", "7"}});
  EXPECT_EQ(csv, "# algorithm: dpp-pbc\n# seed: 7\nt,avg_cost\n1,0.5\n2,0.375\n");
}

TEST(Csv, RegretStrideKeepsLastRow) {
  RegretReport r;
  r.delta = {0.1, 0.2, 0.3};
  r.average = {1.0, 0.5, 0.25};
  EXPECT_EQ(regret_csv(r, {}, 2), "t,delta,avg_regret\n2,0.2,0.5\n3,0.3,0.25\n");
}

}  // namespace
}  // namespace csdpp
