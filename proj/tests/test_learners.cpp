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
#include "csdpp/eval.hpp"
#include "csdpp/experiment.hpp"
#include "csdpp/learners.hpp"
#include "csdpp/stream.hpp"
#include "csdpp/verify.hpp"

namespace csdpp {
namespace {

Dataset planted(std::size_t count, std::uint64_t seed = 1, int k = 10, int rank = 3) {
  PlantedStreamConfig cfg;
  cfg.label_dim = k;
  cfg.rank = rank;
  cfg.count = count;
  cfg.seed = seed;
  return make_planted_stream(cfg);
}

LearnerConfig config_for(Algorithm a, int m, std::uint64_t seed = 3, const std::string& cost = "hamming") {
  LearnerConfig c;
  c.algorithm = a;
  c.code_dim = m;
  c.seed = seed;
  c.cost_name = cost;
  return c;
}

std::vector<Vector> predictions(Learner& learner, const Dataset& data) {
  std::vector<Vector> out;
  for (const auto& inst : data.instances) out.push_back(learner.step(inst.features, inst.labels).y_hat);
  return out;
}

TEST(Decode, ZeroCodeGivesAllPositive) {
  const ProjectionMatrix<double> p{Matrix::Identity(2, 4)};
  EXPECT_EQ(decode(p, Vector::Zero(2)), Vector::Ones(4));
}

TEST(Decode, CoordinateCase) {
  const ProjectionMatrix<double> p{Matrix::Identity(2, 3)};
  Vector code(2), expected(3);
  code << -2, 3;
  expected << -1, 1, 1;
  EXPECT_EQ(decode(p, code), expected);
}

TEST(Decode, InvariantToPositiveScaling) {
  Rng rng(1);
  const ProjectionMatrix<double> p{oracle::random_left_orthogonal(3, 7, 2)};
  for (int t = 0; t < 100; ++t) {
    Vector code(3);
    for (int i = 0; i < 3; ++i) code(i) = rng.normal();
    EXPECT_EQ(decode(p, code), decode(p, Vector(code * (0.01 + 10 * rng.uniform()))));
  }
}

TEST(Decode, ReferencePointShiftsThreshold) {
  const ProjectionMatrix<double> p{Matrix::Identity(1, 2)};
  Vector code(1), o(2);
  code << 0.5;
  o << -1.0, -1.0;
  Vector expected(2);
  expected << -1, -1;
  EXPECT_EQ(decode(p, code, o), expected);
}

TEST(CodeDim, CeilingOfFraction) {
  EXPECT_EQ(code_dim_from_fraction(0.3, 10), 3);
  EXPECT_EQ(code_dim_from_fraction(0.25, 10), 3);
  EXPECT_EQ(code_dim_from_fraction(0.01, 10), 1);
  EXPECT_EQ(code_dim_from_fraction(1.0, 10), 10);
  EXPECT_THROW(code_dim_from_fraction(0.0, 10), ConfigError);
  EXPECT_THROW(code_dim_from_fraction(1.5, 10), ConfigError);
}

TEST(Algorithms, NamesRoundTrip) {
  for (Algorithm a : {Algorithm::kDppPbc, Algorithm::kDppPbt, Algorithm::kDppNaive, Algorithm::kCsDppPbc,
                      Algorithm::kCsDppPbt, Algorithm::kObr, Algorithm::kOrand})
    EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
  EXPECT_FALSE(parse_algorithm("dpp").has_value());
}

TEST(Dpp, ReplayIsDeterministic) {
  const Dataset data = planted(500);
  for (Algorithm a : {Algorithm::kDppPbc, Algorithm::kDppPbt, Algorithm::kDppNaive, Algorithm::kCsDppPbt,
                      Algorithm::kOrand}) {
    auto l1 = make_learner(config_for(a, 3, 3, "f1"), data.feature_dim, data.label_dim);
    auto l2 = make_learner(config_for(a, 3, 3, "f1"), data.feature_dim, data.label_dim);
    for (const auto& inst : data.instances) {
      const auto r1 = l1->step(inst.features, inst.labels);
      const auto r2 = l2->step(inst.features, inst.labels);
      ASSERT_EQ(r1.y_hat, r2.y_hat) << algorithm_name(a);
      ASSERT_EQ(r1.incurred_cost, r2.incurred_cost);
      ASSERT_EQ(r1.t, r2.t);
    }
  }
}

TEST(Dpp, SnapshotRestoreContinuesIdentically) {
  const Dataset data = planted(400);
  for (Algorithm a : {Algorithm::kDppPbc, Algorithm::kDppPbt, Algorithm::kDppNaive, Algorithm::kCsDppPbc,
                      Algorithm::kObr, Algorithm::kOrand}) {
    auto original = make_learner(config_for(a, 4), data.feature_dim, data.label_dim);
    for (std::size_t i = 0; i < 200; ++i) original->step(data.instances[i].features, data.instances[i].labels);
    auto resumed = make_learner(config_for(a, 4), data.feature_dim, data.label_dim);
    resumed->restore(original->snapshot());
    EXPECT_EQ(resumed->steps(), 200);
    for (std::size_t i = 200; i < 400; ++i) {
      const auto& inst = data.instances[i];
      ASSERT_EQ(original->step(inst.features, inst.labels).y_hat, resumed->step(inst.features, inst.labels).y_hat)
          << algorithm_name(a) << " t=" << i;
    }
  }
}

TEST(Dpp, RestoreRejectsMismatchedCheckpoint) {
  auto a = make_learner(config_for(Algorithm::kDppPbc, 2), 4, 5);
  auto b = make_learner(config_for(Algorithm::kDppPbt, 2), 4, 5);
  EXPECT_THROW(b->restore(a->snapshot()), SchemaError);
}

TEST(Dpp, FullDimensionHasNoReconstructionError) {
  const Dataset data = planted(100);
  auto l = make_learner(config_for(Algorithm::kDppPbc, 10), data.feature_dim, data.label_dim);
  l->enable_audit(true);
  for (const auto& inst : data.instances) {
    l->step(inst.features, inst.labels);
    const auto& a = *l->last_audit();
    const Matrix& p = a.projection.rows;
    EXPECT_LT(((Matrix::Identity(10, 10) - p.transpose() * p) * a.target).norm(), 1e-15);
  }
}

TEST(Dpp, FullDimensionPbcMatchesBinaryRelevance) {
  const Dataset data = planted(800);
  auto dpp = make_learner(config_for(Algorithm::kDppPbc, 10), data.feature_dim, data.label_dim);
  auto obr = make_learner(config_for(Algorithm::kObr, 10), data.feature_dim, data.label_dim);
  EXPECT_EQ(predictions(*dpp, data), predictions(*obr, data));
}

TEST(Dpp, LearnsPlantedLinearLabels) {
  PlantedStreamConfig cfg;
  cfg.count = 5000;
  cfg.seed = 21;
  const Dataset data = make_planted_stream(cfg);
  auto l = make_learner(config_for(Algorithm::kDppPbc, 5), data.feature_dim, data.label_dim);
  const double loss = run_stream(*l, data.instances).final_average();
  EXPECT_LT(loss, 0.05);
  // The offline PLST solution on the same data sets the reference level.
  const OfflineReference ref = offline_plst(data.instances, 5);
  double offline = 0.0;
  for (const auto& inst : data.instances)
    offline += cost_hamming(inst.labels, decode(ref.p_star, Vector(ref.w_sharp.transpose() * inst.features)));
  EXPECT_LT(offline / static_cast<double>(data.instances.size()), 0.02);
}

TEST(Dpp, SgdEngineLearns) {
  const Dataset data = planted(3000);
  auto c = config_for(Algorithm::kDppPbt, 3);
  c.engine = RegressionEngine::kSgd;
  c.sgd.base = 2.0;
  auto l = make_learner(c, data.feature_dim, data.label_dim);
  EXPECT_LT(run_stream(*l, data.instances).final_average(), 0.3);
}

TEST(CsDpp, HammingReplaysDpp) {
  const Dataset data = planted(1000);
  for (auto [cs, plain] : {std::pair{Algorithm::kCsDppPbc, Algorithm::kDppPbc},
                           std::pair{Algorithm::kCsDppPbt, Algorithm::kDppPbt}}) {
    auto a = make_learner(config_for(cs, 3), data.feature_dim, data.label_dim);
    auto b = make_learner(config_for(plain, 3), data.feature_dim, data.label_dim);
    EXPECT_EQ(predictions(*a, data), predictions(*b, data));
  }
}

TEST(CsDpp, ConditionViolatingCostNeedsOverride) {
  auto c = config_for(Algorithm::kCsDppPbt, 2);
  c.custom_cost = CostFunction{"odd", [](const Vector& y, const Vector& yh) {
                                 if (y == yh) return 0.0;
                                 return (y(0) > 0) == (yh(0) > 0) ? 1.0 : 0.5;
                               }};
  EXPECT_THROW(make_learner(c, 4, 5), ConfigError);
  c.allow_condition_violation = true;
  EXPECT_NO_THROW(make_learner(c, 4, 5));
}

TEST(CsDpp, UsesTheConfiguredLabelOrder) {
  const Dataset data = planted(600);
  auto a = config_for(Algorithm::kCsDppPbt, 3, 3, "f1");
  auto b = a;
  b.label_order = LabelOrder::random(data.label_dim, 5);
  auto la = make_learner(a, data.feature_dim, data.label_dim);
  auto lb = make_learner(b, data.feature_dim, data.label_dim);
  EXPECT_NE(predictions(*la, data), predictions(*lb, data));
}

TEST(CsDpp, RejectsInvalidLabelOrder) {
  auto c = config_for(Algorithm::kCsDppPbt, 2, 3, "f1");
  c.label_order = LabelOrder{{0, 0, 1, 2, 3}};
  EXPECT_THROW(make_learner(c, 4, 5), ConfigError);
}

TEST(Obr, ColdStartPredictsAllPositive) {
  auto l = make_learner(config_for(Algorithm::kObr, 1), 3, 4);
  EXPECT_EQ(l->predict(Vector::Ones(3)), Vector::Ones(4));
}

TEST(Obr, SingleLabelIsOnlineRidgeClassification) {
  auto l = make_learner(config_for(Algorithm::kObr, 1), 2, 1);
  PbcState<double> ridge = PbcState<double>::make(2, 1, 1.0);
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    Vector x(2);
    x << rng.normal() * 0.5, 0.5;
    Vector y(1);
    y << (x(0) > 0.1 ? 1.0 : -1.0);
    ASSERT_EQ(l->step(x, y).y_hat, sign_of(Vector(ridge.h.transpose() * x)));
    pbc_update(ridge, x, y);
  }
}

TEST(Orand, SquareEncoderApproachesBinaryRelevance) {
  const Dataset data = planted(5000);
  auto orand = make_learner(config_for(Algorithm::kOrand, 10), data.feature_dim, data.label_dim);
  auto obr = make_learner(config_for(Algorithm::kObr, 10), data.feature_dim, data.label_dim);
  const double a = run_stream(*orand, data.instances).final_average();
  const double b = run_stream(*obr, data.instances).final_average();
  EXPECT_NEAR(a, b, 0.02);
}

TEST(Orand, OrthonormalEncoderPseudoInverseIsTranspose) {
  const Matrix p = oracle::random_left_orthogonal(3, 8, 6);
  const Matrix pinv = p.completeOrthogonalDecomposition().pseudoInverse();
  EXPECT_LT((pinv - p.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Learner, RejectsShapeMismatch) {
  auto l = make_learner(config_for(Algorithm::kDppPbc, 2), 3, 4);
  EXPECT_THROW(l->step(Vector::Ones(2), Vector::Ones(4)), DimensionError);
  EXPECT_THROW(make_learner(config_for(Algorithm::kDppPbc, 5), 3, 4), ConfigError);
}

}  // namespace
}  // namespace csdpp
