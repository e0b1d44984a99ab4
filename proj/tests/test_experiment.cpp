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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csdpp/errors.hpp"
#include "csdpp/experiment.hpp"

namespace csdpp {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("csdpp_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentSpec small_spec(const fs::path& out) {
  ExperimentSpec spec;
  spec.synthetic.count = 300;
  spec.algorithms = {Algorithm::kDppPbc, Algorithm::kCsDppPbt};
  spec.costs = {"hamming", "f1"};
  spec.m_fractions = {0.3};
  spec.repeats = 2;
  spec.seed_base = 7;
  spec.out_dir = out.string();
  spec.regret = true;
  spec.workers = 2;
  return spec;
}

TEST(Spec, ValidationRejectsBadGrids) {
  ExperimentSpec spec;
  spec.repeats = 0;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = ExperimentSpec{};
  spec.m_fractions = {0.0};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = ExperimentSpec{};
  spec.costs = {"bogus"};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = ExperimentSpec{};
  spec.noise_ps = {1.5};
  EXPECT_THROW(spec.validate(), ConfigError);
  EXPECT_NO_THROW(ExperimentSpec{}.validate());
}

TEST(Spec, JsonConfigApplies) {
  ExperimentSpec spec;
  apply_json(spec, nlohmann::json::parse(R"({"algo": ["dpp-pbt", "o-br"], "cost": "f1", "m_frac": [0.1, 0.5],
      "repeats": 4, "seed": 9, "label_order": "random", "order_seed": 5, "synthetic": {"K": 12, "ensure_positive": true}})"));
  EXPECT_EQ(spec.algorithms, (std::vector<Algorithm>{Algorithm::kDppPbt, Algorithm::kObr}));
  EXPECT_EQ(spec.costs, std::vector<std::string>{"f1"});
  EXPECT_EQ(spec.m_fractions.size(), 2u);
  EXPECT_EQ(spec.repeats, 4);
  EXPECT_EQ(spec.seed_base, 9u);
  EXPECT_TRUE(spec.random_label_order);
  EXPECT_EQ(spec.synthetic.label_dim, 12);
  EXPECT_TRUE(spec.synthetic.ensure_positive);
  EXPECT_THROW(apply_json(spec, nlohmann::json::parse(R"({"unknown": 1})")), ConfigError);
  EXPECT_THROW(apply_json(spec, nlohmann::json::parse(R"({"repeats": "many"})")), ConfigError);
}

TEST(Grid, RepeatUsesSeedBasePlusIndex) {
  ExperimentSpec spec;
  spec.algorithms = {Algorithm::kDppPbc, Algorithm::kDppPbt};
  spec.costs = {"hamming", "rank"};
  spec.m_fractions = {0.1, 0.25, 0.5};
  spec.noise_ps = {0.0, 0.1};
  spec.repeats = 3;
  spec.seed_base = 100;
  const auto cells = expand_grid(spec);
  EXPECT_EQ(cells.size(), 2u * 2 * 3 * 2 * 3);
  for (const auto& c : cells) EXPECT_EQ(c.seed, 100u + static_cast<std::uint64_t>(c.repeat));
  EXPECT_EQ(cells.front().name(), "dpp-pbc_hamming_m0.1_p0_r0");
}

TEST(Experiment, WritesArtifactsWithConfigHeader) {
  const fs::path out = scratch("artifacts");
  const auto outcome = run_experiment(small_spec(out));
  EXPECT_EQ(outcome.cells.size(), 8u);
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  const std::string csv = slurp(out / "dpp-pbc_f1_m0.3_p0_r1.csv");
  EXPECT_NE(csv.find("# algorithm: dpp-pbc\n"), std::string::npos);
  EXPECT_NE(csv.find("# seed: 8\n"), std::string::npos);
  EXPECT_NE(csv.find("# lambda: 1\n"), std::string::npos);
  EXPECT_NE(csv.find("t,avg_cost\n1,"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "dpp-pbc_f1_m0.3_p0_r1.regret.csv"));
  EXPECT_FALSE(fs::exists(out / "cs-dpp-pbt_f1_m0.3_p0_r1.regret.csv"));
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary["cells"].size(), 4u);
  EXPECT_EQ(summary["cells"][0]["repeats"], 2);
  for (const auto& entry : fs::directory_iterator(out))
    EXPECT_EQ(entry.path().string().find(".tmp."), std::string::npos) << entry.path();
}

TEST(Experiment, RerunIsByteIdenticalRegardlessOfWorkers) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  auto spec = small_spec(a);
  run_experiment(spec);
  spec.out_dir = b.string();
  spec.workers = 1;
  run_experiment(spec);
  for (const auto& entry : fs::directory_iterator(a))
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
}

TEST(Experiment, UnreadableDatasetFails) {
  ExperimentSpec spec;
  spec.data_path = "/nonexistent/data.txt";
  spec.out_dir = scratch("unreadable").string();
  EXPECT_THROW(run_experiment(spec), std::exception);
}

TEST(Workers, ExplicitThenEnvironment) {
  EXPECT_EQ(resolve_workers(3), 3);
  setenv("CSDPP_WORKERS", "5", 1);
  EXPECT_EQ(resolve_workers(0), 5);
  unsetenv("CSDPP_WORKERS");
  EXPECT_GE(resolve_workers(0), 1);
}

TEST(AtomicWrite, ReplacesContent) {
  const fs::path dir = scratch("atomic");
  fs::create_directories(dir);
  const fs::path file = dir / "x.txt";
  write_file_atomic(file.string(), "one");
  write_file_atomic(file.string(), "two");
  EXPECT_EQ(slurp(file), "two");
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
}

}  // namespace
}  // namespace csdpp
