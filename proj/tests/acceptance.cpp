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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Informational lines start with "  info".

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "csdpp/eval.hpp"
#include "csdpp/experiment.hpp"
#include "csdpp/learners.hpp"
#include "csdpp/stream.hpp"
#include "csdpp/verify.hpp"

namespace {

using namespace csdpp;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string suite_detail(const SuiteReport& r) {
  std::ostringstream out;
  for (const auto& p : r.properties) {
    out << p.name << "=" << p.measured << "/" << p.threshold;
    if (!p.witness.empty()) out << " [" << p.witness << "]";
    out << "; ";
  }
  return out.str();
}

Outcome suite(const std::string& name) {
  const SuiteReport r = run_suite(name, VerifyOptions{});
  return {r.passed(), suite_detail(r)};
}

// Mean final average cost of one (algorithm, cost) pair over all repeats.
double mean_final(const ExperimentSpec& spec, const Dataset& data, Algorithm a, const std::string& cost) {
  ExperimentSpec s = spec;
  s.algorithms = {a};
  s.costs = {cost};
  std::vector<double> finals;
  for (const Cell& cell : expand_grid(s)) finals.push_back(run_cell(s, data, cell).trace.final_average());
  return summarize(finals).mean;
}

ExperimentSpec planted_spec(std::size_t count, double positive_rate, bool ensure_positive) {
  ExperimentSpec spec;
  spec.synthetic.feature_dim = 20;
  spec.synthetic.label_dim = 10;
  spec.synthetic.rank = 3;
  spec.synthetic.count = count;
  spec.synthetic.positive_rate = positive_rate;
  spec.synthetic.ensure_positive = ensure_positive;
  spec.synthetic.seed = 11;
  spec.m_fractions = {0.3};
  spec.repeats = 5;
  spec.seed_base = 11;
  return spec;
}

Outcome basis_drift() {
  const ExperimentSpec spec = planted_spec(5000, 0.5, false);
  const Dataset data = load_experiment_data(spec);
  const double naive = mean_final(spec, data, Algorithm::kDppNaive, "hamming");
  const double pbt = mean_final(spec, data, Algorithm::kDppPbt, "hamming");
  const double pbc = mean_final(spec, data, Algorithm::kDppPbc, "hamming");
  char buf[200];
  std::snprintf(buf, sizeof buf, "hamming naive=%.4f pbt=%.4f pbc=%.4f", naive, pbt, pbc);
  return {naive >= 1.2 * pbt && naive >= 1.2 * pbc && pbc <= pbt + 0.01, buf};
}

Outcome hamming_reduction() {
  PlantedStreamConfig cfg;
  cfg.count = 2000;
  cfg.seed = 5;
  const Dataset data = make_planted_stream(cfg);
  std::size_t mismatches = 0, steps = 0;
  for (auto [cs, plain] : {std::pair{Algorithm::kCsDppPbc, Algorithm::kDppPbc},
                           std::pair{Algorithm::kCsDppPbt, Algorithm::kDppPbt}}) {
    LearnerConfig a;
    a.algorithm = cs;
    a.code_dim = 3;
    a.seed = 17;
    a.cost_name = "hamming";
    LearnerConfig b = a;
    b.algorithm = plain;
    auto la = make_learner(a, data.feature_dim, data.label_dim);
    auto lb = make_learner(b, data.feature_dim, data.label_dim);
    for (const auto& inst : data.instances) {
      ++steps;
      if (la->step(inst.features, inst.labels).y_hat != lb->step(inst.features, inst.labels).y_hat) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatching steps of " + std::to_string(steps)};
}

Outcome cost_sensitivity(std::vector<std::string>& info) {
  const ExperimentSpec spec = planted_spec(5000, 0.1, true);
  const Dataset data = load_experiment_data(spec);
  bool ok = true;
  std::ostringstream detail;
  for (const std::string cost : {"f1", "accuracy"}) {
    const double plain = mean_final(spec, data, Algorithm::kDppPbt, cost);
    const double cs = mean_final(spec, data, Algorithm::kCsDppPbt, cost);
    ok = ok && cs <= 0.95 * plain;
    detail << cost << " dpp-pbt=" << plain << " cs-dpp-pbt=" << cs << "; ";
    const double plain_c = mean_final(spec, data, Algorithm::kDppPbc, cost);
    const double cs_c = mean_final(spec, data, Algorithm::kCsDppPbc, cost);
    info.push_back(cost + " dpp-pbc=" + std::to_string(plain_c) + " cs-dpp-pbc=" + std::to_string(cs_c));
  }
  // Same comparison on a stream that allows empty label sets.
  const ExperimentSpec loose = planted_spec(5000, 0.1, false);
  const Dataset loose_data = load_experiment_data(loose);
  info.push_back("f1 without guaranteed positives: dpp-pbt=" +
                 std::to_string(mean_final(loose, loose_data, Algorithm::kDppPbt, "f1")) + " cs-dpp-pbt=" +
                 std::to_string(mean_final(loose, loose_data, Algorithm::kCsDppPbt, "f1")));
  return {ok, detail.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "csdpp_acceptance_determinism";
  fs::remove_all(root);
  ExperimentSpec spec = planted_spec(1000, 0.3, true);
  spec.algorithms = {Algorithm::kCsDppPbt, Algorithm::kDppPbc};
  spec.costs = {"f1", "rank"};
  spec.repeats = 2;
  spec.regret = true;
  spec.out_dir = (root / "a").string();
  run_experiment(spec);
  spec.out_dir = (root / "b").string();
  spec.workers = 1;
  run_experiment(spec);
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++files;
    if (slurp(entry.path()) != slurp(root / "b" / entry.path().filename())) ++differing;
  }
  return {files > 0 && differing == 0, std::to_string(differing) + " of " + std::to_string(files) + " files differ"};
}

}  // namespace

int main() {
  std::vector<std::string> info;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 sampler expectation", [] { return suite("lemma1"); }},
      {"2 cost decomposition", [] { return suite("lemma3"); }},
      {"3 rank-one ridge oracle", [] { return suite("sherman"); }},
      {"4 capped MSG feasibility and oracle", [] { return suite("projection"); }},
      {"5 cost bound audits", [] { return suite("bounds"); }},
      {"6 basis drift ordering", basis_drift},
      {"7 cs-dpp equals dpp under hamming", hamming_reduction},
      {"8 cost sensitivity", [&] { return cost_sensitivity(info); }},
      {"9 regret decay and bound", [] { return suite("regret"); }},
      {"10 byte-identical rerun", determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.passed ? 0 : 1;
    std::printf("%s criterion %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    for (const auto& line : info) std::printf("  info %s\n", line.c_str());
    info.clear();
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
