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

// csdpp command-line entry point: run experiment grids, property suites and
// the synthetic stream generator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "csdpp/errors.hpp"
#include "csdpp/experiment.hpp"
#include "csdpp/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct RunFlags {
  std::string config_path;
  std::string data;
  std::string format;
  std::string labels;
  std::vector<std::string> algos;
  std::vector<std::string> costs;
  std::vector<double> m_fracs;
  std::vector<double> noise_ps;
  std::optional<int> repeats;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> eta;
  std::optional<double> lambda;
  std::string engine;
  std::optional<double> sgd_step;
  std::string label_order;
  std::optional<std::uint64_t> order_seed;
  std::optional<std::size_t> limit;
  bool normalize = false;
  bool regret = false;
  std::optional<std::size_t> regret_stride;
  std::optional<int> workers;
  bool allow_violation = false;
};

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw csdpp::ConfigError("cannot read config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw csdpp::ConfigError("config file " + path + ": " + e.what());
  }
}

// Flags are layered onto the JSON config as an override object so both
// routes share one validation path.
csdpp::ExperimentSpec build_spec(const RunFlags& f) {
  csdpp::ExperimentSpec spec;
  if (!f.config_path.empty()) csdpp::apply_json(spec, read_json_file(f.config_path));
  nlohmann::json o = nlohmann::json::object();
  if (!f.data.empty()) o["data"] = f.data;
  if (!f.format.empty()) o["format"] = f.format;
  if (!f.labels.empty()) o["labels"] = f.labels;
  if (!f.algos.empty()) o["algo"] = f.algos;
  if (!f.costs.empty()) o["cost"] = f.costs;
  if (!f.m_fracs.empty()) o["m_frac"] = f.m_fracs;
  if (!f.noise_ps.empty()) o["noise_p"] = f.noise_ps;
  if (f.repeats) o["repeats"] = *f.repeats;
  if (f.seed) o["seed"] = *f.seed;
  if (!f.out.empty()) o["out"] = f.out;
  if (f.eta) o["eta"] = *f.eta;
  if (f.lambda) o["lambda"] = *f.lambda;
  if (!f.engine.empty()) o["engine"] = f.engine;
  if (f.sgd_step) o["sgd_step"] = *f.sgd_step;
  if (!f.label_order.empty()) o["label_order"] = f.label_order;
  if (f.order_seed) o["order_seed"] = *f.order_seed;
  if (f.limit) o["limit"] = *f.limit;
  if (f.normalize) o["normalize"] = true;
  if (f.regret) o["regret"] = true;
  if (f.regret_stride) o["regret_stride"] = *f.regret_stride;
  if (f.workers) o["workers"] = *f.workers;
  csdpp::apply_json(spec, o);
  if (f.allow_violation) spec.allow_condition_violation = true;
  spec.validate();
  return spec;
}

int run_command(const RunFlags& flags) {
  const csdpp::ExperimentSpec spec = build_spec(flags);
  const auto outcome = csdpp::run_experiment(spec);
  for (const auto& cell : outcome.summary["cells"]) {
    std::printf("%-40s mean=%s stderr=%s (n=%d)\n", cell["cell"].get<std::string>().c_str(),
                csdpp::format_real(cell["final_avg_cost_mean"].get<double>()).c_str(),
                csdpp::format_real(cell["final_avg_cost_stderr"].get<double>()).c_str(), cell["repeats"].get<int>());
  }
  std::printf("wrote %zu cells to %s\n", outcome.cells.size(), spec.out_dir.c_str());
  return kExitOk;
}

int verify_command(const std::string& suite, const csdpp::VerifyOptions& options) {
  std::vector<std::string> suites = suite == "all" ? csdpp::suite_names() : std::vector<std::string>{suite};
  nlohmann::json reports = nlohmann::json::array();
  bool ok = true;
  for (const auto& name : suites) {
    const auto report = csdpp::run_suite(name, options);
    ok = ok && report.passed();
    reports.push_back(report.to_json());
  }
  std::cout << (suites.size() == 1 ? reports.front() : reports).dump(2) << "\n";
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csdpp: online cost-sensitive multi-label learning with principal label space projection"};
  app.require_subcommand(1);

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment grid and write CSV/JSON artifacts");
  run_cmd->add_option("--config", run.config_path, "JSON config file; flags win on conflict")->check(CLI::ExistingFile);
  run_cmd->add_option("--data", run.data, "Dataset path (planted synthetic stream if omitted)");
  run_cmd->add_option("--format", run.format, "Dataset format")->check(CLI::IsMember({"sparse-labels", "arff"}));
  run_cmd->add_option("--labels", run.labels, "ARFF label-attribute list file");
  run_cmd->add_option("--algo", run.algos, "Algorithms")
      ->check(CLI::IsMember({"dpp-pbc", "dpp-pbt", "dpp-naive", "cs-dpp-pbc", "cs-dpp-pbt", "o-br", "o-rand"}));
  run_cmd->add_option("--cost", run.costs, "Cost functions (hamming, rank, f1, accuracy)")
      ->check(CLI::IsMember(csdpp::builtin_cost_names()));
  run_cmd->add_option("--m-frac", run.m_fracs, "Code dimension as a fraction of K");
  run_cmd->add_option("--noise-p", run.noise_ps, "Probability of flipping each positive label");
  run_cmd->add_option("--repeats", run.repeats, "Repetitions per cell (repeat r uses seed + r)");
  run_cmd->add_option("--seed", run.seed, "Seed base");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--eta", run.eta, "Constant MSG learning rate (default: 2/sqrt(t) * M/K)");
  run_cmd->add_option("--lambda", run.lambda, "Ridge regularization");
  run_cmd->add_option("--engine", run.engine, "Regression engine")->check(CLI::IsMember({"ridge", "sgd"}));
  run_cmd->add_option("--sgd-step", run.sgd_step, "Base step of the gradient engine (base/sqrt(t))");
  run_cmd->add_option("--label-order", run.label_order, "Label order for the weights")
      ->check(CLI::IsMember({"native", "random"}));
  run_cmd->add_option("--order-seed", run.order_seed, "Seed of the random label order");
  run_cmd->add_option("--limit", run.limit, "Truncate the stream after permutation");
  run_cmd->add_flag("--normalize", run.normalize, "Min-max features and scale into the unit ball");
  run_cmd->add_flag("--regret", run.regret, "Write regret CSVs for dpp-pbc cells");
  run_cmd->add_option("--regret-stride", run.regret_stride, "Row stride of the regret CSV");
  run_cmd->add_option("--workers", run.workers, "Worker threads (default: CSDPP_WORKERS or all cores)");
  run_cmd->add_flag("--allow-condition-violation", run.allow_violation,
                    "Run cost-sensitive learners even if the cost fails the condition check");

  std::string suite = "all";
  csdpp::VerifyOptions verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "Run property suites and print a JSON report");
  std::vector<std::string> suite_choices = csdpp::suite_names();
  suite_choices.push_back("all");
  verify_cmd->add_option("suite", suite, "Suite name or 'all'")->check(CLI::IsMember(suite_choices));
  verify_cmd->add_option("--cost", verify_opts.cost, "Restrict lemma3 to one cost")
      ->check(CLI::IsMember(csdpp::builtin_cost_names()));
  verify_cmd->add_option("--trials", verify_opts.trials, "Condition-check trials for lemma3");
  verify_cmd->add_option("--seed", verify_opts.seed, "Suite seed");

  csdpp::PlantedStreamConfig gen;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Write a planted synthetic stream in sparse-labels format");
  gen_cmd->add_option("--d", gen.feature_dim, "Feature dimension");
  gen_cmd->add_option("--K", gen.label_dim, "Label dimension");
  gen_cmd->add_option("--rank", gen.rank, "Rank of the latent label structure");
  gen_cmd->add_option("--T", gen.count, "Number of instances");
  gen_cmd->add_option("--positive-rate", gen.positive_rate, "Target positive rate per label");
  gen_cmd->add_option("--label-noise", gen.label_noise, "Std. dev. of latent noise");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_flag("!--no-bias", gen.bias_feature, "Drop the constant bias feature");
  gen_cmd->add_flag("--ensure-positive", gen.ensure_positive, "Give every instance at least one positive label");
  gen_cmd->add_option("--out", gen_out, "Output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return run_command(run);
    if (*verify_cmd) return verify_command(suite, verify_opts);
    if (*gen_cmd) {
      const std::string text = csdpp::serialize_sparse_labels(csdpp::make_planted_stream(gen));
      if (gen_out.empty()) std::cout << text;
      else csdpp::write_file_atomic(gen_out, text);
      return kExitOk;
    }
  } catch (const csdpp::ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const csdpp::InvalidBudget& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
