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

#include "csdpp/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "csdpp/costs.hpp"
#include "csdpp/errors.hpp"

namespace csdpp {

namespace {

std::string format_name(DatasetFormat f) { return f == DatasetFormat::kArff ? "arff" : "sparse-labels"; }

std::string engine_name(RegressionEngine e) { return e == RegressionEngine::kSgd ? "sgd" : "ridge"; }

std::string eta_description(const LearningRateSchedule& s) {
  if (s.kind == LearningRateSchedule::Kind::kConstant) return "constant " + format_real(s.base);
  return format_real(s.base) + "/sqrt(t)*M/K";
}

template <typename T>
std::vector<T> json_list(const nlohmann::json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

void ExperimentSpec::validate() const {
  if (algorithms.empty()) throw ConfigError("no algorithm selected");
  if (costs.empty()) throw ConfigError("no cost selected");
  if (m_fractions.empty()) throw ConfigError("no M fraction given");
  if (noise_ps.empty()) throw ConfigError("no noise level given");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  for (double f : m_fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("M fraction " + format_real(f) + " outside (0, 1]");
  for (double p : noise_ps)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("noise level " + format_real(p) + " outside [0, 1]");
  for (const auto& c : costs) cost_by_name(c);
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (regret_stride == 0) throw ConfigError("regret stride must be positive");
}

void apply_json(ExperimentSpec& spec, const nlohmann::json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : config.items()) {
      if (key == "data") spec.data_path = value.get<std::string>();
      else if (key == "format") {
        const auto f = value.get<std::string>();
        if (f == "arff") spec.format = DatasetFormat::kArff;
        else if (f == "sparse-labels") spec.format = DatasetFormat::kSparseLabels;
        else throw ConfigError("unknown format '" + f + "'");
      } else if (key == "labels") spec.label_list_path = value.get<std::string>();
      else if (key == "algo") {
        spec.algorithms.clear();
        for (const auto& name : json_list<std::string>(value)) {
          const auto a = parse_algorithm(name);
          if (!a) throw ConfigError("unknown algorithm '" + name + "'");
          spec.algorithms.push_back(*a);
        }
      } else if (key == "cost") spec.costs = json_list<std::string>(value);
      else if (key == "m_frac") spec.m_fractions = json_list<double>(value);
      else if (key == "noise_p") spec.noise_ps = json_list<double>(value);
      else if (key == "repeats") spec.repeats = value.get<int>();
      else if (key == "seed") spec.seed_base = value.get<std::uint64_t>();
      else if (key == "out") spec.out_dir = value.get<std::string>();
      else if (key == "eta") spec.eta = LearningRateSchedule::constant(value.get<double>());
      else if (key == "lambda") spec.lambda = value.get<double>();
      else if (key == "engine") {
        const auto e = value.get<std::string>();
        if (e == "ridge") spec.engine = RegressionEngine::kRidge;
        else if (e == "sgd") spec.engine = RegressionEngine::kSgd;
        else throw ConfigError("unknown engine '" + e + "'");
      } else if (key == "sgd_step") spec.sgd.base = value.get<double>();
      else if (key == "label_order") {
        const auto o = value.get<std::string>();
        if (o != "native" && o != "random") throw ConfigError("label order must be native or random");
        spec.random_label_order = o == "random";
      } else if (key == "order_seed") spec.order_seed = value.get<std::uint64_t>();
      else if (key == "limit") spec.limit = value.get<std::size_t>();
      else if (key == "normalize") spec.normalize = value.get<bool>();
      else if (key == "regret") spec.regret = value.get<bool>();
      else if (key == "regret_stride") spec.regret_stride = value.get<std::size_t>();
      else if (key == "workers") spec.workers = value.get<int>();
      else if (key == "synthetic") {
        for (const auto& [sk, sv] : value.items()) {
          if (sk == "d") spec.synthetic.feature_dim = sv.get<int>();
          else if (sk == "K") spec.synthetic.label_dim = sv.get<int>();
          else if (sk == "rank") spec.synthetic.rank = sv.get<int>();
          else if (sk == "T") spec.synthetic.count = sv.get<std::size_t>();
          else if (sk == "positive_rate") spec.synthetic.positive_rate = sv.get<double>();
          else if (sk == "label_noise") spec.synthetic.label_noise = sv.get<double>();
          else if (sk == "seed") spec.synthetic.seed = sv.get<std::uint64_t>();
          else if (sk == "bias") spec.synthetic.bias_feature = sv.get<bool>();
          else if (sk == "ensure_positive") spec.synthetic.ensure_positive = sv.get<bool>();
          else throw ConfigError("unknown synthetic key '" + sk + "'");
        }
      } else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string Cell::group() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s_%s_m%g_p%g", algorithm_name(algorithm).c_str(), cost.c_str(), m_fraction,
                noise_p);
  return buf;
}

std::string Cell::name() const { return group() + "_r" + std::to_string(repeat); }

std::vector<Cell> expand_grid(const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  for (Algorithm a : spec.algorithms)
    for (const auto& c : spec.costs)
      for (double m : spec.m_fractions)
        for (double p : spec.noise_ps)
          for (int r = 0; r < spec.repeats; ++r)
            cells.push_back({a, c, m, p, r, spec.seed_base + static_cast<std::uint64_t>(r)});
  return cells;
}

CostTrace run_stream(Learner& learner, const std::vector<Instance>& stream) {
  CostTrace trace;
  for (const Instance& inst : stream) trace.track(learner.step(inst.features, inst.labels).incurred_cost);
  return trace;
}

Dataset load_experiment_data(const ExperimentSpec& spec) {
  if (spec.data_path.empty()) return make_planted_stream(spec.synthetic);
  return load_dataset(spec.data_path, spec.format, spec.label_list_path);
}

CellResult run_cell(const ExperimentSpec& spec, const Dataset& data, const Cell& cell) {
  StreamConfig sc;
  sc.seed = cell.seed;
  sc.noise_p = cell.noise_p;
  sc.limit = spec.limit;
  sc.normalize_features = spec.normalize;
  const Dataset stream = prepare_stream(data, sc);

  LearnerConfig config;
  config.algorithm = cell.algorithm;
  config.code_dim = code_dim_from_fraction(cell.m_fraction, data.label_dim);
  config.lambda = spec.lambda;
  config.eta = spec.eta;
  config.engine = spec.engine.value_or(suggest_engine(data.feature_dim, data.label_dim));
  config.sgd = spec.sgd;
  config.cost_name = cell.cost;
  if (spec.random_label_order) config.label_order = LabelOrder::random(data.label_dim, spec.order_seed);
  config.seed = cell.seed;
  config.allow_condition_violation = spec.allow_condition_violation;

  auto learner = make_learner(config, data.feature_dim, data.label_dim);
  const bool want_regret = spec.regret && cell.algorithm == Algorithm::kDppPbc;
  std::vector<RegretSnapshot> log;
  if (want_regret) learner->set_snapshot_observer([&](const RegretSnapshot& s) { log.push_back(s); });

  CellResult result;
  result.cell = cell;
  result.code_dim = config.code_dim;
  result.trace = run_stream(*learner, stream.instances);
  if (want_regret && !stream.instances.empty()) {
    const OfflineReference ref = offline_plst(stream.instances, config.code_dim);
    result.regret = expected_regret(log, stream.instances, ref);
  }

  auto& h = result.header;
  h.emplace_back("algorithm", algorithm_name(cell.algorithm));
  h.emplace_back("cost", cell.cost);
  h.emplace_back("m_frac", format_real(cell.m_fraction));
  h.emplace_back("M", std::to_string(config.code_dim));
  h.emplace_back("noise_p", format_real(cell.noise_p));
  h.emplace_back("repeat", std::to_string(cell.repeat));
  h.emplace_back("seed", std::to_string(cell.seed));
  if (spec.data_path.empty()) {
    const auto& s = spec.synthetic;
    h.emplace_back("data", "synthetic d=" + std::to_string(s.feature_dim) + " K=" + std::to_string(s.label_dim) +
                               " rank=" + std::to_string(s.rank) + " T=" + std::to_string(s.count) +
                               " positive_rate=" + format_real(s.positive_rate) +
                               " label_noise=" + format_real(s.label_noise) +
                               " bias=" + (s.bias_feature ? "true" : "false") +
                               " ensure_positive=" + (s.ensure_positive ? "true" : "false") +
                               " seed=" + std::to_string(s.seed));
  } else {
    h.emplace_back("data", spec.data_path);
    h.emplace_back("format", format_name(spec.format));
    if (!spec.label_list_path.empty()) h.emplace_back("labels", spec.label_list_path);
  }
  h.emplace_back("d", std::to_string(data.feature_dim));
  h.emplace_back("K", std::to_string(data.label_dim));
  h.emplace_back("T", std::to_string(stream.instances.size()));
  h.emplace_back("limit", spec.limit ? std::to_string(*spec.limit) : "none");
  h.emplace_back("normalize", spec.normalize ? "true" : "false");
  h.emplace_back("eta", eta_description(spec.eta));
  h.emplace_back("lambda", format_real(spec.lambda));
  h.emplace_back("engine", engine_name(config.engine));
  if (config.engine == RegressionEngine::kSgd) h.emplace_back("sgd_step", format_real(spec.sgd.base) + "/sqrt(t)");
  h.emplace_back("label_order", spec.random_label_order ? "random" : "native");
  if (spec.random_label_order) h.emplace_back("order_seed", std::to_string(spec.order_seed));
  return result;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  const fs::path target(path);
  const fs::path temp = target.string() + suffix.str();
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + temp.string());
  }
  fs::rename(temp, target);
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CSDPP_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const Dataset data = load_experiment_data(spec);
  const std::vector<Cell> cells = expand_grid(spec);
  std::filesystem::create_directories(spec.out_dir);

  std::vector<std::optional<CellResult>> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::string dir = spec.out_dir + "/";

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        CellResult r = run_cell(spec, data, cells[i]);
        const std::string stem = dir + r.cell.name();
        write_file_atomic(stem + ".csv", cost_trace_csv(r.trace, r.header));
        nlohmann::json cell_json;
        for (const auto& [k, v] : r.header) cell_json["config"][k] = v;
        cell_json["final_avg_cost"] = r.trace.final_average();
        if (r.regret) {
          write_file_atomic(stem + ".regret.csv", regret_csv(*r.regret, r.header, spec.regret_stride));
          cell_json["regret"] = {{"cumulative", r.regret->cumulative},
                                 {"msg_part", r.regret->msg_part},
                                 {"ridge_part", r.regret->ridge_part},
                                 {"epsilon_hat", r.regret->epsilon_hat},
                                 {"assumptions_hold", r.regret->assumptions_hold()}};
        }
        write_file_atomic(stem + ".json", cell_json.dump(2) + "\n");
        results[i] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(cells.size());
      }
    }
  };

  const int workers = std::min<int>(resolve_workers(spec.workers), static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ExperimentOutcome outcome;
  std::map<std::string, std::vector<double>> groups;
  std::vector<std::string> group_order;
  for (auto& r : results) {
    const std::string g = r->cell.group();
    if (!groups.count(g)) group_order.push_back(g);
    groups[g].push_back(r->trace.final_average());
    outcome.cells.push_back(std::move(*r));
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& g : group_order) {
    const CellResult& first = *std::find_if(outcome.cells.begin(), outcome.cells.end(),
                                            [&](const CellResult& c) { return c.cell.group() == g; });
    const MeanStdErr s = summarize(groups[g]);
    summary.push_back({{"cell", g},
                       {"algorithm", algorithm_name(first.cell.algorithm)},
                       {"cost", first.cell.cost},
                       {"m_frac", first.cell.m_fraction},
                       {"M", first.code_dim},
                       {"noise_p", first.cell.noise_p},
                       {"repeats", s.n},
                       {"final_avg_cost_mean", s.mean},
                       {"final_avg_cost_stderr", s.stderr_},
                       {"final_avg_cost", groups[g]}});
  }
  outcome.summary = {{"seed_base", spec.seed_base}, {"cells", summary}};
  write_file_atomic(dir + "summary.json", outcome.summary.dump(2) + "\n");
  return outcome;
}

}  // namespace csdpp
