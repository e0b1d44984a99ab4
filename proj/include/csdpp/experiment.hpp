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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "csdpp/eval.hpp"
#include "csdpp/learners.hpp"
#include "csdpp/stream.hpp"

namespace csdpp {

/// A grid of runs over algorithms x costs x M fractions x noise levels x
/// repeats. Repeat r uses seed `seed_base + r` for the stream permutation,
/// noise and learner randomness.
struct ExperimentSpec {
  // Data source: a file, or the planted generator when `data_path` is empty.
  std::string data_path;
  DatasetFormat format = DatasetFormat::kSparseLabels;
  std::string label_list_path;
  PlantedStreamConfig synthetic;

  std::vector<Algorithm> algorithms{Algorithm::kDppPbc};
  std::vector<std::string> costs{"hamming"};
  std::vector<double> m_fractions{0.25};
  std::vector<double> noise_ps{0.0};
  int repeats = 1;
  std::uint64_t seed_base = 0;
  std::string out_dir = "results";

  LearningRateSchedule eta;
  double lambda = 1.0;
  std::optional<RegressionEngine> engine;  // empty: suggest_engine()
  SgdSchedule sgd;
  bool random_label_order = false;
  std::uint64_t order_seed = 0;
  std::optional<std::size_t> limit;
  bool normalize = false;
  bool allow_condition_violation = false;

  // Regret CSVs for dpp-pbc cells.
  bool regret = false;
  std::size_t regret_stride = 1;

  int workers = 0;  // 0: CSDPP_WORKERS, else hardware concurrency

  /// Throws ConfigError on an empty grid axis, repeats < 1, an M fraction
  /// outside (0, 1], a noise level outside [0, 1] or an unknown cost.
  void validate() const;
};

/// Applies the fields present in a JSON object onto `spec`. Unknown keys are
/// rejected with ConfigError.
void apply_json(ExperimentSpec& spec, const nlohmann::json& config);

struct Cell {
  Algorithm algorithm;
  std::string cost;
  double m_fraction;
  double noise_p;
  int repeat;
  std::uint64_t seed;

  /// File stem: algo_cost_m<frac>_p<noise>_r<repeat>.
  std::string name() const;
  /// Same without the repeat suffix, used to group repeats.
  std::string group() const;
};

std::vector<Cell> expand_grid(const ExperimentSpec& spec);

struct CellResult {
  Cell cell;
  int code_dim = 0;
  CostTrace trace;
  std::optional<RegretReport> regret;
  HeaderFields header;
};

/// Feeds a stream through a learner and records its cost trace.
CostTrace run_stream(Learner& learner, const std::vector<Instance>& stream);

/// Runs one cell on an already loaded dataset (no files written).
CellResult run_cell(const ExperimentSpec& spec, const Dataset& data, const Cell& cell);

/// Loads `spec.data_path`, or generates the planted stream when it is empty.
Dataset load_experiment_data(const ExperimentSpec& spec);

struct ExperimentOutcome {
  std::vector<CellResult> cells;
  nlohmann::json summary;
};

/// Runs every cell in a worker pool and writes `<name>.csv`, `<name>.json`,
/// optional `<name>.regret.csv`, and `summary.json` into spec.out_dir.
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// Worker count: explicit value if positive, else CSDPP_WORKERS, else the
/// hardware concurrency (at least 1).
int resolve_workers(int requested);

}  // namespace csdpp
