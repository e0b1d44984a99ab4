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
#include <string_view>
#include <vector>

#include "csdpp/linalg.hpp"

namespace csdpp {

/// One (x, y) pair; labels are exactly -1 or +1.
struct Instance {
  Vector features;
  Vector labels;

  bool operator==(const Instance&) const = default;
};

struct Dataset {
  std::vector<Instance> instances;
  int feature_dim = 0;
  int label_dim = 0;
};

enum class DatasetFormat { kSparseLabels, kArff };

struct StreamConfig {
  std::uint64_t seed = 0;
  double noise_p = 0.0;
  std::optional<std::size_t> limit;
  bool normalize_features = false;
};

/// Sparse-labels text format:
///
///   # comment
///   K d N
///   3,7 | 1:0.5 4:-1.2
///
/// Indices are 0-based; the label field may be empty.
Dataset parse_sparse_labels(std::string_view text);

/// ARFF subset: numeric attributes, label attributes named in `label_names`
/// (values 0/1), dense or sparse `{idx val, ...}` data rows.
Dataset parse_arff(std::string_view text, const std::vector<std::string>& label_names);

Dataset parse_dataset(std::string_view text, DatasetFormat format,
                      const std::vector<std::string>& label_names = {});

/// Reads a file and dispatches on format. For ARFF, `label_list_path` names
/// the companion file with one label attribute per line.
Dataset load_dataset(const std::string& path, DatasetFormat format,
                     const std::string& label_list_path = {});

std::string serialize_sparse_labels(const Dataset& data);

std::vector<Instance> permute_stream(const std::vector<Instance>& instances, std::uint64_t seed);

/// Flips each +1 label to -1 independently with probability p.
std::vector<Instance> inject_noise(const std::vector<Instance>& instances, double p, std::uint64_t seed);

/// Per-feature min-max scaling to [0, 1], then division by sqrt(d), so that
/// every ||x||_2 <= 1.
void normalize_features(Dataset& data);

/// Full preprocessing chain: permute, truncate to `limit`, inject noise,
/// optionally normalize.
Dataset prepare_stream(const Dataset& data, const StreamConfig& config);

/// Synthetic stream with low-rank label structure: x Gaussian inside the unit
/// ball, latent s = G^T x (rank r), y[k] = sign(v_k . s - threshold_k + noise).
/// Thresholds are set so each label is positive with `positive_rate`.
struct PlantedStreamConfig {
  int feature_dim = 20;
  int label_dim = 10;
  int rank = 3;
  std::size_t count = 5000;
  double positive_rate = 0.5;
  double label_noise = 0.0;  // stddev of the additive latent noise
  // Last feature fixed at 0.5 so a linear model without offset can express
  // the label thresholds.
  bool bias_feature = true;
  // Give every instance at least one positive label (its highest-scoring
  // one), as in most multi-label benchmarks. The thresholds are then
  // calibrated so the overall positive rate stays at `positive_rate`,
  // which needs positive_rate >= 1/K.
  bool ensure_positive = false;
  std::uint64_t seed = 0;
};

Dataset make_planted_stream(const PlantedStreamConfig& config);

}  // namespace csdpp
