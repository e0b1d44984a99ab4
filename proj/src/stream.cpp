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

#include "csdpp/stream.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "csdpp/rng.hpp"

namespace csdpp {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

long parse_index(std::string_view s, std::size_t line) {
  s = trim(s);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw ParseError(line, "invalid index '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s, std::size_t line) {
  s = trim(s);
  // from_chars for double is not available on every toolchain we target.
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v))
    throw ParseError(line, "invalid number '" + buf + "'");
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

Dataset parse_sparse_labels(std::string_view text) {
  Dataset data;
  bool have_header = false;
  std::size_t expected = 0;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (!have_header) {
      const auto fields = split_ws(line);
      if (fields.size() != 3) throw ParseError(line_no, "header must be 'K d N'");
      data.label_dim = static_cast<int>(parse_index(fields[0], line_no));
      data.feature_dim = static_cast<int>(parse_index(fields[1], line_no));
      expected = static_cast<std::size_t>(parse_index(fields[2], line_no));
      if (data.label_dim < 1 || data.feature_dim < 1) throw SchemaError("K and d must be positive");
      have_header = true;
      continue;
    }

    const auto bar = line.find('|');
    if (bar == std::string_view::npos) throw ParseError(line_no, "missing '|' separator");
    Instance inst;
    inst.labels = Vector::Constant(data.label_dim, -1.0);
    inst.features = Vector::Zero(data.feature_dim);

    const std::string_view label_part = trim(line.substr(0, bar));
    if (!label_part.empty()) {
      for (std::string_view tok : split(label_part, ',')) {
        const long k = parse_index(tok, line_no);
        if (k >= data.label_dim)
          throw SchemaError("line " + std::to_string(line_no) + ": label index " + std::to_string(k) +
                            " >= K=" + std::to_string(data.label_dim));
        inst.labels(k) = 1.0;
      }
    }
    for (std::string_view tok : split_ws(line.substr(bar + 1))) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "feature must be 'index:value'");
      const long j = parse_index(tok.substr(0, colon), line_no);
      if (j >= data.feature_dim)
        throw SchemaError("line " + std::to_string(line_no) + ": feature index " + std::to_string(j) +
                          " >= d=" + std::to_string(data.feature_dim));
      inst.features(j) = parse_real(tok.substr(colon + 1), line_no);
    }
    data.instances.push_back(std::move(inst));
  }
  if (!have_header) throw ParseError(line_no, "missing 'K d N' header");
  if (data.instances.size() != expected)
    throw SchemaError("header declares " + std::to_string(expected) + " instances, found " +
                      std::to_string(data.instances.size()));
  return data;
}

Dataset parse_arff(std::string_view text, const std::vector<std::string>& label_names) {
  std::map<std::string, int> label_slot;
  for (std::size_t i = 0; i < label_names.size(); ++i) label_slot[label_names[i]] = static_cast<int>(i);

  // Attribute position -> (is_label, slot).
  std::vector<std::pair<bool, int>> columns;
  Dataset data;
  data.label_dim = static_cast<int>(label_names.size());
  std::vector<bool> seen_label(label_names.size(), false);
  bool in_data = false;
  std::size_t line_no = 0;

  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '%') continue;

    if (!in_data) {
      const std::string head = lower(line.substr(0, std::min<std::size_t>(line.size(), 10)));
      if (head.rfind("@relation", 0) == 0) continue;
      if (head.rfind("@data", 0) == 0) {
        for (std::size_t i = 0; i < seen_label.size(); ++i)
          if (!seen_label[i]) throw SchemaError("label attribute '" + label_names[i] + "' not declared");
        if (data.label_dim < 1) throw SchemaError("no label attributes");
        in_data = true;
        continue;
      }
      if (head.rfind("@attribute", 0) != 0) throw ParseError(line_no, "unexpected header line");
      std::string_view rest = trim(line.substr(10));
      std::string name;
      if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
        const char q = rest.front();
        const auto close = rest.find(q, 1);
        if (close == std::string_view::npos) throw ParseError(line_no, "unterminated attribute name");
        name = std::string(rest.substr(1, close - 1));
        rest = trim(rest.substr(close + 1));
      } else {
        const auto fields = split_ws(rest);
        if (fields.size() < 2) throw ParseError(line_no, "attribute needs a name and a type");
        name = std::string(fields[0]);
        rest = trim(rest.substr(fields[0].size()));
      }
      const std::string type = lower(rest);
      if (auto it = label_slot.find(name); it != label_slot.end()) {
        if (type.find('{') == std::string::npos && type != "numeric" && type != "integer")
          throw SchemaError("label attribute '" + name + "' must be {0,1}");
        columns.emplace_back(true, it->second);
        seen_label[static_cast<std::size_t>(it->second)] = true;
      } else {
        if (type != "numeric" && type != "real" && type != "integer")
          throw SchemaError("line " + std::to_string(line_no) + ": only numeric features are supported");
        columns.emplace_back(false, data.feature_dim++);
      }
      continue;
    }

    Instance inst;
    inst.labels = Vector::Constant(data.label_dim, -1.0);
    inst.features = Vector::Zero(data.feature_dim);
    auto assign = [&](std::size_t col, std::string_view value) {
      if (col >= columns.size())
        throw SchemaError("line " + std::to_string(line_no) + ": attribute index out of range");
      const auto [is_label, slot] = columns[col];
      const double v = parse_real(value, line_no);
      if (is_label) {
        if (v != 0.0 && v != 1.0) throw ParseError(line_no, "label value must be 0 or 1");
        inst.labels(slot) = v == 1.0 ? 1.0 : -1.0;
      } else {
        inst.features(slot) = v;
      }
    };
    if (line.front() == '{') {
      if (line.back() != '}') throw ParseError(line_no, "unterminated sparse row");
      const std::string_view body = trim(line.substr(1, line.size() - 2));
      if (!body.empty()) {
        for (std::string_view entry : split(body, ',')) {
          const auto fields = split_ws(entry);
          if (fields.size() != 2) throw ParseError(line_no, "sparse entry must be 'index value'");
          assign(static_cast<std::size_t>(parse_index(fields[0], line_no)), fields[1]);
        }
      }
    } else {
      const auto values = split(line, ',');
      if (values.size() != columns.size())
        throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns.size()) +
                          " values, found " + std::to_string(values.size()));
      for (std::size_t c = 0; c < values.size(); ++c) assign(c, values[c]);
    }
    data.instances.push_back(std::move(inst));
  }
  if (!in_data) throw ParseError(line_no, "missing @data section");
  return data;
}

Dataset parse_dataset(std::string_view text, DatasetFormat format, const std::vector<std::string>& label_names) {
  return format == DatasetFormat::kArff ? parse_arff(text, label_names) : parse_sparse_labels(text);
}

Dataset load_dataset(const std::string& path, DatasetFormat format, const std::string& label_list_path) {
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + p + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string text = slurp(path);
  std::vector<std::string> names;
  if (format == DatasetFormat::kArff) {
    if (label_list_path.empty()) throw ConfigError("ARFF input needs a label-list file");
    const std::string label_text = slurp(label_list_path);
    for (std::string_view l : split(label_text, '\n')) {
      l = trim(l);
      if (!l.empty()) names.emplace_back(l);
    }
  }
  return parse_dataset(text, format, names);
}

std::string serialize_sparse_labels(const Dataset& data) {
  std::string out = std::to_string(data.label_dim) + " " + std::to_string(data.feature_dim) + " " +
                    std::to_string(data.instances.size()) + "\n";
  char buf[64];
  for (const Instance& inst : data.instances) {
    bool first = true;
    for (Eigen::Index k = 0; k < inst.labels.size(); ++k) {
      if (inst.labels(k) > 0) {
        if (!first) out += ',';
        out += std::to_string(k);
        first = false;
      }
    }
    out += " |";
    for (Eigen::Index j = 0; j < inst.features.size(); ++j) {
      if (inst.features(j) != 0.0) {
        std::snprintf(buf, sizeof buf, " %ld:%.17g", static_cast<long>(j), inst.features(j));
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<Instance> permute_stream(const std::vector<Instance>& instances, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, StreamPurpose::kPermutation);
  const auto order = rng.permutation(instances.size());
  std::vector<Instance> out;
  out.reserve(instances.size());
  for (std::size_t i : order) out.push_back(instances[i]);
  return out;
}

std::vector<Instance> inject_noise(const std::vector<Instance>& instances, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("inject_noise: p must lie in [0, 1]");
  Rng rng = Rng::substream(seed, StreamPurpose::kNoise);
  std::vector<Instance> out = instances;
  for (Instance& inst : out) {
    for (Eigen::Index k = 0; k < inst.labels.size(); ++k) {
      // Draw for every positive so the flip pattern of label k does not
      // depend on p through the RNG position.
      if (inst.labels(k) > 0 && rng.uniform() < p) inst.labels(k) = -1.0;
    }
  }
  return out;
}

void normalize_features(Dataset& data) {
  if (data.instances.empty()) return;
  const Eigen::Index d = data.feature_dim;
  Vector lo = Vector::Constant(d, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (const Instance& inst : data.instances) {
    lo = lo.cwiseMin(inst.features);
    hi = hi.cwiseMax(inst.features);
  }
  const double shrink = 1.0 / std::sqrt(static_cast<double>(d));
  for (Instance& inst : data.instances) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double span = hi(j) - lo(j);
      inst.features(j) = span > 0 ? (inst.features(j) - lo(j)) / span : 0.0;
    }
    inst.features *= shrink;
  }
}

Dataset prepare_stream(const Dataset& data, const StreamConfig& config) {
  Dataset out;
  out.feature_dim = data.feature_dim;
  out.label_dim = data.label_dim;
  out.instances = permute_stream(data.instances, config.seed);
  if (config.limit && out.instances.size() > *config.limit) out.instances.resize(*config.limit);
  if (config.noise_p > 0.0) out.instances = inject_noise(out.instances, config.noise_p, config.seed);
  if (config.normalize_features) normalize_features(out);
  return out;
}

Dataset make_planted_stream(const PlantedStreamConfig& config) {
  if (config.rank < 1 || config.feature_dim < 1 || config.label_dim < 1)
    throw ConfigError("planted stream: dimensions must be positive");
  if (config.bias_feature && config.feature_dim < 2)
    throw ConfigError("planted stream: a bias feature needs d >= 2");
  if (!(config.positive_rate > 0.0 && config.positive_rate < 1.0))
    throw ConfigError("planted stream: positive rate must lie in (0, 1)");
  Rng rng = Rng::substream(config.seed, StreamPurpose::kSynthetic);
  const int d = config.feature_dim, k = config.label_dim, r = config.rank;

  Matrix g(d, r), v(k, r);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) = rng.normal();

  // With a bias feature the last coordinate is the constant kBias and the
  // random part lives in the first d-1 coordinates. The random part is
  // z / (2 sqrt(n)) with z ~ N(0, I_n), clipped to the radius that keeps
  // ||x|| <= 1, so v_k . s is roughly N(0, ||G v_k||^2 / (4n)).
  constexpr double kBias = 0.5;
  const int n_random = config.bias_feature ? d - 1 : d;
  const double radius = config.bias_feature ? std::sqrt(1.0 - kBias * kBias) : 1.0;
  const double xscale = 1.0 / (2.0 * std::sqrt(static_cast<double>(n_random)));
  if (config.bias_feature) g.row(d - 1).setZero();
  const Matrix gv = g * v.transpose();  // d x K
  // Inverse normal CDF at 1 - rate via bisection on erfc.
  auto upper_quantile = [](double rate) {
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (0.5 * std::erfc(mid / std::sqrt(2.0)) > rate)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  Vector score_sd(k);
  for (int c = 0; c < k; ++c)
    score_sd(c) = std::sqrt(gv.col(c).squaredNorm() * xscale * xscale + config.label_noise * config.label_noise);

  Dataset data;
  data.feature_dim = d;
  data.label_dim = k;
  data.instances.reserve(config.count);
  // Scores before thresholding; labels are assigned once the thresholds are
  // known.
  Matrix scores(k, static_cast<Eigen::Index>(config.count));
  for (std::size_t n = 0; n < config.count; ++n) {
    Instance inst;
    inst.features.resize(d);
    for (int j = 0; j < n_random; ++j) inst.features(j) = rng.normal() * xscale;
    const double norm = inst.features.head(n_random).norm();
    if (norm > radius) inst.features.head(n_random) *= radius / norm;
    if (config.bias_feature) inst.features(d - 1) = kBias;
    Vector score = gv.transpose() * inst.features;
    if (config.label_noise > 0)
      for (int c = 0; c < k; ++c) score(c) += config.label_noise * rng.normal();
    scores.col(static_cast<Eigen::Index>(n)) = score;
    data.instances.push_back(std::move(inst));
  }

  auto assign = [&](double per_label_rate) {
    const Vector threshold = score_sd * upper_quantile(per_label_rate);
    double positives = 0.0;
    for (std::size_t n = 0; n < config.count; ++n) {
      const Vector score = scores.col(static_cast<Eigen::Index>(n)) - threshold;
      Vector& labels = data.instances[n].labels;
      labels = sign_of(score);
      if (config.ensure_positive && labels.maxCoeff() < 0) {
        Eigen::Index best = 0;
        score.maxCoeff(&best);
        labels(best) = 1.0;
      }
      positives += static_cast<double>((labels.array() > 0).count());
    }
    return config.count == 0 ? 0.0 : positives / (static_cast<double>(config.count) * k);
  };

  if (!config.ensure_positive) {
    assign(config.positive_rate);
    return data;
  }
  // The forced positives raise the overall rate; bisect the per-label rate
  // so the realized rate matches the requested one where possible.
  double lo = 0.0, hi = config.positive_rate;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (assign(mid) > config.positive_rate)
      hi = mid;
    else
      lo = mid;
  }
  assign(lo > 0.0 ? lo : hi);
  return data;
}

}  // namespace csdpp
