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

#include "csdpp/checkpoint.hpp"

#include "csdpp/errors.hpp"

namespace csdpp {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw SchemaError("checkpoint: matrix entry count does not match its shape");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<std::size_t>(i * cols + c)];
  return m;
}

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()));
}

json msg_to_json(const CappedMsg<double>& state) {
  const auto& s = state.schedule();
  return {{"q", matrix_to_json(state.q())},
          {"sigma", vector_to_json(state.sigma())},
          {"target_dim", state.target_dim()},
          {"t", state.steps()},
          {"schedule",
           {{"kind", s.kind == LearningRateSchedule::Kind::kConstant ? "constant" : "decaying"},
            {"base", s.base}}}};
}

CappedMsg<double> msg_from_json(const json& j) {
  LearningRateSchedule schedule;
  const auto& s = j.at("schedule");
  schedule.kind = s.at("kind").get<std::string>() == "constant" ? LearningRateSchedule::Kind::kConstant
                                                               : LearningRateSchedule::Kind::kDecaying;
  schedule.base = s.at("base").get<double>();
  return CappedMsg<double>::from_factors(matrix_from_json(j.at("q")), vector_from_json(j.at("sigma")),
                                         j.at("target_dim").get<int>(), j.at("t").get<std::int64_t>(),
                                         schedule);
}

json ridge_to_json(const RidgeCommonState<double>& state) {
  return {{"a_inv", matrix_to_json(state.a_inv)},
          {"gram", matrix_to_json(state.gram)},
          {"lambda", state.lambda},
          {"updates", state.updates}};
}

RidgeCommonState<double> ridge_from_json(const json& j) {
  RidgeCommonState<double> s;
  s.a_inv = matrix_from_json(j.at("a_inv"));
  s.gram = matrix_from_json(j.at("gram"));
  s.lambda = j.at("lambda").get<double>();
  s.updates = j.at("updates").get<std::int64_t>();
  return s;
}

json rng_to_json(const Rng& rng) {
  const auto st = rng.state();
  return std::vector<std::uint64_t>(st.begin(), st.end());
}

void rng_from_json(const json& j, Rng& rng) {
  const auto v = j.get<std::vector<std::uint64_t>>();
  if (v.size() != 4) throw SchemaError("checkpoint: rng state needs 4 words");
  rng.set_state({v[0], v[1], v[2], v[3]});
}

std::string save_msg_checkpoint(const CappedMsg<double>& state) {
  json j = msg_to_json(state);
  j["format"] = "csdpp-msg";
  j["version"] = kCheckpointVersion;
  return j.dump();
}

CappedMsg<double> load_msg_checkpoint(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("format", "") != "csdpp-msg") throw SchemaError("checkpoint: not an online-PCA record");
  if (j.value("version", 0) != kCheckpointVersion) throw SchemaError("checkpoint: unsupported version");
  return msg_from_json(j);
}

}  // namespace csdpp
