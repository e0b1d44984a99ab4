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

#include <string>

#include "json.hpp"

#include "csdpp/linalg.hpp"
#include "csdpp/online_pca.hpp"
#include "csdpp/regressor.hpp"
#include "csdpp/rng.hpp"

namespace csdpp {

inline constexpr int kCheckpointVersion = 1;

// Matrices are stored as {"rows", "cols", "data"} with data in row-major
// order. Doubles round-trip exactly through the JSON text.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

nlohmann::json msg_to_json(const CappedMsg<double>& state);
CappedMsg<double> msg_from_json(const nlohmann::json& j);

nlohmann::json ridge_to_json(const RidgeCommonState<double>& state);
RidgeCommonState<double> ridge_from_json(const nlohmann::json& j);

nlohmann::json rng_to_json(const Rng& rng);
void rng_from_json(const nlohmann::json& j, Rng& rng);

/// Standalone online-PCA checkpoint record (Q, sigma, t).
std::string save_msg_checkpoint(const CappedMsg<double>& state);
CappedMsg<double> load_msg_checkpoint(const std::string& text);

}  // namespace csdpp
