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

namespace csdpp {

// Every numerical threshold used by the library and its tests.
struct Tolerances {
  static constexpr double kSymmetry = 1e-10;
  static constexpr double kJacobiOffDiagonal = 1e-12;
  static constexpr int kJacobiMaxSweeps = 100;
  static constexpr double kOrthonormality = 1e-9;
  static constexpr double kTrace = 1e-9;
  static constexpr double kUnitNorm = 1e-9;
  static constexpr double kProbabilitySum = 1e-9;
  // Relative residual norm below which Gram-Schmidt is repeated.
  static constexpr double kReorthogonalize = 1e-8;
  // Relative residual norm below which a label vector counts as in-span.
  static constexpr double kInSpan = 1e-12;
  static constexpr double kConditionSlack = 1e-12;
  static constexpr double kBoundSlack = 1e-9;
  static constexpr double kAInverseSymmetry = 1e-8;
  // Sherman-Morrison inverse is rebuilt from the accumulated Gram matrix
  // after this many rank-one updates.
  static constexpr long kInverseRefreshPeriod = 10000;
  // Ridge anchor for the offline least-squares reference.
  static constexpr double kOfflineRidge = 1e-9;
  // d*K above which the exact ridge engine is not recommended.
  static constexpr double kSgdSuggestEntries = 1e6;
};

}  // namespace csdpp
