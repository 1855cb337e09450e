// Copyright 2026 ptoadj contributors
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
#include <string>
#include <vector>

namespace ptoadj {

/// One self-check outcome: a measured value against its expectation at a
/// stated tolerance. The same suites back `verify` and the acceptance run.
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  // on |measured - expected| / max(1, |expected|)
  bool pass = false;
};

/// Derivative-ratio constants: exact values per family plus a
/// finite-difference verification of theta*R'''/R'' on a 12-point grid.
std::vector<CheckResult> constant_checks();

/// Synthetic-estimator reproduction of the closed-form n^2 reward gaps
/// (oracle and plug-in) for linear demand with a=1, theta=1, sigma=1.
std::vector<CheckResult> gap_checks(int n = 200, long draws = 1000000,
                                    std::uint64_t seed = 20260810);

/// Two-parameter consistency: the general quadratic-system solve, fed the
/// analytic Hessian and a differenced third-derivative tensor, must agree
/// with the closed-form pinned solution on random (theta, Sigma) triples.
std::vector<CheckResult> multi_checks(int trials = 20, std::uint64_t seed = 20260810);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace ptoadj
