// Copyright 2026 The rabiest Authors
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


/**
 * @file
 * Self-verification suites run by `rabiest verify` and the acceptance harness.
 * Each suite compares a closed form against an independent numeric route and
 * reports the worst deviation it saw against its threshold.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rabiest/qcore.hpp"
#include "rabiest/rabi_models.hpp"

namespace rabiest {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Assembles the two-parameter QFIM from (W, t, probe); defaults to qfim_closed_form.
using QfimAssembler = std::function<RealMatrix(const RabiParameters&, double, const ProbeCoefficients&)>;

struct VerifyOptions {
  bool quick = false;
  std::uint64_t seed = 20260101;
  QfimAssembler assembler;
};

SuiteResult verify_closed_form_vs_fd(const VerifyOptions& opts);
SuiteResult verify_random_probe_optimality(const VerifyOptions& opts);
SuiteResult verify_equality_conditions(const VerifyOptions& opts);
SuiteResult verify_singular_times(const VerifyOptions& opts);
SuiteResult verify_saturation(const VerifyOptions& opts);
SuiteResult verify_trotter_convergence(const VerifyOptions& opts);
SuiteResult verify_multilevel(const VerifyOptions& opts);
SuiteResult verify_properties(const VerifyOptions& opts);

/// Every suite above, in declaration order.
std::vector<SuiteResult> run_verification(const VerifyOptions& opts);

}  // namespace rabiest
