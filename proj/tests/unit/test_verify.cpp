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


#include <chrono>
#include <set>

#include "doctest.h"
#include "rabiest/closed_form.hpp"
#include "rabiest/verify.hpp"

using namespace rabiest;

namespace {

RealMatrix flipped_cross_term(const RabiParameters& w, double t, const ProbeCoefficients& c) {
  const ClosedFormCoefficients k = abc_coefficients(pmn_coefficients(c, w.omega_plus(), t), c, t);
  const ParameterJacobian j = parameter_jacobian(w[0], w[1]);
  RealMatrix m(2, 2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      m(a, b) = j.d_theta[a] * j.d_theta[b] * k.a + j.d_omega_plus[a] * j.d_omega_plus[b] * k.b -
                (j.d_theta[a] * j.d_omega_plus[b] + j.d_theta[b] * j.d_omega_plus[a]) * k.c;
    }
  }
  return m;
}

VerifyOptions quick(std::uint64_t seed = VerifyOptions{}.seed) {
  VerifyOptions o;
  o.quick = true;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("quick verification passes every suite") {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<SuiteResult> results = run_verification(quick());
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
  std::set<std::string> names;
  for (const SuiteResult& r : results) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.passed);
    CHECK(r.max_error <= r.threshold);
    CHECK(r.detail.find("FAILED") == std::string::npos);
    names.insert(r.name);
  }
  CHECK(names == std::set<std::string>{"closed_form_vs_fd", "random_probe_optimality", "equality_conditions",
                                       "singular_times", "saturation", "trotter_convergence", "multilevel",
                                       "properties"});
}

TEST_CASE("full verification passes") {
  for (const SuiteResult& r : run_verification(VerifyOptions{})) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("verification is reproducible for a seed") {
  const VerifyOptions o = quick(99);
  CHECK(verify_closed_form_vs_fd(o).max_error == verify_closed_form_vs_fd(o).max_error);
  CHECK(verify_random_probe_optimality(o).detail == verify_random_probe_optimality(o).detail);
}

TEST_CASE("a sign error in the cross term is caught") {
  VerifyOptions o = quick();
  o.assembler = flipped_cross_term;
  const SuiteResult r = verify_closed_form_vs_fd(o);
  CHECK_FALSE(r.passed);
  CHECK(r.detail.find("FAILED closed_vs_fd") != std::string::npos);
  CHECK(r.max_error > r.threshold);
}

TEST_CASE("the reference assembler is the default") {
  VerifyOptions o = quick();
  o.assembler = qfim_closed_form;
  CHECK(verify_closed_form_vs_fd(o).max_error == verify_closed_form_vs_fd(quick()).max_error);
}
