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


#include <benchmark/benchmark.h>

#include "rabiest/adaptive.hpp"
#include "rabiest/closed_form.hpp"
#include "rabiest/qfim.hpp"

namespace {

using namespace rabiest;

const RabiParameters kOmega(0.3, 0.7);
constexpr double kTime = 5.0;

void BM_ClosedFormTraceInverse(benchmark::State& state) {
  RngStream rng(1);
  const ProbeCoefficients c = random_probe(rng);
  for (auto _ : state) benchmark::DoNotOptimize(trace_inverse_closed_form(kOmega, kTime, c));
}
BENCHMARK(BM_ClosedFormTraceInverse);

void BM_QfimAnalytic(benchmark::State& state) {
  const QuantumState psi = optimal_probe_state(kOmega, kTime);
  for (auto _ : state) benchmark::DoNotOptimize(qfim_pure(state_derivatives_analytic(kOmega, kTime, psi)));
}
BENCHMARK(BM_QfimAnalytic);

void BM_QfimSpectral(benchmark::State& state) {
  const RabiModel model = RabiModel::three_level();
  const QuantumState psi = optimal_probe_state(kOmega, kTime);
  for (auto _ : state) benchmark::DoNotOptimize(qfim_pure(state_derivatives_spectral(model, kOmega, kTime, psi)));
}
BENCHMARK(BM_QfimSpectral);

void BM_QfimFiniteDifference(benchmark::State& state) {
  const RabiModel model = RabiModel::three_level();
  const QuantumState psi = optimal_probe_state(kOmega, kTime);
  for (auto _ : state) benchmark::DoNotOptimize(qfim_pure(state_derivatives_fd(model, kOmega, kTime, psi)));
}
BENCHMARK(BM_QfimFiniteDifference);

void BM_MultilevelQfim(benchmark::State& state) {
  const auto l = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(multilevel_controlled_qfim(l, kTime));
}
BENCHMARK(BM_MultilevelQfim)->DenseRange(2, 8, 3);

void BM_ControlledEvolution(benchmark::State& state) {
  const std::vector<double> truth{0.3, 0.7};
  const std::vector<double> hat{0.25, 0.65};
  for (auto _ : state) benchmark::DoNotOptimize(controlled_evolution(truth, hat, kTime, state.range(0)));
}
BENCHMARK(BM_ControlledEvolution)->RangeMultiplier(10)->Range(10, 100000);

std::vector<RoundRecord> synthetic_rounds(std::int64_t n) {
  RngStream rng(2);
  const std::vector<double> truth{0.3, 0.7};
  std::vector<RoundRecord> recs;
  for (std::int64_t r = 0; r < n; ++r) {
    const std::vector<double> hat{0.05 * static_cast<double>(r), 0.5};
    recs.push_back(run_round(RabiModel::three_level(), truth, hat, kTime, 1000, 30, rng));
  }
  return recs;
}

void BM_LogLikelihood(benchmark::State& state) {
  const std::vector<RoundRecord> recs = synthetic_rounds(state.range(0));
  const std::vector<double> cand{0.31, 0.69};
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(cand, recs, kTime, 1000));
}
BENCHMARK(BM_LogLikelihood)->Arg(1)->Arg(15);

void BM_MleUpdate(benchmark::State& state) {
  const std::vector<RoundRecord> recs = synthetic_rounds(state.range(0));
  const AdaptiveConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(mle_update(recs, cfg));
}
BENCHMARK(BM_MleUpdate)->Arg(1)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
