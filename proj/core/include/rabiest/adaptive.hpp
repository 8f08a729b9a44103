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
 * Control-enhanced sequential estimation.
 *
 * The evolution time t is split into N segments of dt = t/N; after each
 * segment the control U^dagger(W_hat, dt) built from the current estimate is
 * applied, so the net evolution approaches exp(-i H(W - W_hat) t). Each round
 * prepares the hub level, measures in the computational basis k times, and
 * the estimate is refit by maximum likelihood over every round collected so
 * far, each round scored under the control it actually used.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rabiest/qcore.hpp"
#include "rabiest/qfim.hpp"
#include "rabiest/rabi_models.hpp"
#include "rabiest/rng.hpp"

namespace rabiest {

struct SearchInterval {
  double lo = -2.0;
  double hi = 2.0;
};

struct AdaptiveConfig {
  RabiModel model = RabiModel::three_level();
  std::vector<double> omega_true{0.3, 0.7};
  double t = 5.0;
  std::int64_t segments = 1000;
  std::int64_t shots_per_round = 30;
  std::int64_t rounds = 15;
  std::vector<double> initial_guess{0.0, 0.0};
  /// One interval per parameter; empty means [-2, 2] for every parameter.
  std::vector<SearchInterval> search_box;
  std::int64_t grid_points = 81;
  std::uint64_t seed = 1;

  /// Throws ValidationError on inconsistent sizes or out-of-range values.
  void validate() const;
  [[nodiscard]] std::vector<SearchInterval> box() const;
};

struct RoundRecord {
  std::vector<double> control_estimate;
  std::vector<std::int64_t> counts;
  std::string povm_id = "computational";
};

struct AdaptiveTrace {
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
  /// estimates[n - 1] is the cumulative MLE after n rounds.
  std::vector<std::vector<double>> estimates;
  /// Per-trajectory proxy for (m Tr Cov)^-1 after n rounds, m = k n: the
  /// expected Fisher information of the collected rounds at the current
  /// estimate, 1 / (m Tr F^-1).
  std::vector<double> normalized_inverse_variance;
};

/// (exp(i H(W_hat) dt) exp(-i H(W) dt))^N with dt = t / N, by repeated squaring.
ComplexMatrix controlled_evolution(const RabiModel& model, std::span<const double> omega_true,
                                   std::span<const double> omega_hat, double t, std::int64_t n_segments);
ComplexMatrix controlled_evolution(std::span<const double> omega_true, std::span<const double> omega_hat,
                                   double t, std::int64_t n_segments);

/// One round: hub level through the controlled evolution, k computational-basis shots.
RoundRecord run_round(const RabiModel& model, std::span<const double> omega_true,
                      std::span<const double> omega_hat, double t, std::int64_t n_segments, std::int64_t k,
                      RngStream& rng);

inline constexpr double kLikelihoodFloor = 1e-12;

/// Sum over rounds and outcomes of counts * ln p(candidate), each round under
/// its own control; probabilities are clamped below at kLikelihoodFloor.
double log_likelihood(const RabiModel& model, std::span<const double> candidate,
                      std::span<const RoundRecord> records, double t, std::int64_t n_segments);
double log_likelihood(std::span<const double> candidate, std::span<const RoundRecord> records, double t,
                      std::int64_t n_segments);

/// Cumulative maximum-likelihood estimate inside the search box: a full tensor
/// grid of grid_points per axis, then compass refinement (step halved down to
/// 1e-6) from the best grid points and from the latest control. Ties within
/// 1e-12 relative go to the lexicographically smallest candidate.
std::vector<double> mle_update(std::span<const RoundRecord> records, const AdaptiveConfig& config);

AdaptiveTrace adaptive_run(const AdaptiveConfig& config);

/// One trajectory per seed config.seed, config.seed + 1, ...; trajectories are
/// spread over `workers` threads and returned in seed order.
std::vector<AdaptiveTrace> adaptive_ensemble(const AdaptiveConfig& config, std::int64_t seed_count,
                                             unsigned workers = 1);

/// (m sum_i Var(W_i))^-1 at each step from the sample variance across
/// trajectories, m = k n. Needs at least two trajectories.
std::vector<double> ensemble_normalized_inverse_variance(std::span<const AdaptiveTrace> traces,
                                                         std::int64_t shots_per_round);

/// QFIM of the l-leaf star at zero residual error with the hub as probe,
/// computed through the spectral derivative route.
QfimResult multilevel_controlled_qfim(std::int64_t l, double t);

/// (offset, 1 / controlled_bound(m, t, offset)) for every offset.
std::vector<std::pair<double, double>> robustness_curve(std::span<const double> offsets, double t,
                                                        std::int64_t m);

}  // namespace rabiest
