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

#include "rabiest/adaptive.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "rabiest/closed_form.hpp"
#include "rabiest/errors.hpp"

namespace rabiest {

namespace {

using Matrix3 = Eigen::Matrix3cd;

template <class Mat>
Mat matrix_power(Mat w, std::int64_t n) {
  Mat result = Mat::Identity(w.rows(), w.cols());
  while (n > 0) {
    if (n & 1) result = (result * w).eval();
    n >>= 1;
    if (n > 0) w = (w * w).eval();
  }
  return result;
}

void require_segments(double t, std::int64_t n_segments) {
  if (n_segments < 1) throw ValidationError("number of control segments must be >= 1");
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("evolution time must be positive");
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Scores candidates against a fixed set of rounds. The per-round controls
// exp(i H(W_hat_r) dt) are cached; three-level models take a fixed-size path.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(const RabiModel& model, std::span<const RoundRecord> records, double t,
                      std::int64_t n_segments)
      : model_(model), records_(records), dt_(t / static_cast<double>(n_segments)), n_(n_segments) {
    require_segments(t, n_segments);
    if (records.empty()) throw ValidationError("likelihood needs at least one round");
    fixed_ = model.dim() == 3;
    for (const RoundRecord& r : records) {
      if (static_cast<Index>(r.counts.size()) != model.dim()) {
        throw ValidationError("round counts do not match the model dimension");
      }
      const ComplexMatrix c = model.propagator(r.control_estimate, -dt_);
      if (fixed_) {
        controls3_.push_back(c);
      } else {
        controls_.push_back(c);
      }
    }
  }

  double operator()(std::span<const double> candidate) const {
    const ComplexMatrix u = model_.propagator(candidate, dt_);
    const Index hub = model_.hub();
    double ll = 0.0;
    for (std::size_t r = 0; r < records_.size(); ++r) {
      ComplexVector amps;
      if (fixed_) {
        const Matrix3 w = controls3_[r] * Matrix3(u);
        amps = matrix_power(w, n_).col(hub);
      } else {
        amps = matrix_power(ComplexMatrix(controls_[r] * u), n_).col(hub);
      }
      const auto& counts = records_[r].counts;
      for (std::size_t x = 0; x < counts.size(); ++x) {
        if (counts[x] == 0) continue;
        const double p = std::max(std::norm(amps(static_cast<Index>(x))), kLikelihoodFloor);
        ll += static_cast<double>(counts[x]) * std::log(p);
      }
    }
    return ll;
  }

 private:
  const RabiModel& model_;
  std::span<const RoundRecord> records_;
  double dt_;
  std::int64_t n_;
  bool fixed_ = false;
  std::vector<Matrix3> controls3_;
  std::vector<ComplexMatrix> controls_;
};

struct Scored {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
};

// a beats b: strictly larger beyond the tie tolerance, or tied and lexicographically smaller.
bool beats(const Scored& a, const Scored& b) {
  if (!std::isfinite(b.value)) return std::isfinite(a.value) || lex_less(a.x, b.x);
  const double tol = 1e-12 * std::max({1.0, std::abs(a.value), std::abs(b.value)});
  if (std::abs(a.value - b.value) <= tol) return lex_less(a.x, b.x);
  return a.value > b.value;
}

Scored compass_search(const LikelihoodEvaluator& ll, Scored start, std::span<const SearchInterval> box,
                      std::vector<double> step) {
  Scored cur = std::move(start);
  const std::size_t p = cur.x.size();
  auto max_step = [&] { return *std::max_element(step.begin(), step.end()); };
  while (max_step() >= 1e-6) {
    Scored best = cur;
    bool moved = false;
    for (std::size_t i = 0; i < p; ++i) {
      for (double sign : {1.0, -1.0}) {
        Scored trial{cur.x, 0.0};
        trial.x[i] = std::clamp(cur.x[i] + sign * step[i], box[i].lo, box[i].hi);
        if (trial.x[i] == cur.x[i]) continue;
        trial.value = ll(trial.x);
        if (trial.value > best.value) {
          best = std::move(trial);
          moved = true;
        }
      }
    }
    if (moved) {
      cur = std::move(best);
    } else {
      for (double& s : step) s *= 0.5;
    }
  }
  return cur;
}

double fisher_proxy(const RabiModel& model, std::span<const RoundRecord> records, std::span<const double> estimate,
                    double t, std::int64_t n_segments, std::int64_t k) {
  const Index p = model.parameter_count();
  const Povm povm = Povm::computational(model.dim());
  const double dt = t / static_cast<double>(n_segments);
  RealMatrix f = RealMatrix::Zero(p, p);
  std::vector<double> steps(estimate.size());
  for (std::size_t i = 0; i < steps.size(); ++i) steps[i] = 1e-5 * (1.0 + std::abs(estimate[i]));
  for (const RoundRecord& r : records) {
    const ComplexMatrix control = model.propagator(r.control_estimate, -dt);
    const StateFamily family = [&](std::span<const double> w) -> ComplexVector {
      return matrix_power(ComplexMatrix(control * model.propagator(w, dt)), n_segments).col(model.hub());
    };
    const StateDerivatives d = finite_difference_derivatives(family, estimate, steps);
    f += static_cast<double>(k) * classical_fisher(d, povm).matrix;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(f, Eigen::EigenvaluesOnly);
  const RealVector& ev = solver.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * std::max(1.0, ev.maxCoeff()))) return 0.0;
  const double trace_inv = (1.0 / ev.array()).sum();
  const double m = static_cast<double>(k) * static_cast<double>(records.size());
  return 1.0 / (m * trace_inv);
}

}  // namespace

// Config -----------------------------------------------------------------------

std::vector<SearchInterval> AdaptiveConfig::box() const {
  if (!search_box.empty()) return search_box;
  return std::vector<SearchInterval>(static_cast<std::size_t>(model.parameter_count()), SearchInterval{});
}

void AdaptiveConfig::validate() const {
  const auto p = static_cast<std::size_t>(model.parameter_count());
  if (omega_true.size() != p) throw ValidationError("omega_true must have one entry per parameter");
  if (initial_guess.size() != p) throw ValidationError("initial_guess must have one entry per parameter");
  if (!search_box.empty() && search_box.size() != p) throw ValidationError("search box needs one interval per parameter");
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("time must be positive");
  if (segments < 1) throw ValidationError("segments must be >= 1");
  if (shots_per_round < 1) throw ValidationError("shots_per_round must be >= 1");
  if (rounds < 0) throw ValidationError("rounds must be >= 0");
  if (grid_points < 1) throw ValidationError("grid_points must be >= 1");
  double total = 1.0;
  for (std::size_t i = 0; i < p; ++i) total *= static_cast<double>(grid_points);
  if (total > 1e7) throw ValidationError("coarse grid exceeds 1e7 points; reduce grid_points");
  const auto b = box();
  for (std::size_t i = 0; i < p; ++i) {
    if (!(b[i].lo < b[i].hi)) throw ValidationError("search interval must have lo < hi");
    if (!(initial_guess[i] >= b[i].lo && initial_guess[i] <= b[i].hi)) {
      throw ValidationError("initial guess lies outside the search box");
    }
    if (!std::isfinite(omega_true[i])) throw ValidationError("omega_true must be finite");
  }
}

// Evolution and rounds ---------------------------------------------------------

ComplexMatrix controlled_evolution(const RabiModel& model, std::span<const double> omega_true,
                                   std::span<const double> omega_hat, double t, std::int64_t n_segments) {
  require_segments(t, n_segments);
  const double dt = t / static_cast<double>(n_segments);
  const ComplexMatrix step = model.propagator(omega_hat, -dt) * model.propagator(omega_true, dt);
  return matrix_power(step, n_segments);
}

ComplexMatrix controlled_evolution(std::span<const double> omega_true, std::span<const double> omega_hat,
                                   double t, std::int64_t n_segments) {
  return controlled_evolution(RabiModel::three_level(), omega_true, omega_hat, t, n_segments);
}

RoundRecord run_round(const RabiModel& model, std::span<const double> omega_true,
                      std::span<const double> omega_hat, double t, std::int64_t n_segments, std::int64_t k,
                      RngStream& rng) {
  const ComplexMatrix u = controlled_evolution(model, omega_true, omega_hat, t, n_segments);
  const QuantumState out = QuantumState::normalized(u.col(model.hub()));
  RoundRecord rec;
  rec.control_estimate.assign(omega_hat.begin(), omega_hat.end());
  rec.counts = sample_measurement(out, Povm::computational(model.dim()), k, rng);
  return rec;
}

double log_likelihood(const RabiModel& model, std::span<const double> candidate,
                      std::span<const RoundRecord> records, double t, std::int64_t n_segments) {
  return LikelihoodEvaluator(model, records, t, n_segments)(candidate);
}

double log_likelihood(std::span<const double> candidate, std::span<const RoundRecord> records, double t,
                      std::int64_t n_segments) {
  return log_likelihood(RabiModel::three_level(), candidate, records, t, n_segments);
}

// Maximum likelihood -------------------------------------------------------------

std::vector<double> mle_update(std::span<const RoundRecord> records, const AdaptiveConfig& config) {
  config.validate();
  const RabiModel& model = config.model;
  const LikelihoodEvaluator ll(model, records, config.t, config.segments);
  const std::vector<SearchInterval> box = config.box();
  const std::size_t p = box.size();
  const std::int64_t g = config.grid_points;

  std::vector<double> spacing(p);
  auto axis_value = [&](std::size_t i, std::int64_t idx) {
    if (g == 1) return 0.5 * (box[i].lo + box[i].hi);
    return box[i].lo + (box[i].hi - box[i].lo) * static_cast<double>(idx) / static_cast<double>(g - 1);
  };
  for (std::size_t i = 0; i < p; ++i) {
    spacing[i] = (g == 1) ? 0.5 * (box[i].hi - box[i].lo) : (box[i].hi - box[i].lo) / static_cast<double>(g - 1);
  }

  // Coarse grid in lexicographic order, keeping the best few as seeds.
  constexpr std::size_t kSeeds = 8;
  std::vector<Scored> top;
  std::vector<std::int64_t> idx(p, 0);
  for (bool done = false; !done;) {
    Scored s;
    s.x.resize(p);
    for (std::size_t i = 0; i < p; ++i) s.x[i] = axis_value(i, idx[i]);
    s.value = ll(s.x);
    if (top.size() < kSeeds || beats(s, top.back())) {
      const auto pos = std::find_if(top.begin(), top.end(), [&](const Scored& o) { return beats(s, o); });
      top.insert(pos, std::move(s));
      if (top.size() > kSeeds) top.pop_back();
    }
    // Last axis varies fastest.
    std::size_t axis = p;
    while (axis > 0) {
      --axis;
      if (++idx[axis] < g) break;
      idx[axis] = 0;
      if (axis == 0) done = true;
    }
  }

  std::vector<Scored> starts = top;
  Scored latest;
  latest.x = records.back().control_estimate;
  for (std::size_t i = 0; i < p; ++i) latest.x[i] = std::clamp(latest.x[i], box[i].lo, box[i].hi);
  latest.value = ll(latest.x);
  starts.push_back(std::move(latest));

  Scored best;
  for (Scored& s : starts) {
    Scored refined = compass_search(ll, std::move(s), box, spacing);
    if (best.x.empty() || beats(refined, best)) best = std::move(refined);
  }
  return best.x;
}

AdaptiveTrace adaptive_run(const AdaptiveConfig& config) {
  config.validate();
  AdaptiveTrace trace;
  trace.seed = config.seed;
  RngStream rng(config.seed);
  std::vector<double> estimate = config.initial_guess;
  for (std::int64_t n = 1; n <= config.rounds; ++n) {
    trace.rounds.push_back(run_round(config.model, config.omega_true, estimate, config.t, config.segments,
                                     config.shots_per_round, rng));
    estimate = mle_update(trace.rounds, config);
    trace.estimates.push_back(estimate);
    trace.normalized_inverse_variance.push_back(
        fisher_proxy(config.model, trace.rounds, estimate, config.t, config.segments, config.shots_per_round));
  }
  return trace;
}

std::vector<AdaptiveTrace> adaptive_ensemble(const AdaptiveConfig& config, std::int64_t seed_count,
                                             unsigned workers) {
  config.validate();
  if (seed_count < 0) throw ValidationError("seed count must be >= 0");
  std::vector<AdaptiveTrace> traces(static_cast<std::size_t>(seed_count));
  std::atomic<std::int64_t> next{0};
  auto work = [&] {
    for (std::int64_t i = next++; i < seed_count; i = next++) {
      AdaptiveConfig c = config;
      c.seed = config.seed + static_cast<std::uint64_t>(i);
      traces[static_cast<std::size_t>(i)] = adaptive_run(c);
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::int64_t>(seed_count, 1))));
  if (n_threads == 1) {
    work();
    return traces;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(work);
  pool.clear();
  return traces;
}

std::vector<double> ensemble_normalized_inverse_variance(std::span<const AdaptiveTrace> traces,
                                                         std::int64_t shots_per_round) {
  if (traces.size() < 2) throw ValidationError("sample variance needs at least two trajectories");
  if (shots_per_round < 1) throw ValidationError("shots_per_round must be >= 1");
  const std::size_t steps = traces.front().estimates.size();
  for (const AdaptiveTrace& tr : traces) {
    if (tr.estimates.size() != steps) throw ValidationError("trajectories have different lengths");
  }
  std::vector<double> out;
  for (std::size_t n = 0; n < steps; ++n) {
    const std::size_t p = traces.front().estimates[n].size();
    double total_var = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      double mean = 0.0;
      for (const AdaptiveTrace& tr : traces) mean += tr.estimates[n][i];
      mean /= static_cast<double>(traces.size());
      double ss = 0.0;
      for (const AdaptiveTrace& tr : traces) ss += (tr.estimates[n][i] - mean) * (tr.estimates[n][i] - mean);
      total_var += ss / static_cast<double>(traces.size() - 1);
    }
    const double m = static_cast<double>(shots_per_round) * static_cast<double>(n + 1);
    out.push_back(total_var > 0.0 ? 1.0 / (m * total_var) : std::numeric_limits<double>::infinity());
  }
  return out;
}

// Multi-level and robustness -------------------------------------------------------

QfimResult multilevel_controlled_qfim(std::int64_t l, double t) {
  if (l < 1) throw ValidationError("number of leaves l must be >= 1");
  const RabiModel model = RabiModel::star(l);
  const RabiParameters zero(std::vector<double>(static_cast<std::size_t>(l), 0.0));
  return qfim_pure(state_derivatives_spectral(model, zero, t, QuantumState::basis(model.dim(), model.hub())));
}

std::vector<std::pair<double, double>> robustness_curve(std::span<const double> offsets, double t,
                                                        std::int64_t m) {
  std::vector<std::pair<double, double>> out;
  out.reserve(offsets.size());
  for (double d : offsets) {
    if (!(d >= 0.0)) throw ValidationError("estimation-error offsets must be non-negative");
    out.emplace_back(d, 1.0 / controlled_bound(m, t, d));
  }
  return out;
}

}  // namespace rabiest
