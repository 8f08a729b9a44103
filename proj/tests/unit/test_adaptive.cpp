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


#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "rabiest/adaptive.hpp"
#include "rabiest/closed_form.hpp"
#include "rabiest/errors.hpp"

using namespace rabiest;
using namespace rabiest::testing;

namespace {

const RabiModel kThree = RabiModel::three_level();
const std::vector<double> kTruth{0.3, 0.7};

double op_norm(const ComplexMatrix& m) { return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues()(0); }

double trotter_error(std::int64_t n) {
  const std::vector<double> hat{0.25, 0.65};
  const std::vector<double> delta{0.05, 0.05};
  return op_norm(controlled_evolution(kTruth, hat, 5.0, n) - kThree.propagator(delta, 5.0));
}

AdaptiveConfig quick_config() {
  AdaptiveConfig c;
  c.segments = 100;
  c.rounds = 4;
  c.grid_points = 21;
  c.seed = 7;
  return c;
}

std::vector<RoundRecord> fixed_control_rounds(const std::vector<std::vector<double>>& controls, std::int64_t k,
                                              RngStream& rng, std::int64_t segments) {
  std::vector<RoundRecord> out;
  for (const auto& c : controls) out.push_back(run_round(kThree, kTruth, c, 5.0, segments, k, rng));
  return out;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("controlled_evolution") {
  TEST_CASE("perfect estimate gives the identity") {
    for (std::int64_t n : {1, 7, 1000}) {
      const ComplexMatrix u = controlled_evolution(kTruth, kTruth, 5.0, n);
      CHECK((u - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("commuting generators give the exact effective evolution") {
    const std::vector<double> w{0.8, 0.0};
    const std::vector<double> hat{0.3, 0.0};
    const std::vector<double> delta{0.5, 0.0};
    for (std::int64_t n : {1, 3, 64, 1000}) {
      CHECK(op_norm(controlled_evolution(w, hat, 5.0, n) - kThree.propagator(delta, 5.0)) < 1e-12);
    }
  }

  TEST_CASE("Trotter error halves when N doubles") {
    std::vector<double> e;
    for (std::int64_t n : {250, 500, 1000, 2000}) e.push_back(trotter_error(n));
    for (std::size_t i = 0; i + 1 < e.size(); ++i) CHECK(e[i] / e[i + 1] == doctest::Approx(2.0).epsilon(0.2));
  }

  TEST_CASE("error constant c = N * error is stable over decades") {
    const double c2 = 100.0 * trotter_error(100);
    const double c3 = 1000.0 * trotter_error(1000);
    const double c4 = 10000.0 * trotter_error(10000);
    CHECK(c3 / c2 == doctest::Approx(1.0).epsilon(0.1));
    CHECK(c4 / c3 == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("result is unitary") {
    RngStream rng(71);
    for (int s = 0; s < 20; ++s) {
      const std::vector<double> w{2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
      const std::vector<double> hat{2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
      const ComplexMatrix u = controlled_evolution(w, hat, 5.0, 1 + static_cast<std::int64_t>(rng.uniform() * 5000));
      CHECK((u.adjoint() * u - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("invalid input") {
    CHECK_THROWS_AS((void)controlled_evolution(kTruth, kTruth, 5.0, 0), ValidationError);
    const std::vector<double> short_hat{0.1};
    CHECK_THROWS_AS((void)controlled_evolution(kTruth, short_hat, 5.0, 10), ValidationError);
  }
}

TEST_SUITE("run_round") {
  TEST_CASE("perfect control keeps every shot on the hub") {
    RngStream rng(72);
    const RoundRecord r = run_round(kThree, kTruth, kTruth, 5.0, 1000, 30, rng);
    CHECK(r.counts == std::vector<std::int64_t>{0, 30, 0});
    CHECK(r.control_estimate == kTruth);
    CHECK(r.povm_id == "computational");
    const RabiModel star = RabiModel::star(3);
    const std::vector<double> w{0.1, 0.2, 0.3};
    CHECK(run_round(star, w, w, 5.0, 10, 12, rng).counts == std::vector<std::int64_t>{12, 0, 0, 0});
  }

  TEST_CASE("seeded rounds are reproducible") {
    RngStream a(73);
    RngStream b(73);
    const std::vector<double> hat{0.0, 0.0};
    for (int s = 0; s < 10; ++s) {
      CHECK(run_round(kThree, kTruth, hat, 5.0, 100, 30, a).counts ==
            run_round(kThree, kTruth, hat, 5.0, 100, 30, b).counts);
    }
  }

  TEST_CASE("frequencies follow the Born rule") {
    RngStream rng(74);
    const std::vector<double> hat{0.1, 0.2};
    const std::int64_t k = 1000000;
    const RoundRecord r = run_round(kThree, kTruth, hat, 5.0, 200, k, rng);
    CHECK(std::accumulate(r.counts.begin(), r.counts.end(), std::int64_t{0}) == k);
    const ComplexMatrix u = controlled_evolution(kTruth, hat, 5.0, 200);
    for (Index x = 0; x < 3; ++x) {
      const double p = std::norm(u(x, 1));
      const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(k));
      CHECK(std::abs(static_cast<double>(r.counts[static_cast<std::size_t>(x)]) / k - p) <= 5 * sigma + 1e-12);
    }
  }

  TEST_CASE("non-positive shot count is rejected") {
    RngStream rng(75);
    CHECK_THROWS_AS((void)run_round(kThree, kTruth, kTruth, 5.0, 10, 0, rng), ValidationError);
  }
}

TEST_SUITE("log_likelihood") {
  TEST_CASE("deterministic data at the matching candidate scores zero") {
    const std::vector<RoundRecord> recs{{kTruth, {0, 30, 0}, "computational"}};
    CHECK(std::abs(log_likelihood(kTruth, recs, 5.0, 100)) < 1e-9);
  }

  TEST_CASE("impossible outcomes are clamped, not fatal") {
    const std::vector<RoundRecord> recs{{kTruth, {5, 25, 0}, "computational"}};
    const double ll = log_likelihood(kTruth, recs, 5.0, 100);
    CHECK(std::isfinite(ll));
    CHECK(ll == doctest::Approx(5.0 * std::log(kLikelihoodFloor)).epsilon(1e-6));
  }

  TEST_CASE("truth maximizes the likelihood of many synthetic shots") {
    RngStream rng(76);
    const std::vector<RoundRecord> recs = fixed_control_rounds({{0.1, 0.3}, {0.5, 0.9}}, 100000, rng, 100);
    const double at_truth = log_likelihood(kTruth, recs, 5.0, 100);
    for (int i = -4; i <= 4; ++i) {
      for (int j = -4; j <= 4; ++j) {
        if (i == 0 && j == 0) continue;
        const std::vector<double> cand{0.3 + 0.1 * i, 0.7 + 0.1 * j};
        CHECK(log_likelihood(cand, recs, 5.0, 100) < at_truth);
      }
    }
  }

  TEST_CASE("each round is scored under its own control") {
    RngStream rng(77);
    std::vector<RoundRecord> recs = fixed_control_rounds({{0.0, 0.0}, {0.6, 0.2}}, 200, rng, 100);
    const double original = log_likelihood(kTruth, recs, 5.0, 100);
    std::swap(recs[0].counts, recs[1].counts);
    CHECK(log_likelihood(kTruth, recs, 5.0, 100) != doctest::Approx(original));
  }

  TEST_CASE("model and default overloads agree") {
    RngStream rng(78);
    const std::vector<RoundRecord> recs = fixed_control_rounds({{0.2, 0.1}}, 30, rng, 50);
    const std::vector<double> cand{0.4, 0.5};
    CHECK(log_likelihood(kThree, cand, recs, 5.0, 50) == log_likelihood(cand, recs, 5.0, 50));
  }

  TEST_CASE("empty records are rejected") {
    const std::vector<RoundRecord> none;
    CHECK_THROWS_AS((void)log_likelihood(kTruth, none, 5.0, 100), ValidationError);
  }
}

TEST_SUITE("mle_update") {
  TEST_CASE("well-sampled records recover the truth") {
    RngStream rng(79);
    const std::vector<RoundRecord> recs =
        fixed_control_rounds({{0.0, 0.0}, {0.5, 0.2}, {0.1, 0.9}, {0.6, 0.6}, {0.2, 0.4}}, 10000, rng, 100);
    AdaptiveConfig cfg;
    cfg.segments = 100;
    const std::vector<double> est = mle_update(recs, cfg);
    CHECK(std::abs(est[0] - 0.3) < 0.02);
    CHECK(std::abs(est[1] - 0.7) < 0.02);
  }

  TEST_CASE("mirror-symmetric likelihood resolves to the lexicographically smallest maximizer") {
    RngStream rng(80);
    const std::vector<RoundRecord> recs = fixed_control_rounds({{0.0, 0.0}}, 30, rng, 100);
    AdaptiveConfig cfg;
    cfg.segments = 100;
    const std::vector<double> est = mle_update(recs, cfg);
    CHECK(est[0] < 0.0);
    CHECK(est[1] < 0.0);
    const std::vector<double> mirrored{-est[0], -est[1]};
    CHECK(log_likelihood(est, recs, 5.0, 100) == doctest::Approx(log_likelihood(mirrored, recs, 5.0, 100)));
  }

  TEST_CASE("estimates stay inside the search box") {
    RngStream rng(81);
    AdaptiveConfig cfg;
    cfg.segments = 100;
    cfg.grid_points = 11;
    cfg.search_box = {{0.5, 0.6}, {-0.2, 0.1}};
    cfg.initial_guess = {0.55, 0.0};
    for (int s = 0; s < 5; ++s) {
      const std::vector<RoundRecord> recs = fixed_control_rounds({{0.0, 0.0}, {0.2, 0.5}}, 30, rng, 100);
      const std::vector<double> est = mle_update(recs, cfg);
      CHECK(est[0] >= 0.5);
      CHECK(est[0] <= 0.6);
      CHECK(est[1] >= -0.2);
      CHECK(est[1] <= 0.1);
    }
  }

  TEST_CASE("error shrinks as one over the square root of the shot count") {
    AdaptiveConfig cfg;
    cfg.segments = 50;
    cfg.grid_points = 41;
    cfg.search_box = {{0.0, 1.0}, {0.2, 1.2}};
    cfg.initial_guess = {0.5, 0.5};
    const std::vector<std::vector<double>> controls{{0.2, 0.5}, {0.4, 0.8}, {0.1, 0.6}, {0.3, 0.9},
                                                    {0.2, 0.5}, {0.4, 0.8}, {0.1, 0.6}, {0.3, 0.9}};
    double err_small = 0.0;
    double err_large = 0.0;
    for (int s = 0; s < 20; ++s) {
      RngStream rng(1000 + static_cast<std::uint64_t>(s));
      const std::vector<RoundRecord> recs = fixed_control_rounds(controls, 10000, rng, 50);
      err_small += distance(mle_update(std::span(recs).first(2), cfg), kTruth);
      err_large += distance(mle_update(recs, cfg), kTruth);
    }
    // Four times the shots: error ratio 2 within a factor 3.
    const double ratio = err_small / err_large;
    CHECK(ratio > 2.0 / 3.0);
    CHECK(ratio < 6.0);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.5));
  }
}

TEST_SUITE("adaptive_run") {
  TEST_CASE("identical configuration gives an identical trace") {
    const AdaptiveConfig c = quick_config();
    const AdaptiveTrace a = adaptive_run(c);
    const AdaptiveTrace b = adaptive_run(c);
    CHECK(a.estimates == b.estimates);
    CHECK(a.normalized_inverse_variance == b.normalized_inverse_variance);
    REQUIRE(a.rounds.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.rounds[i].counts == b.rounds[i].counts);
    AdaptiveConfig other = c;
    other.seed = 8;
    bool differs = false;
    const AdaptiveTrace d = adaptive_run(other);
    for (std::size_t i = 0; i < 4; ++i) differs = differs || d.rounds[i].counts != a.rounds[i].counts;
    CHECK(differs);
  }

  TEST_CASE("trace bookkeeping") {
    const AdaptiveConfig c = quick_config();
    const AdaptiveTrace tr = adaptive_run(c);
    CHECK(tr.seed == c.seed);
    CHECK(tr.estimates.size() == 4);
    CHECK(tr.normalized_inverse_variance.size() == 4);
    CHECK(tr.rounds[0].control_estimate == c.initial_guess);
    for (std::size_t i = 1; i < 4; ++i) CHECK(tr.rounds[i].control_estimate == tr.estimates[i - 1]);
    for (const RoundRecord& r : tr.rounds) CHECK(std::accumulate(r.counts.begin(), r.counts.end(), std::int64_t{0}) == 30);
    for (const auto& e : tr.estimates) {
      for (double v : e) {
        CHECK(v >= -2.0);
        CHECK(v <= 2.0);
      }
    }
  }

  TEST_CASE("Fisher proxy never exceeds the hub-probe quantum limit t^2 / 2") {
    AdaptiveConfig c = quick_config();
    for (std::uint64_t s = 1; s <= 5; ++s) {
      c.seed = s;
      for (double v : adaptive_run(c).normalized_inverse_variance) {
        CHECK(v >= 0.0);
        CHECK(v <= 12.5 * (1.0 + 1e-9));
      }
    }
  }

  TEST_CASE("starting at the truth stays near the truth") {
    AdaptiveConfig c;
    c.initial_guess = kTruth;
    c.rounds = 5;
    c.segments = 200;
    c.grid_points = 41;
    c.search_box = {{0.0, 1.0}, {0.2, 1.2}};
    int near = 0;
    for (std::uint64_t s = 1; s <= 10; ++s) {
      c.seed = s;
      if (distance(adaptive_run(c).estimates.back(), kTruth) < 0.05) ++near;
    }
    CHECK(near >= 8);
  }

  TEST_CASE("zero rounds give an empty trace") {
    AdaptiveConfig c = quick_config();
    c.rounds = 0;
    const AdaptiveTrace tr = adaptive_run(c);
    CHECK(tr.rounds.empty());
    CHECK(tr.estimates.empty());
  }

  TEST_CASE("configuration validation") {
    auto bad = [](auto mutate) {
      AdaptiveConfig c = quick_config();
      mutate(c);
      CHECK_THROWS_AS(c.validate(), ValidationError);
    };
    bad([](AdaptiveConfig& c) { c.segments = 0; });
    bad([](AdaptiveConfig& c) { c.shots_per_round = 0; });
    bad([](AdaptiveConfig& c) { c.rounds = -1; });
    bad([](AdaptiveConfig& c) { c.t = 0.0; });
    bad([](AdaptiveConfig& c) { c.grid_points = 0; });
    bad([](AdaptiveConfig& c) { c.omega_true = {0.3}; });
    bad([](AdaptiveConfig& c) { c.initial_guess = {3.0, 0.0}; });
    bad([](AdaptiveConfig& c) { c.search_box = {{1.0, -1.0}, {-1.0, 1.0}}; });
    bad([](AdaptiveConfig& c) { c.search_box = {{-1.0, 1.0}}; });
    CHECK_NOTHROW(quick_config().validate());
    CHECK(quick_config().box().size() == 2);
  }

  TEST_CASE("star model runs with the hub as probe") {
    AdaptiveConfig c = quick_config();
    c.model = RabiModel::star(3);
    c.omega_true = {0.2, 0.3, 0.4};
    c.initial_guess = {0.2, 0.3, 0.4};
    c.grid_points = 5;
    c.rounds = 2;
    const AdaptiveTrace tr = adaptive_run(c);
    CHECK(tr.rounds[0].counts == std::vector<std::int64_t>{30, 0, 0, 0});
  }
}

TEST_SUITE("ensembles") {
  TEST_CASE("worker count does not change the result") {
    AdaptiveConfig c = quick_config();
    c.rounds = 2;
    const std::vector<AdaptiveTrace> one = adaptive_ensemble(c, 4, 1);
    const std::vector<AdaptiveTrace> two = adaptive_ensemble(c, 4, 2);
    REQUIRE(one.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(one[i].seed == c.seed + i);
      CHECK(one[i].estimates == two[i].estimates);
    }
    CHECK(one[0].estimates == adaptive_run(c).estimates);
  }

  TEST_CASE("normalized inverse variance from the sample variance") {
    AdaptiveTrace a;
    AdaptiveTrace b;
    a.estimates = {{0.0, 0.0}, {0.3, 0.7}};
    b.estimates = {{1.0, 1.0}, {0.3, 0.7}};
    const std::vector<AdaptiveTrace> traces{a, b};
    const std::vector<double> v = ensemble_normalized_inverse_variance(traces, 30);
    REQUIRE(v.size() == 2);
    // Var = 0.5 per component, m = 30.
    CHECK(v[0] == doctest::Approx(1.0 / 30.0));
    CHECK(std::isinf(v[1]));
    const std::vector<AdaptiveTrace> single{a};
    CHECK_THROWS_AS((void)ensemble_normalized_inverse_variance(single, 30), ValidationError);
  }
}

TEST_SUITE("multilevel and robustness") {
  TEST_CASE("controlled multilevel QFIM is t^2 I") {
    const QfimResult two = multilevel_controlled_qfim(2, 5.0);
    CHECK((two.matrix - 25.0 * RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    for (std::int64_t l = 1; l <= 8; ++l) {
      const QfimResult q = multilevel_controlled_qfim(l, 3.0);
      CHECK((q.matrix - 9.0 * RealMatrix::Identity(l, l)).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(q.commutation_residuals.cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS((void)multilevel_controlled_qfim(0, 3.0), ValidationError);
  }

  TEST_CASE("engine QFIM agrees with finite differences") {
    const RabiModel star = RabiModel::star(5);
    const RabiParameters zero(std::vector<double>(5, 0.0));
    const RealMatrix fd = qfim_pure(state_derivatives_fd(star, zero, 3.0, QuantumState::basis(6, 0))).matrix;
    CHECK(rel_dev(fd, multilevel_controlled_qfim(5, 3.0).matrix) < 1e-6);
  }

  TEST_CASE("robustness curve values") {
    const std::vector<double> offsets{0.0, 0.3};
    const auto curve = robustness_curve(offsets, 5.0, 1);
    CHECK(curve[0].second == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(std::abs(curve[1].second - 1.0 / 0.044213) < 0.01);
    CHECK(curve[1].second == doctest::Approx(22.62).epsilon(1e-3));
  }

  TEST_CASE("robustness curve is decreasing before the first singular offset") {
    std::vector<double> offsets;
    for (int i = 0; i < 200; ++i) offsets.push_back(i * (kPi / 5.0) / 200.0);
    const auto curve = robustness_curve(offsets, 5.0, 1);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].second < curve[i - 1].second);
    const std::vector<double> negative{-0.1};
    CHECK_THROWS_AS((void)robustness_curve(negative, 5.0, 1), ValidationError);
  }
}
