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
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rabiest/adaptive.hpp"
#include "rabiest/closed_form.hpp"
#include "rabiest/errors.hpp"
#include "rabiest/qfim.hpp"
#include "rabiest/verify.hpp"
#include "rabiest_cli/cli.hpp"

namespace rabiest::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

const char* const kBudgetNote =
    "budget: separate estimation uses m experiments per parameter; joint estimation uses the same total "
    "(2m, or l*m); bounds are on Var(W1) + Var(W2) + ...";

// CSV goes to --output when given, else stdout; reports go to whichever stream the CSV does not use.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& out, std::ostream& err) {
    if (path.empty()) {
      csv_ = &out;
      report_ = &err;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
      csv_ = file_.get();
      report_ = &out;
    }
  }
  std::ostream& csv() { return *csv_; }
  std::ostream& report() { return *report_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* csv_ = nullptr;
  std::ostream* report_ = nullptr;
};

std::string row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const std::string& c : cells) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s + '\n';
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
}

void require_at_least(std::int64_t v, std::int64_t lo, const char* name) {
  if (v < lo) throw ValidationError(std::string(name) + " must be >= " + std::to_string(lo));
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config,
                           const std::optional<std::string>& env) {
  if (flag) return *flag;
  if (config) return *config;
  if (env && !env->empty()) return parse_seed(*env, "RABIEST_SEED");
  return kDefaultSeed;
}

// qfim ---------------------------------------------------------------------------

struct QfimArgs {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double time = 0.0;
  std::string probe = "optimal";
};

QuantumState read_probe_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open probe file '" + path + "'");
  std::vector<Complex> amps;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string re;
    std::string im;
    if (!(ls >> re)) continue;
    ls >> im;
    amps.emplace_back(parse_double(re, "probe amplitude"), im.empty() ? 0.0 : parse_double(im, "probe amplitude"));
  }
  if (amps.size() != 3) throw ConfigError("probe file must list 3 amplitudes ('re im' per line)");
  ComplexVector v(3);
  for (Index k = 0; k < 3; ++k) v(k) = amps[static_cast<std::size_t>(k)];
  return QuantumState(v);
}

int cmd_qfim(const QfimArgs& a, std::ostream& out, std::ostream& err) {
  require_positive(a.time, "--time");
  const RabiParameters omega(a.omega1, a.omega2);
  const double wp = omega.omega_plus();
  const bool singular_time = wp > 0.0 && is_singular_time(wp, a.time);

  std::optional<QuantumState> psi;
  if (a.probe == "optimal") {
    if (singular_time || !(wp > 0.0)) {
      out << row({"singular", "true"});
      err << "error: Omega_+ t = " << format_number(wp * a.time)
          << " is a singular time (or Omega_+ = 0); no probe makes the QFIM invertible\n";
      return kSingular;
    }
    psi = optimal_probe_state(omega, a.time);
  } else if (a.probe.starts_with("basis:")) {
    const std::int64_t k = parse_int(a.probe.substr(6), "--probe basis index");
    if (k < 0 || k > 2) throw ValidationError("--probe basis index must be 0, 1 or 2");
    psi = QuantumState::basis(3, k);
  } else if (a.probe.starts_with("file:")) {
    psi = read_probe_file(a.probe.substr(5));
  } else {
    throw ValidationError("--probe must be optimal, basis:<i> or file:<path>");
  }

  const RabiModel model = RabiModel::three_level();
  const StateDerivatives d = state_derivatives(model, omega, a.time, *psi);
  const QfimResult q = qfim_pure(d);
  out << "# QFIM J (row-major), derivatives: " << to_string(d.method) << "\n";
  out << row({format_number(q.matrix(0, 0)), format_number(q.matrix(0, 1))});
  out << row({format_number(q.matrix(1, 0)), format_number(q.matrix(1, 1))});
  out << row({"commutation_residual", format_number(check_weak_commutation(d))});
  out << row({"condition_number", format_number(q.condition_number)});
  out << row({"singular", q.singular ? "true" : "false"});
  if (q.singular || singular_time) {
    err << "error: the QFIM is singular (condition number " << format_number(q.condition_number)
        << "); Tr(J^-1) does not exist\n";
    return kSingular;
  }
  out << row({"trace_inverse", format_number(q.matrix.inverse().trace())});
  if (wp > 0.0) out << row({"min_trace_inverse", format_number(min_trace_inverse(wp, a.time))});
  return kSuccess;
}

// compare --------------------------------------------------------------------------

struct CompareArgs {
  double omega_plus = 0.1;
  std::int64_t m = 1;
  double xmax = 2.0 * std::numbers::pi;
  std::int64_t steps = 400;
  std::string output;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  require_positive(a.omega_plus, "--omega-plus");
  require_positive(a.xmax, "--xmax");
  require_at_least(a.m, 1, "--m");
  require_at_least(a.steps, 1, "--steps");
  Sink sink(a.output, out, err);
  std::ostream& csv = sink.csv();
  csv << "omega_plus_t,joint_bound,separate_bound\n";
  auto bound_or_inf = [&](double t) {
    try {
      return joint_bound(a.m, t, a.omega_plus);
    } catch (const SingularError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  for (std::int64_t i = 1; i <= a.steps; ++i) {
    const double x = a.xmax * static_cast<double>(i) / static_cast<double>(a.steps);
    const double t = x / a.omega_plus;
    csv << row({format_number(x), format_number(bound_or_inf(t)), format_number(separate_bound(a.m, t))});
  }
  const double xq = 0.5 * std::numbers::pi;
  const double tq = xq / a.omega_plus;
  std::ostream& rep = sink.report();
  rep << "# " << kBudgetNote << "\n";
  rep << "# crossover_phase = " << format_number(crossover_phase()) << "\n";
  rep << "# crossover_time = " << format_number(crossover_time(a.omega_plus)) << "\n";
  rep << "# at omega_plus_t = pi/2: joint_bound = " << format_number(joint_bound(a.m, tq, a.omega_plus))
      << ", separate_bound = " << format_number(separate_bound(a.m, tq)) << "\n";
  return kSuccess;
}

// robustness -------------------------------------------------------------------------

struct RobustnessArgs {
  double time = 5.0;
  std::int64_t m = 1;
  double max_offset = 1.0;
  std::int64_t steps = 100;
  std::vector<double> offsets;
  std::string output;
};

int cmd_robustness(const RobustnessArgs& a, std::ostream& out, std::ostream& err) {
  require_positive(a.time, "--time");
  require_at_least(a.m, 1, "--m");
  std::vector<double> offsets = a.offsets;
  if (offsets.empty()) {
    require_positive(a.max_offset, "--max-offset");
    require_at_least(a.steps, 1, "--steps");
    for (std::int64_t i = 0; i <= a.steps; ++i) {
      offsets.push_back(a.max_offset * static_cast<double>(i) / static_cast<double>(a.steps));
    }
  }
  const auto curve = robustness_curve(offsets, a.time, a.m);
  Sink sink(a.output, out, err);
  sink.csv() << "delta_omega_plus,inverse_total_variance\n";
  for (const auto& [d, inv] : curve) sink.csv() << row({format_number(d), format_number(inv)});
  sink.report() << "# offset D = |W - W_hat|; inverse of 1/(2 m t^2) + D^2 / (8 m sin^2(D t / 2))\n";
  return kSuccess;
}

// adapt ----------------------------------------------------------------------------------

struct AdaptArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> seeds;
  unsigned workers = 1;
  std::string output;
};

const std::set<std::string> kAdaptKeys{"omega1_true", "omega2_true",     "time",        "shots_per_round",
                                       "rounds",      "initial_guess_1", "initial_guess_2", "seed",
                                       "box_lo",      "box_hi",          "grid_points", "segments",
                                       "seed_count"};

int cmd_adapt(const AdaptArgs& a, std::ostream& out, std::ostream& err, const std::optional<std::string>& env) {
  std::ifstream in(a.config);
  if (!in) throw ConfigError("cannot open config file '" + a.config + "'");
  const auto kv = parse_config(in, kAdaptKeys);
  auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    return it == kv.end() ? std::nullopt : std::optional<std::string>(it->second);
  };

  AdaptiveConfig c;
  if (auto v = get("omega1_true")) c.omega_true[0] = parse_double(*v, "omega1_true");
  if (auto v = get("omega2_true")) c.omega_true[1] = parse_double(*v, "omega2_true");
  if (auto v = get("time")) c.t = parse_double(*v, "time");
  if (auto v = get("shots_per_round")) c.shots_per_round = parse_int(*v, "shots_per_round");
  if (auto v = get("rounds")) c.rounds = parse_int(*v, "rounds");
  if (auto v = get("initial_guess_1")) c.initial_guess[0] = parse_double(*v, "initial_guess_1");
  if (auto v = get("initial_guess_2")) c.initial_guess[1] = parse_double(*v, "initial_guess_2");
  if (auto v = get("grid_points")) c.grid_points = parse_int(*v, "grid_points");
  if (auto v = get("segments")) c.segments = parse_int(*v, "segments");
  SearchInterval box;
  if (auto v = get("box_lo")) box.lo = parse_double(*v, "box_lo");
  if (auto v = get("box_hi")) box.hi = parse_double(*v, "box_hi");
  c.search_box.assign(2, box);
  std::optional<std::uint64_t> config_seed;
  if (auto v = get("seed")) config_seed = parse_seed(*v, "seed");
  c.seed = resolve_seed(a.seed, config_seed, env);
  std::int64_t seed_count = 1;
  if (auto v = get("seed_count")) seed_count = parse_int(*v, "seed_count");
  if (a.seeds) seed_count = *a.seeds;
  require_at_least(seed_count, 1, "seed_count");
  c.validate();

  const auto traces = adaptive_ensemble(c, seed_count, std::max(1u, a.workers));
  std::vector<double> ensemble;
  if (seed_count >= 2 && c.rounds > 0) ensemble = ensemble_normalized_inverse_variance(traces, c.shots_per_round);

  Sink sink(a.output, out, err);
  std::ostream& csv = sink.csv();
  csv << "step,omega1_hat,omega2_hat,norm_inv_variance,seed\n";
  for (const AdaptiveTrace& tr : traces) {
    for (std::size_t n = 0; n < tr.estimates.size(); ++n) {
      const double v = ensemble.empty() ? tr.normalized_inverse_variance[n] : ensemble[n];
      csv << row({std::to_string(n + 1), format_number(tr.estimates[n][0]), format_number(tr.estimates[n][1]),
                  format_number(v), std::to_string(tr.seed)});
    }
  }

  std::ostream& meta = sink.report();
  meta << "# adapt metadata\n";
  meta << "# omega1_true = " << format_number(c.omega_true[0]) << "\n";
  meta << "# omega2_true = " << format_number(c.omega_true[1]) << "\n";
  meta << "# time = " << format_number(c.t) << "\n";
  meta << "# shots_per_round = " << c.shots_per_round << "\n";
  meta << "# rounds = " << c.rounds << "\n";
  meta << "# initial_guess_1 = " << format_number(c.initial_guess[0]) << "\n";
  meta << "# initial_guess_2 = " << format_number(c.initial_guess[1]) << "\n";
  meta << "# seed = " << c.seed << "\n";
  meta << "# seed_count = " << seed_count << "\n";
  meta << "# box_lo = " << format_number(box.lo) << "\n";
  meta << "# box_hi = " << format_number(box.hi) << "\n";
  meta << "# grid_points = " << c.grid_points << "\n";
  meta << "# segments = " << c.segments << "\n";
  meta << "# probe = hub level |1>, measurement = computational basis, control = U^dagger(W_hat, t/segments)\n";
  meta << "# estimator = cumulative maximum likelihood over all rounds, each round under its own control; "
          "grid then compass refinement to 1e-6, ties to the lexicographically smallest candidate\n";
  meta << "# likelihood_floor = " << format_number(kLikelihoodFloor) << "\n";
  meta << "# norm_inv_variance = "
       << (ensemble.empty() ? "per-trajectory Fisher proxy 1/(m Tr F^-1) at the current estimate, m = shots_per_round * step"
                            : "1/(m (Var W1 + Var W2)) from the sample variance across seeds, m = shots_per_round * step")
       << "\n";
  meta << "# sign ambiguity: hub-level counts depend on |W1 - W1_hat| and |W2 - W2_hat| only, so mirror images "
          "tie exactly; the search box and the tie rule pick one of them\n";
  return kSuccess;
}

// multilevel ------------------------------------------------------------------------------

struct MultilevelArgs {
  std::int64_t levels = 2;
  double time = 5.0;
  std::int64_t m = 1;
};

int cmd_multilevel(const MultilevelArgs& a, std::ostream& out) {
  require_at_least(a.levels, 1, "--levels");
  require_positive(a.time, "--time");
  require_at_least(a.m, 1, "--m");
  const QfimResult q = multilevel_controlled_qfim(a.levels, a.time);
  const double t2 = a.time * a.time;
  double diag_dev = 0.0;
  double off_diag = 0.0;
  for (Index i = 0; i < q.matrix.rows(); ++i) {
    for (Index j = 0; j < q.matrix.cols(); ++j) {
      if (i == j) {
        diag_dev = std::max(diag_dev, std::abs(q.matrix(i, j) - t2));
      } else {
        off_diag = std::max(off_diag, std::abs(q.matrix(i, j)));
      }
    }
  }
  const BoundReport b = multilevel_bounds(a.levels, a.m, a.time);
  out << "# " << kBudgetNote << "\n";
  out << row({"levels", std::to_string(a.levels)});
  out << row({"qfim_diagonal_max_deviation_from_t2", format_number(diag_dev)});
  out << row({"qfim_offdiagonal_max", format_number(off_diag)});
  out << row({"weak_commutation_residual", format_number(q.commutation_residuals.cwiseAbs().maxCoeff())});
  out << row({"joint_bound", format_number(b.joint)});
  out << row({"separate_bound", format_number(b.separate)});
  out << row({"ratio", format_number(b.ratio)});
  return kSuccess;
}

// verify ------------------------------------------------------------------------------------

struct VerifyArgs {
  bool quick = false;
  std::optional<std::uint64_t> seed;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, const std::optional<std::string>& env) {
  VerifyOptions opts;
  opts.quick = a.quick;
  if (a.seed || (env && !env->empty())) opts.seed = resolve_seed(a.seed, std::nullopt, env);
  bool all = true;
  for (const SuiteResult& r : run_verification(opts)) {
    all = all && r.passed;
    std::ostringstream line;
    line << std::setprecision(3) << (r.passed ? "PASS " : "FAIL ") << r.name << " max_error=" << r.max_error
         << " threshold=" << r.threshold << " [" << r.detail << "]\n";
    out << line.str();
  }
  out << (all ? "all suites passed\n" : "verification FAILED\n");
  return all ? kSuccess : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::optional<std::string> env_seed) {
  CLI::App app{"rabiest: joint estimation of Rabi frequencies (QFIM, bounds, adaptive control)", "rabiest"};
  app.require_subcommand(1);

  QfimArgs qa;
  auto* qfim = app.add_subcommand("qfim", "QFIM, Tr(J^-1) and weak-commutation residual for the three-level system");
  qfim->add_option("--omega1", qa.omega1, "first Rabi frequency")->required();
  qfim->add_option("--omega2", qa.omega2, "second Rabi frequency")->required();
  qfim->add_option("--time", qa.time, "evolution time t")->required();
  qfim->add_option("--probe", qa.probe, "optimal | basis:<i> | file:<path>")->capture_default_str();

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "joint vs separate bounds over Omega_+ t (CSV)");
  compare->add_option("--omega-plus", ca.omega_plus, "Omega_+")->capture_default_str();
  compare->add_option("--m", ca.m, "experiments per parameter")->capture_default_str();
  compare->add_option("--xmax", ca.xmax, "largest Omega_+ t")->capture_default_str();
  compare->add_option("--steps", ca.steps, "grid intervals on (0, xmax]")->capture_default_str();
  compare->add_option("--output", ca.output, "CSV path (default stdout)");

  RobustnessArgs ra;
  auto* robust = app.add_subcommand("robustness", "controlled-scheme inverse variance vs estimation error (CSV)");
  robust->add_option("--time", ra.time, "evolution time t")->capture_default_str();
  robust->add_option("--m", ra.m, "repetitions")->capture_default_str();
  robust->add_option("--max-offset", ra.max_offset, "largest offset |W - W_hat|")->capture_default_str();
  robust->add_option("--steps", ra.steps, "grid intervals on [0, max-offset]")->capture_default_str();
  robust->add_option("--offsets", ra.offsets, "explicit offsets (overrides the grid)")->delimiter(',');
  robust->add_option("--output", ra.output, "CSV path (default stdout)");

  AdaptArgs aa;
  auto* adapt = app.add_subcommand("adapt", "simulate the adaptive-control MLE protocol (CSV)");
  adapt->footer(
      "Config keys (flat 'key = value', '#' comments; unknown keys are rejected):\n"
      "  omega1_true, omega2_true, time, shots_per_round, rounds, initial_guess_1, initial_guess_2,\n"
      "  seed, box_lo, box_hi, grid_points, segments, seed_count\n"
      "Defaults: 0.3, 0.7, 5, 30, 15, 0, 0, 1, -2, 2, 81, 1000, 1.\n"
      "Seed precedence: --seed, then the config file, then RABIEST_SEED, then 1.\n"
      "Estimates are defined up to per-component mirror images about the control; the box and the\n"
      "lexicographic tie rule select one.");
  adapt->add_option("--config", aa.config, "config file")->required();
  adapt->add_option("--seed", aa.seed, "base seed");
  adapt->add_option("--seeds", aa.seeds, "number of seeds (overrides seed_count)");
  adapt->add_option("--workers", aa.workers, "worker threads for multiple seeds")->capture_default_str();
  adapt->add_option("--output", aa.output, "CSV path (default stdout)");

  MultilevelArgs ma;
  auto* multi = app.add_subcommand("multilevel", "star-model controlled QFIM and l-fold bound ratio");
  multi->add_option("--levels", ma.levels, "number of coupled leaves l")->capture_default_str();
  multi->add_option("--time", ma.time, "evolution time t")->capture_default_str();
  multi->add_option("--m", ma.m, "repetitions")->capture_default_str();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run the self-verification suites");
  verify->add_flag("--quick", va.quick, "reduced sample counts");
  verify->add_option("--seed", va.seed, "seed for the random samples");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kUsageError;
  }

  try {
    if (*qfim) return cmd_qfim(qa, out, err);
    if (*compare) return cmd_compare(ca, out, err);
    if (*robust) return cmd_robustness(ra, out, err);
    if (*adapt) return cmd_adapt(aa, out, err, env_seed);
    if (*multi) return cmd_multilevel(ma, out);
    if (*verify) return cmd_verify(va, out, env_seed);
  } catch (const SingularError& e) {
    err << "error: " << e.what() << "\n";
    return kSingular;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace rabiest::cli
