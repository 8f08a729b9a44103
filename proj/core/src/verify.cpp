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


#include "rabiest/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "rabiest/adaptive.hpp"
#include "rabiest/closed_form.hpp"
#include "rabiest/errors.hpp"
#include "rabiest/qfim.hpp"
#include "rabiest/rng.hpp"

namespace rabiest {

namespace {

constexpr double kPi = std::numbers::pi;

// Worst error per named check; the first check is the suite's headline metric.
class Checks {
 public:
  explicit Checks(std::string suite) : suite_(std::move(suite)) {}

  void add(const std::string& name, double error, double tol) {
    auto it = std::find_if(items_.begin(), items_.end(), [&](const Item& i) { return i.name == name; });
    if (it == items_.end()) {
      items_.push_back({name, 0.0, tol});
      it = items_.end() - 1;
    }
    if (std::isnan(error)) error = std::numeric_limits<double>::infinity();
    it->worst = std::max(it->worst, error);
  }

  void require(const std::string& name, bool ok) { add(name, ok ? 0.0 : 1.0, 0.5); }

  [[nodiscard]] SuiteResult result() const {
    SuiteResult r;
    r.name = suite_;
    r.passed = true;
    std::ostringstream os;
    os << std::setprecision(3);
    for (const Item& i : items_) {
      const bool ok = i.worst <= i.tol;
      r.passed = r.passed && ok;
      if (&i != &items_.front()) os << "; ";
      os << (ok ? "" : "FAILED ") << i.name << " " << i.worst << " <= " << i.tol;
    }
    if (!items_.empty()) {
      r.max_error = items_.front().worst;
      r.threshold = items_.front().tol;
    }
    r.detail = os.str();
    return r;
  }

 private:
  struct Item {
    std::string name;
    double worst;
    double tol;
  };
  std::string suite_;
  std::vector<Item> items_;
};

QfimAssembler assembler_of(const VerifyOptions& opts) {
  if (opts.assembler) return opts.assembler;
  return [](const RabiParameters& w, double t, const ProbeCoefficients& c) { return qfim_closed_form(w, t, c); };
}

double rel_dev(const RealMatrix& a, const RealMatrix& b) {
  const double scale = b.norm();
  return scale > 0.0 ? (a - b).norm() / scale : (a - b).norm();
}

struct Point {
  RabiParameters omega;
  double t;
};

// W in [0.05, 2]^2, t in [0.1, 20], at least `margin` away from singular times.
Point random_point(RngStream& rng, double margin = 1e-3) {
  for (;;) {
    RabiParameters w(0.05 + 1.95 * rng.uniform(), 0.05 + 1.95 * rng.uniform());
    const double t = 0.1 + 19.9 * rng.uniform();
    if (std::abs(std::sin(0.5 * w.omega_plus() * t)) >= margin) return {w, t};
  }
}

QuantumState probe_state(const RabiParameters& w, const ProbeCoefficients& c) {
  return c.to_state(three_level_basis(w[0], w[1]));
}

ComplexMatrix random_hermitian(Index dim, RngStream& rng) {
  ComplexMatrix a(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
  }
  return 0.5 * (a + a.adjoint());
}

QuantumState random_state(Index dim, RngStream& rng) {
  ComplexVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = Complex(rng.normal(), rng.normal());
  return QuantumState::normalized(v);
}

}  // namespace

SuiteResult verify_closed_form_vs_fd(const VerifyOptions& opts) {
  Checks checks("closed_form_vs_fd");
  const QfimAssembler assemble = assembler_of(opts);
  RngStream rng = RngStream(opts.seed).split(1);
  const RabiModel model = RabiModel::three_level();
  const int n = opts.quick ? 25 : 100;
  for (int s = 0; s < n; ++s) {
    const Point pt = random_point(rng);
    const ProbeCoefficients c = random_probe(rng);
    const QuantumState psi = probe_state(pt.omega, c);
    const RealMatrix closed = assemble(pt.omega, pt.t, c);
    const RealMatrix fd = qfim_pure(state_derivatives_fd(model, pt.omega, pt.t, psi)).matrix;
    const RealMatrix exact = qfim_pure(state_derivatives_analytic(pt.omega, pt.t, psi)).matrix;
    const RealMatrix spectral = qfim_pure(state_derivatives_spectral(model, pt.omega, pt.t, psi)).matrix;
    checks.add("closed_vs_fd", rel_dev(closed, fd), 1e-6);
    checks.add("closed_vs_analytic", rel_dev(closed, exact), 1e-9);
    checks.add("analytic_vs_spectral", rel_dev(exact, spectral), 1e-9);
  }
  return checks.result();
}

SuiteResult verify_random_probe_optimality(const VerifyOptions& opts) {
  Checks checks("random_probe_optimality");
  const QfimAssembler assemble = assembler_of(opts);
  RngStream rng = RngStream(opts.seed).split(2);
  const int points = opts.quick ? 5 : 20;
  const int probes = opts.quick ? 1000 : 10000;
  for (int s = 0; s < points; ++s) {
    const Point pt = random_point(rng);
    const double wp = pt.omega.omega_plus();
    const double floor = min_trace_inverse(wp, pt.t);
    double undercut = 0.0;
    for (int k = 0; k < probes; ++k) {
      const ProbeCoefficients c = random_probe(rng);
      try {
        undercut = std::max(undercut, floor - trace_inverse_closed_form(pt.omega, pt.t, c));
      } catch (const SingularError&) {
        // A singular QFIM has unbounded Tr(J^-1) and cannot undercut.
      }
    }
    checks.add("random_undercut", undercut, 1e-9);
    const ProbeCoefficients best = optimal_probe_coefficients(wp, pt.t);
    checks.add("optimal_attains_min", std::abs(trace_inverse_closed_form(pt.omega, pt.t, best) - floor) / floor,
               1e-12);
    const RealMatrix j = assemble(pt.omega, pt.t, best);
    checks.add("assembled_attains_min", std::abs(j.inverse().trace() - floor) / floor, 1e-9);
  }
  return checks.result();
}

SuiteResult verify_equality_conditions(const VerifyOptions& opts) {
  Checks checks("equality_conditions");
  RngStream rng = RngStream(opts.seed).split(3);
  const int n = opts.quick ? 20 : 100;
  for (int s = 0; s < n; ++s) {
    const Point pt = random_point(rng);
    const double wp = pt.omega.omega_plus();
    const ProbeCoefficients c = optimal_probe_coefficients(wp, pt.t);
    const ClosedFormCoefficients k = abc_coefficients(pmn_coefficients(c, wp, pt.t), c, pt.t);
    const double p2 = std::norm(k.p);
    const double t2 = pt.t * pt.t;
    checks.add("A_eq_4P2", std::abs(k.a - 4.0 * p2) / (4.0 * p2), 1e-10);
    checks.add("B_eq_4t2", std::abs(k.b - 4.0 * t2) / (4.0 * t2), 1e-10);
    checks.add("C_eq_0", std::abs(k.c) / std::sqrt(16.0 * p2 * t2), 1e-10);
  }
  return checks.result();
}

SuiteResult verify_singular_times(const VerifyOptions& opts) {
  Checks checks("singular_times");
  RngStream rng = RngStream(opts.seed).split(4);
  std::vector<RabiParameters> omegas{RabiParameters(3.0, 4.0)};
  const int extra = opts.quick ? 2 : 5;
  for (int s = 0; s < extra; ++s) omegas.emplace_back(0.05 + 1.95 * rng.uniform(), 0.05 + 1.95 * rng.uniform());
  const int probes = opts.quick ? 30 : 100;
  for (const RabiParameters& w : omegas) {
    const double wp = w.omega_plus();
    const double t = 2.0 * kPi / wp;
    for (int k = 0; k < probes; ++k) {
      const ProbeCoefficients c = random_probe(rng);
      const RealMatrix j = qfim_pure(state_derivatives_analytic(w, t, probe_state(w, c))).matrix;
      const double tr = j.trace();
      if (tr > 1e-12) checks.add("det_over_trace_sq", std::abs(j.determinant()) / (tr * tr), 1e-14);
      const RealMatrix form = qfim_singular_form(w, t, c);
      checks.add("singular_form_vs_engine", (form - j).norm() / std::max(1.0, j.norm()), 1e-8);
    }
    // Balanced bright-state probe: flagged singular exactly at the singular time.
    const ThreeLevelBasis basis = three_level_basis(w[0], w[1]);
    const ProbeCoefficients balanced{0.0, Complex(1.0 / std::sqrt(2.0), 0.0), Complex(1.0 / std::sqrt(2.0), 0.0)};
    const QuantumState psi = balanced.to_state(basis);
    checks.require("flag_at_singular_time", qfim_pure(state_derivatives_analytic(w, t, psi)).singular);
    checks.require("no_flag_off_singular_time",
                   !qfim_pure(state_derivatives_analytic(w, t * (1.0 + 1e-3), psi)).singular);
    bool threw = false;
    try {
      (void)min_trace_inverse(wp, t);
    } catch (const SingularError&) {
      threw = true;
    }
    checks.require("min_bound_refuses_singular_time", threw);
  }
  return checks.result();
}

SuiteResult verify_saturation(const VerifyOptions& opts) {
  Checks checks("saturation");
  RngStream rng = RngStream(opts.seed).split(5);
  const RabiModel model = RabiModel::three_level();
  const int n = opts.quick ? 20 : 100;
  for (int s = 0; s < n; ++s) {
    const Point pt = random_point(rng);
    const QuantumState psi = optimal_probe_state(pt.omega, pt.t);
    checks.add("weak_commutation_optimal_probe",
               check_weak_commutation(state_derivatives_analytic(pt.omega, pt.t, psi)), 1e-10);
  }

  const RabiParameters w(0.3, 0.7);
  const double t = 5.0;
  const QuantumState psi = optimal_probe_state(w, t);
  const StateDerivatives d = state_derivatives_analytic(w, t, psi);
  const RealMatrix j = qfim_pure(d).matrix;
  const OptimalPovm opt = optimal_povm(d);
  const std::vector<double> offsets{1e-2, 1e-3, 1e-4};
  std::vector<double> errs;
  for (double off : offsets) {
    errs.push_back(rel_dev(cfi_from_povm(model, w, t, psi, opt.povm, off).matrix, j));
  }
  // Least-squares line err = a + b * offset; a is the zero-offset extrapolation.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    sx += offsets[i];
    sy += errs[i];
    sxx += offsets[i] * offsets[i];
    sxy += offsets[i] * errs[i];
  }
  const double cnt = static_cast<double>(offsets.size());
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / cnt;
  checks.add("cfi_extrapolated_gap", std::abs(intercept), 1e-4);
  checks.require("cfi_gap_shrinks_with_offset", errs[0] > errs[1] && errs[1] > errs[2]);
  // Linear convergence: a tenfold smaller offset shrinks the gap roughly tenfold.
  checks.add("cfi_gap_linear_order", std::abs(std::log10(errs[1] / errs[2]) - 1.0), 0.2);
  checks.add("cfi_at_zero_offset", rel_dev(cfi_from_povm(model, w, t, psi, opt.povm).matrix, j), 1e-8);
  return checks.result();
}

SuiteResult verify_trotter_convergence(const VerifyOptions& /*opts*/) {
  Checks checks("trotter_convergence");
  const RabiModel model = RabiModel::three_level();
  const std::vector<double> truth{0.3, 0.7};
  const std::vector<double> hat{0.25, 0.65};
  const std::vector<double> delta{0.05, 0.05};
  const double t = 5.0;
  const ComplexMatrix target = model.propagator(delta, t);
  std::vector<double> errs;
  for (std::int64_t n : {250, 500, 1000, 2000}) {
    errs.push_back((controlled_evolution(model, truth, hat, t, n) - target).norm());
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    checks.add("error_halves_per_doubling", std::abs(errs[i] / errs[i + 1] - 2.0) / 2.0, 0.2);
  }
  const ComplexMatrix u = controlled_evolution(model, truth, hat, t, 1000);
  checks.add("controlled_unitarity", (u.adjoint() * u - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  checks.add("identity_when_exact",
             (controlled_evolution(model, truth, truth, t, 1000) - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(),
             1e-12);

  const double d = 0.3;
  const double exact = controlled_bound(1, t, d);
  const double quad = controlled_bound_quadratic(1, t, d);
  checks.add("controlled_bound_value", std::abs(exact - 0.044213), 1e-6);
  checks.add("quadratic_value", std::abs(quad - 0.04375), 1e-12);
  // Leading neglected term of the expansion is D^4 t^2 / (480 m).
  const double quartic = std::pow(d, 4) * t * t / 480.0;
  checks.add("quadratic_residual_quartic", std::abs(exact - quad) / quartic, 2.0);
  checks.add("zero_offset_limit", std::abs(controlled_bound(1, t, 0.0) - 1.0 / (t * t)), 1e-15);
  return checks.result();
}

SuiteResult verify_multilevel(const VerifyOptions& opts) {
  Checks checks("multilevel");
  const int lmax = 8;
  for (int l = 2; l <= lmax; ++l) {
    for (double t : {3.0, 5.0}) {
      const QfimResult q = multilevel_controlled_qfim(l, t);
      const RealMatrix target = t * t * RealMatrix::Identity(l, l);
      checks.add("qfim_eq_t2_identity", (q.matrix - target).cwiseAbs().maxCoeff(), 1e-10);
      checks.add("weak_commutation", q.commutation_residuals.cwiseAbs().maxCoeff(), 1e-12);
      const BoundReport b = multilevel_bounds(l, 1, t);
      checks.require("bound_ratio_eq_l", b.ratio == static_cast<double>(l));
      checks.add("bound_quotient_near_l", std::abs(b.separate / b.joint - l) / l,
                 4.0 * std::numeric_limits<double>::epsilon());
    }
  }
  // Independent check through finite differences and the computational measurement.
  const int l = opts.quick ? 3 : 5;
  const double t = 3.0;
  const RabiModel star = RabiModel::star(l);
  const RabiParameters zero(std::vector<double>(static_cast<std::size_t>(l), 0.0));
  const QuantumState hub = QuantumState::basis(star.dim(), 0);
  const RealMatrix target = t * t * RealMatrix::Identity(l, l);
  checks.add("fd_qfim_eq_t2_identity",
             (qfim_pure(state_derivatives_fd(star, zero, t, hub)).matrix - target).cwiseAbs().maxCoeff(), 1e-6);
  checks.add("computational_cfi_saturates",
             (cfi_from_povm(star, zero, t, hub, Povm::computational(star.dim())).matrix - target).cwiseAbs().maxCoeff(),
             1e-10);
  return checks.result();
}

SuiteResult verify_properties(const VerifyOptions& opts) {
  Checks checks("properties");
  RngStream rng = RngStream(opts.seed).split(8);
  const int n = opts.quick ? 30 : 200;

  for (int s = 0; s < n; ++s) {
    const Index dim = 2 + static_cast<Index>(s % 4);
    const ComplexMatrix h = random_hermitian(dim, rng);
    const QuantumState psi = random_state(dim, rng);
    const double t1 = 5.0 * rng.uniform();
    const double t2 = 5.0 * rng.uniform();
    const QuantumState out = evolve(h, t1 + t2, psi);
    checks.add("evolve_norm", std::abs(out.amplitudes().norm() - 1.0), 1e-12);
    checks.add("evolve_composition",
               (out.amplitudes() - evolve(h, t2, evolve(h, t1, psi)).amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
    const EigenSystem eig = hermitian_eig(h);
    checks.add("eig_reconstruction", (eig.reconstruct() - h).cwiseAbs().maxCoeff() / max_abs(h), 1e-10);
    checks.add("eig_orthonormal",
               (eig.eigenvectors.adjoint() * eig.eigenvectors - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff(),
               1e-10);
  }

  for (int s = 0; s < n; ++s) {
    const Point pt = random_point(rng);
    const double wp = pt.omega.omega_plus();
    const ParameterJacobian jac = parameter_jacobian(pt.omega[0], pt.omega[1]);
    const double th2 = jac.d_theta[0] * jac.d_theta[0] + jac.d_theta[1] * jac.d_theta[1];
    const double wp2 = jac.d_omega_plus[0] * jac.d_omega_plus[0] + jac.d_omega_plus[1] * jac.d_omega_plus[1];
    const double cross = jac.d_theta[0] * jac.d_omega_plus[0] + jac.d_theta[1] * jac.d_omega_plus[1];
    checks.add("jacobian_theta_norm", std::abs(th2 * 4.0 * wp * wp - 1.0), 1e-12);
    checks.add("jacobian_omega_plus_norm", std::abs(wp2 * 4.0 - 1.0), 1e-12);
    checks.add("jacobian_cross_term", std::abs(cross) / std::sqrt(th2 * wp2), 1e-12);
    checks.add("jacobian_determinant", std::abs(jac.determinant() * 4.0 * wp - 1.0), 1e-12);

    const ProbeCoefficients c = random_probe(rng);
    const ClosedFormCoefficients k = abc_coefficients(pmn_coefficients(c, wp, pt.t), c, pt.t);
    const double p2 = std::norm(k.p);
    const double t2 = pt.t * pt.t;
    checks.add("mn_norm_identity", std::abs(std::norm(k.m) + std::norm(k.n) - 2.0 * p2 * (1.0 - c.c0 * c.c0)),
               1e-12);
    const double scale = std::abs(k.a * k.b) + k.c * k.c;
    checks.add("ab_minus_c2_nonnegative", std::max(0.0, -(k.a * k.b - k.c * k.c)) / std::max(scale, 1e-300), 1e-9);
    checks.add("a_nonnegative", std::max(0.0, -k.a), 1e-12);
    checks.add("b_at_most_4t2", std::max(0.0, k.b - 4.0 * t2) / t2, 1e-12);
    checks.add("a_at_most_4p2", std::max(0.0, k.a - 4.0 * p2), 1e-12);

    // QFIM symmetric, PSD and consistent with the SLD form.
    const QuantumState psi = probe_state(pt.omega, c);
    const StateDerivatives d = state_derivatives_analytic(pt.omega, pt.t, psi);
    const QfimResult q = qfim_pure(d);
    checks.add("qfim_symmetric", (q.matrix - q.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(q.matrix, Eigen::EigenvaluesOnly);
    checks.add("qfim_psd", std::max(0.0, -es.eigenvalues().minCoeff()) / std::max(q.matrix.trace(), 1e-300), 1e-9);
    const ComplexMatrix rho = d.base.amplitudes() * d.base.amplitudes().adjoint();
    double sld_err = 0.0;
    double comm_err = 0.0;
    for (Index a = 0; a < 2; ++a) {
      for (Index b = 0; b < 2; ++b) {
        const ComplexMatrix la = sld_pure(d, a);
        const ComplexMatrix lb = sld_pure(d, b);
        const Complex anti = 0.5 * (rho * (la * lb + lb * la)).trace();
        sld_err = std::max(sld_err, std::abs(anti.real() - q.matrix(a, b)) / std::max(1.0, q.matrix.norm()));
        const Complex comm = (rho * (la * lb - lb * la)).trace();
        // Tr(rho [L_a, L_b]) = 8 i Im<d_a psi|d_b psi> under this SLD normalization.
        comm_err = std::max(comm_err, std::abs(comm - Complex(0.0, 8.0 * q.commutation_residuals(a, b))) /
                                          std::max(1.0, q.matrix.norm()));
      }
    }
    checks.add("sld_qfim_consistency", sld_err, 1e-10);
    checks.add("sld_commutator_residual", comm_err, 1e-10);

    // Reparameterization through (theta, Omega_+) with a five-point stencil.
    const double th = pt.omega.theta();
    const double h = 1e-2 / (1.0 + pt.t);
    auto at = [&](double theta, double w) {
      return output_state(RabiParameters(2.0 * w * std::sin(theta), 2.0 * w * std::cos(theta)), pt.t, psi)
          .amplitudes();
    };
    auto stencil = [&](double dth, double dw) {
      return ComplexVector((-at(th + 2 * dth, wp + 2 * dw) + 8.0 * at(th + dth, wp + dw) -
                            8.0 * at(th - dth, wp - dw) + at(th - 2 * dth, wp - 2 * dw)) /
                           (12.0 * h));
    };
    StateDerivatives polar{d.base, {stencil(h, 0.0), stencil(0.0, h)}, DerivativeMethod::finite_difference};
    const RealMatrix jp = qfim_pure(polar).matrix;
    RealMatrix g(2, 2);
    g << jac.d_theta[0], jac.d_theta[1], jac.d_omega_plus[0], jac.d_omega_plus[1];
    checks.add("reparameterization", rel_dev(g.transpose() * jp * g, q.matrix), 1e-8);

    // Measurement built from the derivatives is a valid POVM.
    const OptimalPovm opt = optimal_povm(d);
    ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
    double neg = 0.0;
    for (const ComplexMatrix& e : opt.povm.elements()) {
      sum += e;
      neg = std::max(neg, -hermitian_eig(e).eigenvalues.minCoeff());
    }
    checks.add("povm_completeness", (sum - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
    checks.add("povm_positivity", std::max(0.0, neg), 1e-10);
  }

  bool rejected = false;
  try {
    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    bad(1, 1) = -1e-9;
    ComplexMatrix rest = ComplexMatrix::Zero(2, 2);
    rest(1, 1) = 1.0 + 1e-9;
    Povm p({bad, rest});
  } catch (const ValidationError&) {
    rejected = true;
  }
  checks.require("povm_rejects_negative_element", rejected);

  // Determinism of every stochastic path.
  RngStream a(opts.seed);
  RngStream b(opts.seed);
  bool same = true;
  for (int i = 0; i < 1000; ++i) same = same && a.next_u64() == b.next_u64();
  checks.require("rng_determinism", same);
  const QuantumState plus = QuantumState::normalized(ComplexVector::Ones(3));
  RngStream r1(opts.seed);
  RngStream r2(opts.seed);
  checks.require("sampling_determinism", sample_measurement(plus, Povm::computational(3), 1000, r1) ==
                                             sample_measurement(plus, Povm::computational(3), 1000, r2));
  AdaptiveConfig cfg;
  cfg.rounds = 2;
  cfg.grid_points = 11;
  cfg.segments = 50;
  cfg.seed = opts.seed;
  const AdaptiveTrace t1 = adaptive_run(cfg);
  const AdaptiveTrace t2 = adaptive_run(cfg);
  bool trace_same = t1.estimates == t2.estimates && t1.normalized_inverse_variance == t2.normalized_inverse_variance;
  for (std::size_t i = 0; trace_same && i < t1.rounds.size(); ++i) trace_same = t1.rounds[i].counts == t2.rounds[i].counts;
  checks.require("adaptive_determinism", trace_same);
  return checks.result();
}

std::vector<SuiteResult> run_verification(const VerifyOptions& opts) {
  return {verify_closed_form_vs_fd(opts),   verify_random_probe_optimality(opts), verify_equality_conditions(opts),
          verify_singular_times(opts),      verify_saturation(opts),              verify_trotter_convergence(opts),
          verify_multilevel(opts),          verify_properties(opts)};
}

}  // namespace rabiest
