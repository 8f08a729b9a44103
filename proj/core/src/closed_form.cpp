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

#include "rabiest/closed_form.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rabiest/errors.hpp"

namespace rabiest {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

void require_budget(std::int64_t m, double t) {
  if (m < 1) throw ValidationError("repetition count m must be >= 1");
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("evolution time must be positive");
}

void require_singular_free(double omega_plus, double t, const char* what) {
  if (is_singular_time(omega_plus, t)) {
    std::ostringstream os;
    os << what << ": Omega_+ t = " << omega_plus * t
       << " is a singular time (2 n pi); the QFIM is rank-deficient there";
    throw SingularError(os.str());
  }
}

void check_jacobian_identities(const ParameterJacobian& j, double omega_plus) {
  const double th2 = j.d_theta[0] * j.d_theta[0] + j.d_theta[1] * j.d_theta[1];
  const double wp2 = j.d_omega_plus[0] * j.d_omega_plus[0] + j.d_omega_plus[1] * j.d_omega_plus[1];
  const double cross = j.d_theta[0] * j.d_omega_plus[0] + j.d_theta[1] * j.d_omega_plus[1];
  const double th2_expected = 1.0 / (4.0 * omega_plus * omega_plus);
  const double tol = 1e-12;
  if (std::abs(th2 - th2_expected) > tol * th2_expected || std::abs(wp2 - 0.25) > tol * 0.25 ||
      std::abs(cross) > tol * std::sqrt(th2_expected * 0.25) ||
      std::abs(j.determinant() - 1.0 / (4.0 * omega_plus)) > tol / (4.0 * omega_plus)) {
    throw std::logic_error("parameter Jacobian violates the identities behind the Tr(J^-1) simplification");
  }
}

}  // namespace

ClosedFormCoefficients pmn_coefficients(const ProbeCoefficients& probe, double omega_plus, double t) {
  ClosedFormCoefficients k;
  k.p = std::polar(1.0, -omega_plus * t) - 1.0;
  const Complex cp = std::conj(probe.c_plus);
  const Complex cm = std::conj(probe.c_minus);
  k.m = cp * std::conj(k.p) + cm * k.p;
  k.n = cp * std::conj(k.p) - cm * k.p;
  return k;
}

ClosedFormCoefficients abc_coefficients(ClosedFormCoefficients k, const ProbeCoefficients& probe, double t) {
  const double p2 = std::norm(k.p);
  // |P| = 2|sin(Omega_+ t / 2)|
  if (0.5 * std::sqrt(p2) < kSingularTimeTol) {
    throw SingularError("P = 0 (singular time): A, B, C are undefined; use qfim_singular_form");
  }
  const double c0 = probe.c0;
  const double im_m = k.m.imag();
  const double re_mn = (k.m * std::conj(k.n)).real();
  k.a = -8.0 * c0 * c0 * im_m * im_m + 4.0 * c0 * c0 * p2 + 2.0 * std::norm(k.m);
  k.b = -4.0 * t * t * re_mn * re_mn / (p2 * p2) + 4.0 * t * t - 4.0 * c0 * c0 * t * t;
  k.c = -4.0 * kSqrt2 * c0 * im_m * re_mn / p2 * t + 2.0 * kSqrt2 * c0 * t * k.n.imag();
  k.has_abc = true;
  return k;
}

RealMatrix qfim_closed_form(const RabiParameters& omega, double t, const ProbeCoefficients& probe) {
  if (omega.size() != 2) throw ValidationError("closed-form QFIM needs two Rabi frequencies");
  probe.validate();
  const double wp = omega.omega_plus();
  if (!(wp > 0.0)) throw SingularError("closed-form QFIM requires Omega_+ > 0");
  require_singular_free(wp, t, "qfim_closed_form");
  const ClosedFormCoefficients k = abc_coefficients(pmn_coefficients(probe, wp, t), probe, t);
  const ParameterJacobian jac = parameter_jacobian(omega[0], omega[1]);
  RealMatrix j(2, 2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      j(a, b) = jac.d_theta[a] * jac.d_theta[b] * k.a + jac.d_omega_plus[a] * jac.d_omega_plus[b] * k.b +
                (jac.d_theta[a] * jac.d_omega_plus[b] + jac.d_theta[b] * jac.d_omega_plus[a]) * k.c;
    }
  }
  return j;
}

double trace_inverse_closed_form(const RabiParameters& omega, double t, const ProbeCoefficients& probe) {
  if (omega.size() != 2) throw ValidationError("closed-form Tr(J^-1) needs two Rabi frequencies");
  probe.validate();
  const double wp = omega.omega_plus();
  if (!(wp > 0.0)) throw SingularError("closed-form Tr(J^-1) requires Omega_+ > 0");
  require_singular_free(wp, t, "trace_inverse_closed_form");
  check_jacobian_identities(parameter_jacobian(omega[0], omega[1]), wp);
  const ClosedFormCoefficients k = abc_coefficients(pmn_coefficients(probe, wp, t), probe, t);
  const double det = k.a * k.b - k.c * k.c;
  if (!(det > 1e-12 * (std::abs(k.a * k.b) + k.c * k.c))) {
    throw SingularError("QFIM is singular for this probe (AB - C^2 <= 0)");
  }
  return (4.0 * k.a + 4.0 * wp * wp * k.b) / det;
}

ProbeCoefficients optimal_probe_coefficients(double omega_plus, double t) {
  require_singular_free(omega_plus, t, "optimal_probe_state");
  const Complex p = std::polar(1.0, -omega_plus * t) - 1.0;
  const double ap = std::abs(p);
  ProbeCoefficients c;
  c.c0 = 0.0;
  c.c_plus = std::conj(p) / (kSqrt2 * ap);
  c.c_minus = p / (kSqrt2 * ap);
  return c;
}

QuantumState optimal_probe_state(const RabiParameters& omega, double t) {
  if (omega.size() != 2) throw ValidationError("optimal probe is defined for two Rabi frequencies");
  const ThreeLevelBasis basis = three_level_basis(omega[0], omega[1]);
  return optimal_probe_coefficients(basis.omega_plus, t).to_state(basis);
}

double min_trace_inverse(double omega_plus, double t) {
  if (!(t > 0.0)) throw ValidationError("evolution time must be positive");
  require_singular_free(omega_plus, t, "min_trace_inverse");
  const double s = std::sin(0.5 * omega_plus * t);
  return 1.0 / (t * t) + omega_plus * omega_plus / (4.0 * s * s);
}

OptimalPovm optimal_povm(const StateDerivatives& derivs) {
  std::vector<ComplexVector> sequence;
  sequence.push_back(derivs.base.amplitudes());
  for (const ComplexVector& d : derivs.partials) sequence.push_back(d);

  OptimalPovm out{Povm::computational(derivs.base.dim()), {}};
  std::vector<ComplexVector> gammas;
  try {
    gammas = orthonormalize(sequence);
  } catch (const RankDeficiencyError& e) {
    gammas = orthonormalize(std::span<const ComplexVector>(sequence).first(e.index()));
    std::ostringstream os;
    os << "derivative " << e.index() << " lies in the span of the previous vectors; "
       << "measurement reduced to " << gammas.size() + 1 << " elements";
    out.diagnostics.push_back(os.str());
  }
  const Index dim = derivs.base.dim();
  std::vector<ComplexMatrix> elements;
  ComplexMatrix rest = ComplexMatrix::Identity(dim, dim);
  for (const ComplexVector& g : gammas) {
    ComplexMatrix proj = g * g.adjoint();
    rest -= proj;
    elements.push_back(std::move(proj));
  }
  rest = 0.5 * (rest + rest.adjoint());
  elements.push_back(std::move(rest));
  out.povm = Povm(std::move(elements));
  return out;
}

double qfi_single(const QuantumState& psi_in, const ComplexMatrix& h1, double t) {
  require_hermitian(h1, "generator");
  if (h1.rows() != psi_in.dim()) throw ValidationError("generator and state dimensions differ");
  const ComplexVector& v = psi_in.amplitudes();
  const ComplexVector hv = h1 * v;
  const double mean = v.dot(hv).real();
  const double second = hv.squaredNorm();
  return 4.0 * t * t * (second - mean * mean);
}

QuantumState single_optimal_probe(const ComplexMatrix& h1) {
  const EigenSystem eig = hermitian_eig(h1);
  const Index n = eig.dim();
  if (n < 2) throw SingularError("a one-dimensional generator has no optimal superposition");
  const double scale = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
  const double tol = kHermitianTol * scale;
  Index low_mult = 1;
  while (low_mult < n && eig.eigenvalues(low_mult) - eig.eigenvalues(0) <= tol) ++low_mult;
  Index high_mult = 1;
  while (high_mult < n && eig.eigenvalues(n - 1) - eig.eigenvalues(n - 1 - high_mult) <= tol) ++high_mult;
  if (low_mult > 1 || high_mult > 1 || low_mult == n) {
    std::ostringstream os;
    os << "extremal eigenvalues are degenerate (multiplicity " << low_mult << " at lambda_min, "
       << high_mult << " at lambda_max)";
    throw SingularError(os.str());
  }
  auto phased = [](ComplexVector v) {
    for (Index k = 0; k < v.size(); ++k) {
      if (std::abs(v(k)) > 1e-12) {
        v *= std::conj(v(k)) / std::abs(v(k));
        break;
      }
    }
    return v;
  };
  return QuantumState::normalized(phased(eig.eigenvectors.col(0)) + phased(eig.eigenvectors.col(n - 1)));
}

// Bounds ---------------------------------------------------------------------

double joint_bound(std::int64_t m, double t, double omega_plus) {
  require_budget(m, t);
  require_singular_free(omega_plus, t, "joint_bound");
  const double md = static_cast<double>(m);
  const double s = std::sin(0.5 * omega_plus * t);
  return 1.0 / (2.0 * md * t * t) + omega_plus * omega_plus / (8.0 * md * s * s);
}

double separate_bound(std::int64_t m, double t, std::int64_t l) {
  require_budget(m, t);
  if (l < 1) throw ValidationError("parameter count l must be >= 1");
  return static_cast<double>(l) / (static_cast<double>(m) * t * t);
}

double controlled_bound(std::int64_t m, double t, double delta_norm) {
  require_budget(m, t);
  if (!std::isfinite(delta_norm)) throw ValidationError("estimation error must be finite");
  const double md = static_cast<double>(m);
  const double x = 0.5 * std::abs(delta_norm) * t;
  // D^2 / (8 m sin^2 x) = (x / sin x)^2 / (2 m t^2)
  double ratio2 = 1.0;
  if (x > 1e-4) {
    const double s = std::sin(x);
    if (std::abs(s) < kSingularTimeTol) return std::numeric_limits<double>::infinity();
    ratio2 = (x / s) * (x / s);
  } else {
    ratio2 = 1.0 + x * x / 3.0;
  }
  return (1.0 + ratio2) / (2.0 * md * t * t);
}

double controlled_bound(std::int64_t m, double t, std::span<const double> delta_omega) {
  double n2 = 0.0;
  for (double d : delta_omega) n2 += d * d;
  return controlled_bound(m, t, std::sqrt(n2));
}

double controlled_bound_quadratic(std::int64_t m, double t, double delta_norm) {
  require_budget(m, t);
  const double md = static_cast<double>(m);
  return 1.0 / (md * t * t) + delta_norm * delta_norm / (24.0 * md);
}

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::joint_wins:
      return "joint-wins";
    case Regime::separate_wins:
      return "separate-wins";
    case Regime::tie:
      return "tie";
  }
  return "unknown";
}

namespace {
Regime classify(double joint, double separate) {
  if (std::abs(joint - separate) <= 1e-12 * std::max(joint, separate)) return Regime::tie;
  return joint < separate ? Regime::joint_wins : Regime::separate_wins;
}
}  // namespace

BoundReport compare_bounds(std::int64_t m, double t, double omega_plus) {
  BoundReport r;
  r.joint = joint_bound(m, t, omega_plus);
  r.separate = separate_bound(m, t, 2);
  r.controlled = controlled_bound(m, t, 0.0);
  r.ratio = r.separate / r.joint;
  r.regime = classify(r.joint, r.separate);
  return r;
}

BoundReport multilevel_bounds(std::int64_t l, std::int64_t m, double t) {
  BoundReport r;
  r.separate = separate_bound(m, t, l);
  r.joint = 1.0 / (static_cast<double>(m) * t * t);
  r.controlled = r.joint;
  r.ratio = static_cast<double>(l);
  r.regime = classify(r.joint, r.separate);
  return r;
}

double crossover_phase() {
  const double k = 2.0 * std::sqrt(3.0);
  auto f = [k](double x) { return x - k * std::sin(0.5 * x); };
  double lo = std::numbers::pi;
  double hi = 4.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double crossover_time(double omega_plus) {
  if (!(omega_plus > 0.0)) throw ValidationError("crossover time requires Omega_+ > 0");
  return crossover_phase() / omega_plus;
}

ProbeCoefficients random_probe(RngStream& rng) {
  Eigen::Vector3cd z;
  for (int k = 0; k < 3; ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    z(k) = Complex(re, im);
  }
  z /= z.norm();
  Complex phase = 1.0;
  if (std::abs(z(0)) > 0.0) phase = std::conj(z(0)) / std::abs(z(0));
  ProbeCoefficients c;
  c.c0 = std::abs(z(0));
  c.c_plus = phase * z(1);
  c.c_minus = phase * z(2);
  return c;
}

}  // namespace rabiest
