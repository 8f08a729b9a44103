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

#include "rabiest/qfim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rabiest/errors.hpp"

namespace rabiest {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_dims(const RabiModel& model, const RabiParameters& omega, const QuantumState& psi) {
  if (static_cast<Index>(omega.size()) != model.parameter_count()) {
    throw ValidationError("parameter count does not match the model");
  }
  if (psi.dim() != model.dim()) throw ValidationError("probe dimension does not match the model");
}

// sin(x)/x with the removable singularity filled in.
double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

const char* to_string(DerivativeMethod m) noexcept {
  switch (m) {
    case DerivativeMethod::analytic:
      return "analytic";
    case DerivativeMethod::spectral:
      return "spectral";
    case DerivativeMethod::finite_difference:
      return "finite-difference";
  }
  return "unknown";
}

// Output states --------------------------------------------------------------

QuantumState output_state(const RabiModel& model, const RabiParameters& omega, double t,
                          const QuantumState& psi_in) {
  require_dims(model, omega, psi_in);
  if (model.topology() == Topology::three_level && omega.omega_plus() > 0.0) {
    const ThreeLevelBasis b = three_level_basis(omega[0], omega[1]);
    const ComplexVector& v = psi_in.amplitudes();
    const Complex c0 = b.phi0.dot(v);
    const Complex cp = b.phi_plus.dot(v);
    const Complex cm = b.phi_minus.dot(v);
    const Complex ep = std::polar(1.0, -b.omega_plus * t);
    ComplexVector out = c0 * b.phi0 + cp * ep * b.phi_plus + cm * std::conj(ep) * b.phi_minus;
    return QuantumState::normalized(std::move(out));
  }
  return evolve(model.hamiltonian(omega.values()), t, psi_in);
}

QuantumState output_state(const RabiParameters& omega, double t, const QuantumState& psi_in) {
  return output_state(RabiModel::three_level(), omega, t, psi_in);
}

// Derivatives ----------------------------------------------------------------

StateDerivatives state_derivatives_analytic(const RabiParameters& omega, double t,
                                            const QuantumState& psi_in) {
  const RabiModel model = RabiModel::three_level();
  require_dims(model, omega, psi_in);
  const ThreeLevelBasis b = three_level_basis(omega[0], omega[1]);
  const ParameterJacobian jac = parameter_jacobian(omega[0], omega[1]);

  const ComplexVector& v = psi_in.amplitudes();
  const Complex c0 = b.phi0.dot(v);
  const Complex cp = b.phi_plus.dot(v);
  const Complex cm = b.phi_minus.dot(v);
  const Complex ep = std::polar(1.0, -b.omega_plus * t);  // exp(-i Omega_+ t)
  const Complex em = std::conj(ep);                         // exp(-i Omega_- t)
  const double r = std::numbers::sqrt2 / 2.0;

  StateDerivatives d{output_state(model, omega, t, psi_in), {}, DerivativeMethod::analytic};
  for (std::size_t i = 0; i < 2; ++i) {
    const double dth = jac.d_theta[i];
    const double dwp = jac.d_omega_plus[i];
    const Complex a0 = r * dth * (cp * (ep - 1.0) + cm * (em - 1.0));
    const Complex ap = -kI * t * cp * dwp * ep + r * c0 * dth * (ep - 1.0);
    // d_i Omega_- = -d_i Omega_+
    const Complex am = kI * t * cm * dwp * em + r * c0 * dth * (em - 1.0);
    d.partials.push_back(a0 * b.phi0 + ap * b.phi_plus + am * b.phi_minus);
  }
  return d;
}

StateDerivatives state_derivatives_spectral(const RabiModel& model, const RabiParameters& omega, double t,
                                            const QuantumState& psi_in) {
  require_dims(model, omega, psi_in);
  const EigenSystem eig = hermitian_eig(model.hamiltonian(omega.values()));
  const Index n = eig.dim();
  const ComplexMatrix& vecs = eig.eigenvectors;
  const ComplexVector coeffs = vecs.adjoint() * psi_in.amplitudes();

  // Divided differences of exp(-i lambda t):
  // F_mn = -i t exp(-i (l_m + l_n) t / 2) sinc((l_m - l_n) t / 2).
  ComplexMatrix f(n, n);
  for (Index m = 0; m < n; ++m) {
    for (Index k = 0; k < n; ++k) {
      const double lm = eig.eigenvalues(m);
      const double lk = eig.eigenvalues(k);
      f(m, k) = -kI * t * std::polar(1.0, -0.5 * (lm + lk) * t) * sinc(0.5 * (lm - lk) * t);
    }
  }
  ComplexVector evolved = coeffs;
  for (Index m = 0; m < n; ++m) evolved(m) *= std::polar(1.0, -eig.eigenvalues(m) * t);

  StateDerivatives d{QuantumState::normalized(vecs * evolved), {}, DerivativeMethod::spectral};
  for (Index i = 0; i < model.parameter_count(); ++i) {
    const ComplexMatrix g = vecs.adjoint() * model.generator(i) * vecs;
    const ComplexMatrix du = g.cwiseProduct(f);
    d.partials.push_back(vecs * (du * coeffs));
  }
  return d;
}

StateDerivatives finite_difference_derivatives(const StateFamily& family, std::span<const double> omegas,
                                               std::span<const double> steps) {
  if (steps.size() != omegas.size()) throw ValidationError("one finite-difference step per parameter");
  std::vector<double> w(omegas.begin(), omegas.end());
  StateDerivatives d{QuantumState::normalized(family(w)), {}, DerivativeMethod::finite_difference};
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double h = steps[i];
    if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
    w[i] = omegas[i] + h;
    const ComplexVector up = family(w);
    w[i] = omegas[i] - h;
    const ComplexVector down = family(w);
    w[i] = omegas[i];
    d.partials.push_back((up - down) / (2.0 * h));
  }
  return d;
}

StateDerivatives state_derivatives_fd(const RabiModel& model, const RabiParameters& omega, double t,
                                      const QuantumState& psi_in, std::optional<double> step) {
  require_dims(model, omega, psi_in);
  std::vector<double> steps(omega.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    steps[i] = step.has_value() ? *step : 1e-5 * (1.0 + std::abs(omega[i]));
  }
  const StateFamily family = [&](std::span<const double> w) {
    return evolve(model.hamiltonian(w), t, psi_in).amplitudes();
  };
  return finite_difference_derivatives(family, omega.values(), steps);
}

StateDerivatives state_derivatives(const RabiModel& model, const RabiParameters& omega, double t,
                                   const QuantumState& psi_in) {
  if (model.topology() == Topology::three_level && omega.omega_plus() > 0.0) {
    return state_derivatives_analytic(omega, t, psi_in);
  }
  return state_derivatives_spectral(model, omega, t, psi_in);
}

// SLD and QFIM ---------------------------------------------------------------

ComplexMatrix sld_pure(const StateDerivatives& derivs, Index i) {
  if (i < 0 || i >= derivs.parameter_count()) throw ValidationError("SLD index out of range");
  const ComplexVector& psi = derivs.base.amplitudes();
  const ComplexVector& dpsi = derivs.partials[static_cast<std::size_t>(i)];
  return 2.0 * (dpsi * psi.adjoint() + psi * dpsi.adjoint());
}

QfimResult qfim_pure(const StateDerivatives& derivs) {
  const Index p = derivs.parameter_count();
  const ComplexVector& psi = derivs.base.amplitudes();
  QfimResult r;
  r.matrix = RealMatrix::Zero(p, p);
  r.commutation_residuals = RealMatrix::Zero(p, p);
  std::vector<Complex> overlap(static_cast<std::size_t>(p));  // <d_i psi|psi>
  for (Index i = 0; i < p; ++i) overlap[static_cast<std::size_t>(i)] = derivs.partials[static_cast<std::size_t>(i)].dot(psi);

  for (Index i = 0; i < p; ++i) {
    for (Index j = i; j < p; ++j) {
      const auto si = static_cast<std::size_t>(i);
      const auto sj = static_cast<std::size_t>(j);
      const Complex gij = derivs.partials[si].dot(derivs.partials[sj]);
      const Complex gji = derivs.partials[sj].dot(derivs.partials[si]);
      const double jij = (2.0 * (gij + gji) + 4.0 * overlap[si] * overlap[sj]).real();
      r.matrix(i, j) = jij;
      r.matrix(j, i) = jij;
      r.commutation_residuals(i, j) = gij.imag();
      r.commutation_residuals(j, i) = -gij.imag();
    }
  }
  // J = 4 X^T X with X the real embedding of (I - |psi><psi|) d_i psi.
  const Index d = psi.size();
  RealMatrix x(2 * d, p);
  for (Index i = 0; i < p; ++i) {
    const ComplexVector& di = derivs.partials[static_cast<std::size_t>(i)];
    const ComplexVector proj = di - psi * psi.dot(di);
    x.col(i).head(d) = proj.real();
    x.col(i).tail(d) = proj.imag();
  }
  if (2 * d >= p) {
    const Eigen::HouseholderQR<RealMatrix> qr(x);
    double det = 1.0;
    for (Index i = 0; i < p; ++i) det *= 4.0 * qr.matrixQR()(i, i) * qr.matrixQR()(i, i);
    r.determinant = det;
  }

  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(r.matrix, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  r.condition_number = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  r.singular = !(r.condition_number <= kSingularConditionNumber);
  return r;
}

RealMatrix qfim_singular_form(const RabiParameters& omega, double t, const ProbeCoefficients& coeffs) {
  if (omega.size() != 2) throw ValidationError("singular form is defined for the three-level model");
  const double wp = omega.omega_plus();
  if (!is_singular_time(wp, t)) {
    std::ostringstream os;
    os << "Omega_+ t = " << wp * t << " is not a singular time (2 n pi)";
    throw ValidationError(os.str());
  }
  coeffs.validate();
  const ParameterJacobian jac = parameter_jacobian(omega[0], omega[1]);
  const double imbalance = std::norm(coeffs.c_plus) - std::norm(coeffs.c_minus);
  const double prefactor = 4.0 * t * t * (1.0 - coeffs.c0 * coeffs.c0 - imbalance * imbalance);
  Eigen::Vector2d g(jac.d_omega_plus[0], jac.d_omega_plus[1]);
  return prefactor * (g * g.transpose());
}

// Classical Fisher information ------------------------------------------------

CfiResult classical_fisher(const StateDerivatives& derivs, const Povm& povm) {
  const Index p = derivs.parameter_count();
  const ComplexVector& psi = derivs.base.amplitudes();
  if (psi.size() != povm.dim()) throw ValidationError("state and POVM dimensions differ");
  CfiResult out;
  out.matrix = RealMatrix::Zero(p, p);
  for (std::size_t x = 0; x < povm.size(); ++x) {
    const ComplexMatrix& m = povm.element(x);
    const ComplexVector mpsi = m * psi;
    const double prob = psi.dot(mpsi).real();
    if (prob >= kZeroProbability) {
      RealVector g(p);
      // d_i p = 2 Re <psi|M|d_i psi>, using M Hermitian.
      for (Index i = 0; i < p; ++i) g(i) = 2.0 * mpsi.dot(derivs.partials[static_cast<std::size_t>(i)]).real();
      out.matrix += g * g.transpose() / prob;
      continue;
    }
    if (const auto& ray = povm.ray(x)) {
      ComplexVector a(p);
      for (Index i = 0; i < p; ++i) a(i) = ray->dot(derivs.partials[static_cast<std::size_t>(i)]);
      out.matrix += 4.0 * (a.conjugate() * a.transpose()).real();
      continue;
    }
    if (max_abs(m) < 1e-12) continue;  // null element: no information
    std::ostringstream os;
    os << "outcome " << x << " has probability " << prob
       << " and is not a rank-1 projector; contribution dropped";
    out.diagnostics.push_back(os.str());
  }
  return out;
}

CfiResult cfi_from_povm(const RabiModel& model, const RabiParameters& omega, double t,
                        const QuantumState& psi_in, const Povm& povm, double offset,
                        std::span<const double> direction) {
  if (!(offset >= 0.0)) throw ValidationError("offset must be non-negative");
  std::vector<double> w(omega.values().begin(), omega.values().end());
  if (offset > 0.0) {
    std::vector<double> u(w.size(), 1.0);
    if (!direction.empty()) {
      if (direction.size() != w.size()) throw ValidationError("direction must have one entry per parameter");
      u.assign(direction.begin(), direction.end());
    }
    double n = 0.0;
    for (double c : u) n += c * c;
    n = std::sqrt(n);
    if (!(n > 0.0)) throw ValidationError("direction must be non-zero");
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += offset * u[i] / n;
  }
  const RabiParameters shifted(std::move(w));
  return classical_fisher(state_derivatives(model, shifted, t, psi_in), povm);
}

double check_weak_commutation(const StateDerivatives& derivs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < derivs.partials.size(); ++i) {
    for (std::size_t j = i + 1; j < derivs.partials.size(); ++j) {
      worst = std::max(worst, std::abs(derivs.partials[i].dot(derivs.partials[j]).imag()));
    }
  }
  return worst;
}

}  // namespace rabiest
