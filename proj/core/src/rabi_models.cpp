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

#include "rabiest/rabi_models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rabiest/errors.hpp"

namespace rabiest {

RabiParameters::RabiParameters(std::vector<double> omegas) : omegas_(std::move(omegas)) {
  if (omegas_.empty()) throw ValidationError("at least one Rabi frequency is required");
  for (double w : omegas_) {
    if (!std::isfinite(w)) throw ValidationError("Rabi frequencies must be finite");
  }
}

double RabiParameters::omega_plus() const noexcept {
  double s = 0.0;
  for (double w : omegas_) s += w * w;
  return 0.5 * std::sqrt(s);
}

double RabiParameters::theta() const {
  if (omegas_.size() != 2) throw ValidationError("mixing angle is defined for two Rabi frequencies only");
  return std::atan2(omegas_[0], omegas_[1]);
}

// RabiModel ------------------------------------------------------------------

RabiModel RabiModel::three_level() { return RabiModel(Topology::three_level, 2); }

RabiModel RabiModel::star(Index leaves) {
  if (leaves < 1) throw ValidationError("star model needs at least one leaf level");
  return RabiModel(Topology::star, leaves);
}

Index RabiModel::leaf(Index i) const {
  if (i < 0 || i >= leaves_) throw ValidationError("parameter index out of range");
  if (topology_ == Topology::three_level) return i == 0 ? 0 : 2;
  return i + 1;
}

void RabiModel::check(std::span<const double> omegas) const {
  if (static_cast<Index>(omegas.size()) != leaves_) {
    throw ValidationError("model expects " + std::to_string(leaves_) + " Rabi frequencies, got " +
                          std::to_string(omegas.size()));
  }
}

ComplexMatrix RabiModel::hamiltonian(std::span<const double> omegas) const {
  check(omegas);
  ComplexMatrix h = ComplexMatrix::Zero(dim(), dim());
  for (Index i = 0; i < leaves_; ++i) {
    const Index a = hub();
    const Index b = leaf(i);
    h(a, b) += 0.5 * omegas[static_cast<std::size_t>(i)];
    h(b, a) += 0.5 * omegas[static_cast<std::size_t>(i)];
  }
  return h;
}

ComplexMatrix RabiModel::generator(Index i) const {
  ComplexMatrix g = ComplexMatrix::Zero(dim(), dim());
  g(hub(), leaf(i)) = 0.5;
  g(leaf(i), hub()) = 0.5;
  return g;
}

ComplexMatrix RabiModel::propagator(std::span<const double> omegas, double t) const {
  check(omegas);
  ComplexMatrix u = ComplexMatrix::Identity(dim(), dim());
  double norm2 = 0.0;
  for (double w : omegas) norm2 += w * w;
  if (norm2 == 0.0) return u;
  const double r = std::sqrt(norm2);
  ComplexVector bright = ComplexVector::Zero(dim());
  for (Index i = 0; i < leaves_; ++i) bright(leaf(i)) = omegas[static_cast<std::size_t>(i)] / r;
  const double c = std::cos(0.5 * r * t);
  const double s = std::sin(0.5 * r * t);
  const Index h = hub();
  // I + (c - 1)(P_hub + P_bright) - i s (|hub><bright| + |bright><hub|)
  u(h, h) = c;
  u.noalias() += (c - 1.0) * bright * bright.adjoint();
  for (Index k = 0; k < dim(); ++k) {
    u(h, k) += Complex(0.0, -s) * std::conj(bright(k));
    u(k, h) += Complex(0.0, -s) * bright(k);
  }
  return u;
}

// Three-level system ---------------------------------------------------------

ComplexMatrix three_level_hamiltonian(double omega1, double omega2) {
  const std::array<double, 2> w{omega1, omega2};
  return RabiModel::three_level().hamiltonian(w);
}

ThreeLevelBasis three_level_basis(double omega1, double omega2) {
  const RabiParameters p(omega1, omega2);
  const double wp = p.omega_plus();
  if (!(wp > 0.0)) {
    throw SingularError("three-level spectrum is fully degenerate at W = (0, 0); "
                        "the mixing angle is undefined, use hermitian_eig");
  }
  ThreeLevelBasis b;
  b.theta = p.theta();
  b.omega_plus = wp;
  const double s = std::sin(b.theta);
  const double c = std::cos(b.theta);
  const double r = std::numbers::sqrt2 / 2.0;
  b.phi0 = ComplexVector(3);
  b.phi0 << c, 0.0, -s;
  b.phi_plus = ComplexVector(3);
  b.phi_plus << r * s, r, r * c;
  b.phi_minus = ComplexVector(3);
  b.phi_minus << r * s, -r, r * c;
  return b;
}

EigenSystem three_level_eigensystem(double omega1, double omega2) {
  const ThreeLevelBasis b = three_level_basis(omega1, omega2);
  EigenSystem eig;
  eig.eigenvalues = RealVector(3);
  eig.eigenvalues << -b.omega_plus, 0.0, b.omega_plus;
  eig.eigenvectors = ComplexMatrix(3, 3);
  eig.eigenvectors.col(kMinusIndex) = b.phi_minus;
  eig.eigenvectors.col(kDarkIndex) = b.phi0;
  eig.eigenvectors.col(kPlusIndex) = b.phi_plus;
  return eig;
}

ProbeCoefficients ProbeCoefficients::from_state(const ThreeLevelBasis& basis, const QuantumState& psi) {
  if (psi.dim() != 3) throw ValidationError("three-level probe must have dimension 3");
  const ComplexVector& v = psi.amplitudes();
  const Complex a0 = basis.phi0.dot(v);
  Complex phase = 1.0;
  if (std::abs(a0) > 0.0) phase = std::conj(a0) / std::abs(a0);
  ProbeCoefficients c;
  c.c0 = std::abs(a0);
  c.c_plus = phase * basis.phi_plus.dot(v);
  c.c_minus = phase * basis.phi_minus.dot(v);
  return c;
}

QuantumState ProbeCoefficients::to_state(const ThreeLevelBasis& basis) const {
  validate();
  ComplexVector v = c0 * basis.phi0 + c_plus * basis.phi_plus + c_minus * basis.phi_minus;
  return QuantumState::normalized(std::move(v));
}

void ProbeCoefficients::validate() const {
  const double n2 = c0 * c0 + std::norm(c_plus) + std::norm(c_minus);
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTol) {
    throw ValidationError("probe coefficients are not normalized: sum |C|^2 = " + std::to_string(n2));
  }
}

ComplexMatrix star_hamiltonian(std::span<const double> omegas) {
  return RabiModel::star(static_cast<Index>(omegas.size())).hamiltonian(omegas);
}

bool is_singular_time(double omega_plus, double t) noexcept {
  return std::abs(std::sin(0.5 * omega_plus * t)) < kSingularTimeTol;
}

ParameterJacobian parameter_jacobian(double omega1, double omega2) {
  const double wp = RabiParameters(omega1, omega2).omega_plus();
  if (!(wp > 0.0)) throw SingularError("parameter Jacobian is singular at Omega_+ = 0");
  ParameterJacobian j;
  const double wp2 = 4.0 * wp * wp;
  j.d_theta = {omega2 / wp2, -omega1 / wp2};
  j.d_omega_plus = {omega1 / (4.0 * wp), omega2 / (4.0 * wp)};
  return j;
}

}  // namespace rabiest
