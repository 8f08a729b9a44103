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
 * Resonantly driven multi-level Hamiltonians under the rotating-wave
 * approximation.
 *
 * Two linkage topologies are modelled:
 *  - the three-level Lambda/ladder system, H = 1/2 [[0, W1, 0], [W1, 0, W2],
 *    [0, W2, 0]], whose shared level is |1>;
 *  - the (l+1)-level star, H = sum_i W_i (|0><i| + |i><0|) / 2, whose shared
 *    level is |0>.
 * Both are "one hub coupled to leaves", which gives a closed-form propagator.
 */
#pragma once

#include <array>
#include <span>
#include <vector>

#include "rabiest/qcore.hpp"

namespace rabiest {

/// Rabi frequencies W_1..W_l (angular frequency). Any sign is accepted.
class RabiParameters {
 public:
  explicit RabiParameters(std::vector<double> omegas);
  RabiParameters(double omega1, double omega2) : RabiParameters(std::vector<double>{omega1, omega2}) {}

  [[nodiscard]] std::size_t size() const noexcept { return omegas_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return omegas_.at(i); }
  [[nodiscard]] std::span<const double> values() const noexcept { return omegas_; }

  /// 1/2 * sqrt(sum W_i^2), the positive eigenvalue of H.
  [[nodiscard]] double omega_plus() const noexcept;

  /// Mixing angle atan2(W1, W2) in (-pi, pi]; two-parameter models only.
  [[nodiscard]] double theta() const;

 private:
  std::vector<double> omegas_;
};

/// d(theta)/dW_i and d(Omega_+)/dW_i for the three-level system.
struct ParameterJacobian {
  std::array<double, 2> d_theta{};
  std::array<double, 2> d_omega_plus{};

  /// d1 theta * d2 Omega_+ - d2 theta * d1 Omega_+, equal to 1/(4 Omega_+).
  [[nodiscard]] double determinant() const noexcept {
    return d_theta[0] * d_omega_plus[1] - d_theta[1] * d_omega_plus[0];
  }
};

/// Analytic eigenbasis of the three-level Hamiltonian.
struct ThreeLevelBasis {
  double theta = 0.0;
  double omega_plus = 0.0;
  ComplexVector phi0;       ///< eigenvalue 0:         cos(theta)|0> - sin(theta)|2>
  ComplexVector phi_plus;   ///< eigenvalue +Omega_+: (sin(theta)|0> + |1> + cos(theta)|2>)/sqrt(2)
  ComplexVector phi_minus;  ///< eigenvalue -Omega_+: (sin(theta)|0> - |1> + cos(theta)|2>)/sqrt(2)
};

/// Expansion of a three-level probe in the eigenbasis,
/// |psi> = c0 |Phi_0> + c_plus |Phi_+> + c_minus |Phi_->, with c0 real.
struct ProbeCoefficients {
  double c0 = 0.0;
  Complex c_plus{};
  Complex c_minus{};

  /// Projects `psi` onto `basis` and removes the global phase so that c0 is
  /// real and non-negative.
  static ProbeCoefficients from_state(const ThreeLevelBasis& basis, const QuantumState& psi);
  [[nodiscard]] QuantumState to_state(const ThreeLevelBasis& basis) const;

  /// Throws ValidationError if |c|^2 deviates from 1 by more than kNormTol.
  void validate() const;
};

enum class Topology { three_level, star };

/// A driven hub-and-leaves model: which levels couple and how many
/// parameters it carries.
class RabiModel {
 public:
  static RabiModel three_level();
  static RabiModel star(Index leaves);

  [[nodiscard]] Topology topology() const noexcept { return topology_; }
  [[nodiscard]] Index parameter_count() const noexcept { return leaves_; }
  [[nodiscard]] Index dim() const noexcept { return leaves_ + 1; }
  /// Level shared by every coupling: |1> for three-level, |0> for the star.
  [[nodiscard]] Index hub() const noexcept { return topology_ == Topology::three_level ? 1 : 0; }
  /// Level driven by W_i (0-based i).
  [[nodiscard]] Index leaf(Index i) const;

  [[nodiscard]] ComplexMatrix hamiltonian(std::span<const double> omegas) const;
  /// dH/dW_i, independent of W.
  [[nodiscard]] ComplexMatrix generator(Index i) const;

  /// exp(-i H(W) t) in closed form: on span{hub, u} with u = sum W_i |leaf_i>/|W|
  /// the Hamiltonian acts as |W|/2 sigma_x, and as zero elsewhere.
  [[nodiscard]] ComplexMatrix propagator(std::span<const double> omegas, double t) const;

 private:
  RabiModel(Topology topology, Index leaves) : topology_(topology), leaves_(leaves) {}
  void check(std::span<const double> omegas) const;

  Topology topology_;
  Index leaves_;
};

ComplexMatrix three_level_hamiltonian(double omega1, double omega2);

/// Eigenpairs in ascending order: (-Omega_+, |Phi_->), (0, |Phi_0>),
/// (+Omega_+, |Phi_+>). Throws SingularError at W = (0, 0).
EigenSystem three_level_eigensystem(double omega1, double omega2);
ThreeLevelBasis three_level_basis(double omega1, double omega2);

inline constexpr Index kMinusIndex = 0;
inline constexpr Index kDarkIndex = 1;
inline constexpr Index kPlusIndex = 2;

ComplexMatrix star_hamiltonian(std::span<const double> omegas);

/// Below this |sin(Omega_+ t / 2)| the evolution is treated as the identity
/// (Omega_+ t = 2 n pi) and the closed forms lose every significant digit.
inline constexpr double kSingularTimeTol = 1e-9;

/// |sin(Omega_+ t / 2)| < kSingularTimeTol
bool is_singular_time(double omega_plus, double t) noexcept;

/// Throws SingularError when Omega_+ = 0.
ParameterJacobian parameter_jacobian(double omega1, double omega2);

}  // namespace rabiest
