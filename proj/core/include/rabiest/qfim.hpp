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
 * Pure-state estimation machinery for the family |psi_W> = exp(-i H(W) t)|psi_in>.
 *
 * Normalization: the quantum Fisher information matrix is
 *   J_ij = 2(<d_i psi|d_j psi> + <d_j psi|d_i psi>) + 4 <d_i psi|psi><d_j psi|psi>,
 * i.e. 1/2 Tr(rho {L_i, L_j}) with L_i = 2(|d_i psi><psi| + |psi><d_i psi|).
 * Under this convention a single Rabi frequency probed from a hub level has
 * J = t^2.
 */
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rabiest/qcore.hpp"
#include "rabiest/rabi_models.hpp"

namespace rabiest {

enum class DerivativeMethod { analytic, spectral, finite_difference };

const char* to_string(DerivativeMethod m) noexcept;

/// |psi_W> together with the unnormalized partials |d_i psi_W>.
struct StateDerivatives {
  QuantumState base;
  std::vector<ComplexVector> partials;
  DerivativeMethod method = DerivativeMethod::analytic;

  [[nodiscard]] Index parameter_count() const noexcept { return static_cast<Index>(partials.size()); }
};

inline constexpr double kSingularConditionNumber = 1e12;

struct QfimResult {
  RealMatrix matrix;                 ///< p x p, symmetric
  RealMatrix commutation_residuals;  ///< Im <d_i psi|d_j psi>, antisymmetric
  bool singular = false;             ///< condition_number > kSingularConditionNumber
  double condition_number = 0.0;     ///< +inf when the smallest eigenvalue is <= 0
  /// det(J) = prod 4 R_ii^2 with X = QR and J = 4 X^T X, X the real embedding
  /// of the projected derivatives (I - |psi><psi|) d_i psi.
  double determinant = 0.0;
};

/// Classical Fisher information of a measurement plus notes about outcomes
/// whose contribution could not be evaluated.
struct CfiResult {
  RealMatrix matrix;
  std::vector<std::string> diagnostics;
};

/// exp(-i H(W) t)|psi_in>. The three-level model sums over its analytic
/// eigenbasis; other models (and W = 0) use the numeric spectral route.
QuantumState output_state(const RabiModel& model, const RabiParameters& omega, double t,
                          const QuantumState& psi_in);
QuantumState output_state(const RabiParameters& omega, double t, const QuantumState& psi_in);

/// Three-level derivatives written out in the {Phi_0, Phi_+, Phi_-} basis.
/// Throws SingularError when Omega_+ = 0.
StateDerivatives state_derivatives_analytic(const RabiParameters& omega, double t,
                                            const QuantumState& psi_in);

/// Exact derivative of exp(-i H t) for any model via the divided-difference
/// (Daleckii-Krein) formula in the eigenbasis of H. Handles degenerate spectra.
StateDerivatives state_derivatives_spectral(const RabiModel& model, const RabiParameters& omega, double t,
                                            const QuantumState& psi_in);

/// Central differences of `evolve` outputs, (psi(W + h e_i) - psi(W - h e_i)) / 2h,
/// without any phase alignment. The default step is h_i = 1e-5 (1 + |W_i|).
StateDerivatives state_derivatives_fd(const RabiModel& model, const RabiParameters& omega, double t,
                                      const QuantumState& psi_in, std::optional<double> step = std::nullopt);

/// Analytic for three-level with Omega_+ > 0, spectral otherwise.
StateDerivatives state_derivatives(const RabiModel& model, const RabiParameters& omega, double t,
                                   const QuantumState& psi_in);

/// Central differences of an arbitrary state family W -> |psi(W)>.
using StateFamily = std::function<ComplexVector(std::span<const double>)>;
StateDerivatives finite_difference_derivatives(const StateFamily& family, std::span<const double> omegas,
                                               std::span<const double> steps);

/// L_i = 2(|d_i psi><psi| + |psi><d_i psi|)
ComplexMatrix sld_pure(const StateDerivatives& derivs, Index i);

QfimResult qfim_pure(const StateDerivatives& derivs);

/// Rank-one QFIM at a singular time Omega_+ t = 2 n pi:
/// 4 t^2 (1 - c0^2 - (|c+|^2 - |c-|^2)^2) g g^T with g = dOmega_+/dW.
/// Throws ValidationError when |sin(Omega_+ t / 2)| exceeds the singular-time tolerance.
RealMatrix qfim_singular_form(const RabiParameters& omega, double t, const ProbeCoefficients& coeffs);

/// Classical Fisher information of p_x(W) = <psi_W|M_x|psi_W>.
///
/// Outcomes with p_x < kZeroProbability contribute the rank-one limit
/// 4 Re(conj(a_i) a_j), a_i = <g_x|d_i psi>, when M_x = |g_x><g_x|; any other
/// vanishing-probability element is dropped with a diagnostic.
CfiResult classical_fisher(const StateDerivatives& derivs, const Povm& povm);

/// classical_fisher evaluated at W + offset * u for a unit direction u
/// (the normalized all-ones vector when `direction` is empty). The POVM is
/// held fixed, so a measurement built at W can be probed slightly off its
/// design point.
CfiResult cfi_from_povm(const RabiModel& model, const RabiParameters& omega, double t,
                        const QuantumState& psi_in, const Povm& povm, double offset = 0.0,
                        std::span<const double> direction = {});

inline constexpr double kZeroProbability = 1e-12;

/// max_{i<j} |Im <d_i psi|d_j psi>|; zero for a single parameter.
double check_weak_commutation(const StateDerivatives& derivs);

}  // namespace rabiest
