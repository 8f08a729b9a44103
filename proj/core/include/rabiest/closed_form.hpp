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
 * Closed-form results for jointly estimating the two Rabi frequencies of a
 * three-level system, plus the single-parameter, adaptively controlled and
 * multi-level precision bounds they are compared against.
 *
 * Budget convention for every bound: separate estimation repeats m
 * experiments per parameter; joint estimation runs the same total (2m, or
 * l*m for l parameters). Bounds are on the total variance sum_i Var(W_i).
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rabiest/qcore.hpp"
#include "rabiest/qfim.hpp"
#include "rabiest/rabi_models.hpp"
#include "rabiest/rng.hpp"

namespace rabiest {

/// P = exp(-i Omega_+ t) - 1, M = conj(c+) conj(P) + conj(c-) P,
/// N = conj(c+) conj(P) - conj(c-) P, and the real A, B, C that assemble
/// the QFIM as J_ij = dth_i dth_j A + dwp_i dwp_j B + (dth_i dwp_j + dth_j dwp_i) C.
struct ClosedFormCoefficients {
  Complex p{};
  Complex m{};
  Complex n{};
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  bool has_abc = false;
};

ClosedFormCoefficients pmn_coefficients(const ProbeCoefficients& probe, double omega_plus, double t);

/// Fills A, B, C. Throws SingularError at singular times (|P| ~ 0); use
/// qfim_singular_form there.
ClosedFormCoefficients abc_coefficients(ClosedFormCoefficients pmn, const ProbeCoefficients& probe, double t);

RealMatrix qfim_closed_form(const RabiParameters& omega, double t, const ProbeCoefficients& probe);

/// Tr(J^-1) = (4A + 4 Omega_+^2 B) / (AB - C^2). Checks the Jacobian
/// identities the simplification depends on before using it.
double trace_inverse_closed_form(const RabiParameters& omega, double t, const ProbeCoefficients& probe);

/// c0 = 0, c+ = conj(P) / (sqrt(2)|P|), c- = P / (sqrt(2)|P|).
ProbeCoefficients optimal_probe_coefficients(double omega_plus, double t);
QuantumState optimal_probe_state(const RabiParameters& omega, double t);

/// 1/t^2 + Omega_+^2 / (4 sin^2(Omega_+ t / 2)); SingularError at singular times.
double min_trace_inverse(double omega_plus, double t);

struct OptimalPovm {
  Povm povm;
  std::vector<std::string> diagnostics;
};

/// Projectors onto the Gram-Schmidt sequence psi, d_1 psi, d_2 psi, ... plus
/// the remainder I - sum. If some d_k psi is dependent on its predecessors the
/// sequence stops there and a diagnostic records it.
OptimalPovm optimal_povm(const StateDerivatives& derivs);

/// 4 t^2 (<H1^2> - <H1>^2)
double qfi_single(const QuantumState& psi_in, const ComplexMatrix& h1, double t);

/// (|lambda_min> + |lambda_max>) / sqrt(2), each eigenvector phased so its
/// first non-zero component is real and positive.
QuantumState single_optimal_probe(const ComplexMatrix& h1);

/// Joint estimation over 2m experiments: 1/(2 m t^2) + Omega_+^2 / (8 m sin^2(Omega_+ t/2)).
double joint_bound(std::int64_t m, double t, double omega_plus);

/// Separate estimation, m experiments for each of l parameters: l / (m t^2).
double separate_bound(std::int64_t m, double t, std::int64_t l = 2);

/// Controlled joint estimation with residual error dW = W - W_hat, written
/// with D = |dW|: 1/(2 m t^2) + D^2 / (8 m sin^2(D t / 2)). The D -> 0 limit
/// 1/(m t^2) is built in; returns +inf where sin(D t / 2) = 0 with D > 0.
double controlled_bound(std::int64_t m, double t, std::span<const double> delta_omega);
double controlled_bound(std::int64_t m, double t, double delta_norm);

/// Second-order expansion 1/(m t^2) + D^2 / (24 m).
double controlled_bound_quadratic(std::int64_t m, double t, double delta_norm);

enum class Regime { joint_wins, separate_wins, tie };
const char* to_string(Regime r) noexcept;

struct BoundReport {
  double joint = 0.0;
  double separate = 0.0;
  double controlled = 0.0;
  /// separate / joint, simplified algebraically where the closed forms allow it.
  double ratio = 0.0;
  Regime regime = Regime::tie;
};

/// Two-parameter comparison at (m, t, Omega_+); controlled is the dW = 0 value.
BoundReport compare_bounds(std::int64_t m, double t, double omega_plus);

/// l-parameter star with optimal control: joint = controlled = 1/(m t^2),
/// separate = l/(m t^2).
BoundReport multilevel_bounds(std::int64_t l, std::int64_t m, double t);

/// Smallest x > 0 with joint_bound = separate_bound, i.e. x = 2 sqrt(3) sin(x/2)
/// in x = Omega_+ t; bisection on [pi, 4] to 1e-10.
double crossover_phase();
/// crossover_phase() / Omega_+
double crossover_time(double omega_plus);

/// Random probe: six standard normals form a complex 3-vector in the
/// eigenbasis, normalized, with the global phase chosen so c0 >= 0.
ProbeCoefficients random_probe(RngStream& rng);

}  // namespace rabiest
