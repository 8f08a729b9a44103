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
 * Dense complex linear algebra for small Hilbert spaces: pure states,
 * spectral decompositions, unitary evolution, POVMs and seeded sampling.
 *
 * Units follow hbar = 1: a Hamiltonian is in angular-frequency units and
 * U(t) = exp(-i H t).
 */
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rabiest/rng.hpp"

namespace rabiest {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-10;  // relative to max-abs norm
inline constexpr double kNormTol = 1e-12;
inline constexpr double kPovmTol = 1e-10;
inline constexpr double kIndependenceTol = 1e-10;
inline constexpr double kProbabilitySumTol = 1e-9;

/// Largest entry modulus.
double max_abs(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& h, double rel_tol = kHermitianTol);

/// Throws ValidationError unless `h` is square, finite and Hermitian within
/// rel_tol * max_abs(h).
void require_hermitian(const ComplexMatrix& h, std::string_view what = "matrix");

/// Unit-norm amplitude vector.
class QuantumState {
 public:
  /// Throws ValidationError if the norm deviates from 1 by more than kNormTol.
  explicit QuantumState(ComplexVector amplitudes);

  /// Rescales `v` to unit norm; throws on a zero or non-finite vector.
  static QuantumState normalized(ComplexVector v);
  static QuantumState basis(Index dim, Index k);

  [[nodiscard]] Index dim() const noexcept { return amps_.size(); }
  [[nodiscard]] const ComplexVector& amplitudes() const noexcept { return amps_; }
  [[nodiscard]] Complex operator[](Index k) const { return amps_(k); }

  /// <this|other>
  [[nodiscard]] Complex inner(const QuantumState& other) const;

 private:
  ComplexVector amps_;
};

/// 1 - |<a|b>| for unit vectors; zero iff a and b differ by a global phase.
double phase_distance(const ComplexVector& a, const ComplexVector& b);

struct EigenSystem {
  RealVector eigenvalues;     ///< ascending
  ComplexMatrix eigenvectors;  ///< column k belongs to eigenvalues(k)

  [[nodiscard]] Index dim() const noexcept { return eigenvalues.size(); }
  [[nodiscard]] QuantumState vector(Index k) const;
  /// sum_k lambda_k |v_k><v_k|
  [[nodiscard]] ComplexMatrix reconstruct() const;
};

EigenSystem hermitian_eig(const ComplexMatrix& h);

/// exp(-i H t) by spectral decomposition.
ComplexMatrix propagator(const ComplexMatrix& h, double t);
ComplexMatrix propagator(const EigenSystem& eig, double t);

/// exp(-i H t)|psi>.
QuantumState evolve(const ComplexMatrix& h, double t, const QuantumState& psi);

/// Positive operator-valued measure over a dim-dimensional space.
class Povm {
 public:
  /// Validates Hermiticity, positivity (no eigenvalue below -kPovmTol) and
  /// completeness (sum within kPovmTol of identity).
  explicit Povm(std::vector<ComplexMatrix> elements);

  /// {|0><0|, ..., |dim-1><dim-1|}
  static Povm computational(Index dim);

  [[nodiscard]] std::size_t size() const noexcept { return elements_.size(); }
  [[nodiscard]] Index dim() const noexcept { return dim_; }
  [[nodiscard]] const ComplexMatrix& element(std::size_t x) const { return elements_.at(x); }
  [[nodiscard]] const std::vector<ComplexMatrix>& elements() const noexcept { return elements_; }

  /// If element x is a rank-1 projector |g><g|, the unit ray g.
  [[nodiscard]] const std::optional<ComplexVector>& ray(std::size_t x) const { return rays_.at(x); }

  /// Born probabilities <psi|M_x|psi>, negative round-off clipped to zero.
  [[nodiscard]] std::vector<double> probabilities(const QuantumState& psi) const;

 private:
  Index dim_ = 0;
  std::vector<ComplexMatrix> elements_;
  std::vector<std::optional<ComplexVector>> rays_;
};

/// Multinomial draw of `shots` outcomes from the Born distribution.
std::vector<std::int64_t> sample_measurement(const QuantumState& psi, const Povm& povm,
                                             std::int64_t shots, RngStream& rng);

/// Same draw for an explicit probability vector.
std::vector<std::int64_t> sample_counts(std::span<const double> probabilities,
                                        std::int64_t shots, RngStream& rng);

/// Modified Gram-Schmidt. Throws RankDeficiencyError naming the first vector
/// whose residual norm falls below kIndependenceTol * max(1, |v|).
std::vector<ComplexVector> orthonormalize(std::span<const ComplexVector> vectors);

}  // namespace rabiest
