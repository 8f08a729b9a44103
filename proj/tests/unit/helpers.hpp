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


#pragma once

#include <cmath>
#include <numbers>

#include "rabiest/qcore.hpp"
#include "rabiest/rabi_models.hpp"
#include "rabiest/rng.hpp"

namespace rabiest::testing {

inline constexpr double kPi = std::numbers::pi;

inline ComplexMatrix random_hermitian(Index dim, RngStream& rng) {
  ComplexMatrix a(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
  }
  return 0.5 * (a + a.adjoint());
}

inline QuantumState random_state(Index dim, RngStream& rng) {
  ComplexVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = Complex(rng.normal(), rng.normal());
  return QuantumState::normalized(v);
}

inline ComplexMatrix random_unitary(Index dim, RngStream& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_hermitian(dim, rng) + ComplexMatrix::Identity(dim, dim) * Complex(0, 1));
  return qr.householderQ() * ComplexMatrix::Identity(dim, dim);
}

struct Sample {
  RabiParameters omega;
  double t;
};

/// W in [0.05, 2]^2, t in [0.1, 20], |sin(Omega_+ t / 2)| >= margin.
inline Sample random_sample(RngStream& rng, double margin = 1e-3) {
  for (;;) {
    RabiParameters w(0.05 + 1.95 * rng.uniform(), 0.05 + 1.95 * rng.uniform());
    const double t = 0.1 + 19.9 * rng.uniform();
    if (std::abs(std::sin(0.5 * w.omega_plus() * t)) >= margin) return {w, t};
  }
}

inline double rel_dev(const RealMatrix& a, const RealMatrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace rabiest::testing
