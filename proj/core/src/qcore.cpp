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

#include "rabiest/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "rabiest/errors.hpp"

namespace rabiest {

namespace {

bool all_finite(const ComplexMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

}  // namespace

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& h, double rel_tol) {
  if (h.rows() != h.cols() || !all_finite(h)) return false;
  const double scale = max_abs(h);
  return max_abs(h - h.adjoint()) <= rel_tol * scale;
}

void require_hermitian(const ComplexMatrix& h, std::string_view what) {
  if (h.rows() == 0 || h.rows() != h.cols()) {
    throw ValidationError(std::string(what) + " must be a non-empty square matrix");
  }
  if (!all_finite(h)) throw ValidationError(std::string(what) + " has non-finite entries");
  if (!is_hermitian(h)) {
    std::ostringstream os;
    os << what << " is not Hermitian: max |H - H^dagger| = " << max_abs(h - h.adjoint())
       << " exceeds " << kHermitianTol << " * " << max_abs(h);
    throw ValidationError(os.str());
  }
}

// QuantumState ---------------------------------------------------------------

QuantumState::QuantumState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw ValidationError("state must have positive dimension");
  const double n = amps_.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTol) {
    std::ostringstream os;
    os << "state is not normalized: |psi| = " << n;
    throw ValidationError(os.str());
  }
}

QuantumState QuantumState::normalized(ComplexVector v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("cannot normalize a zero or non-finite vector");
  v /= n;
  return QuantumState(std::move(v));
}

QuantumState QuantumState::basis(Index dim, Index k) {
  if (dim <= 0 || k < 0 || k >= dim) throw ValidationError("basis index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v(k) = 1.0;
  return QuantumState(std::move(v));
}

Complex QuantumState::inner(const QuantumState& other) const {
  if (other.dim() != dim()) throw ValidationError("inner product of states with different dimensions");
  return amps_.dot(other.amps_);
}

double phase_distance(const ComplexVector& a, const ComplexVector& b) {
  return 1.0 - std::abs(a.dot(b));
}

// EigenSystem ----------------------------------------------------------------

QuantumState EigenSystem::vector(Index k) const {
  return QuantumState::normalized(eigenvectors.col(k));
}

ComplexMatrix EigenSystem::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

EigenSystem hermitian_eig(const ComplexMatrix& h) {
  require_hermitian(h, "Hamiltonian");
  // Symmetrize so the solver sees an exactly Hermitian input.
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw ValidationError("eigen decomposition failed");
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix propagator(const EigenSystem& eig, double t) {
  ComplexVector phases(eig.dim());
  for (Index k = 0; k < eig.dim(); ++k) phases(k) = std::polar(1.0, -eig.eigenvalues(k) * t);
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexMatrix propagator(const ComplexMatrix& h, double t) {
  return propagator(hermitian_eig(h), t);
}

QuantumState evolve(const ComplexMatrix& h, double t, const QuantumState& psi) {
  require_hermitian(h, "Hamiltonian");
  if (h.rows() != psi.dim()) throw ValidationError("Hamiltonian and state dimensions differ");
  if (t == 0.0) return psi;
  const EigenSystem eig = hermitian_eig(h);
  ComplexVector coeffs = eig.eigenvectors.adjoint() * psi.amplitudes();
  for (Index k = 0; k < eig.dim(); ++k) coeffs(k) *= std::polar(1.0, -eig.eigenvalues(k) * t);
  // Renormalize away the O(eps) drift of the spectral product.
  return QuantumState::normalized(eig.eigenvectors * coeffs);
}

// Povm -----------------------------------------------------------------------

Povm::Povm(std::vector<ComplexMatrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ValidationError("POVM needs at least one element");
  dim_ = elements_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(dim_, dim_);
  rays_.reserve(elements_.size());
  for (std::size_t x = 0; x < elements_.size(); ++x) {
    const ComplexMatrix& e = elements_[x];
    if (e.rows() != dim_ || e.cols() != dim_) {
      throw ValidationError("POVM element " + std::to_string(x) + " has the wrong shape");
    }
    if (!all_finite(e) || max_abs(e - e.adjoint()) > kPovmTol) {
      throw ValidationError("POVM element " + std::to_string(x) + " is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (e + e.adjoint()));
    const RealVector& w = solver.eigenvalues();
    if (w.minCoeff() < -kPovmTol) {
      std::ostringstream os;
      os << "POVM element " << x << " has negative eigenvalue " << w.minCoeff();
      throw ValidationError(os.str());
    }
    std::optional<ComplexVector> ray;
    const Index top = dim_ - 1;
    if (std::abs(w(top) - 1.0) < 1e-9 && (dim_ == 1 || w.head(top).cwiseAbs().maxCoeff() < 1e-9)) {
      ray = solver.eigenvectors().col(top);
    }
    rays_.push_back(std::move(ray));
    sum += e;
  }
  const double defect = max_abs(sum - ComplexMatrix::Identity(dim_, dim_));
  if (defect > kPovmTol) {
    std::ostringstream os;
    os << "POVM elements do not sum to identity (max deviation " << defect << ")";
    throw ValidationError(os.str());
  }
}

Povm Povm::computational(Index dim) {
  std::vector<ComplexMatrix> elems;
  for (Index k = 0; k < dim; ++k) {
    ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
    e(k, k) = 1.0;
    elems.push_back(std::move(e));
  }
  return Povm(std::move(elems));
}

std::vector<double> Povm::probabilities(const QuantumState& psi) const {
  if (psi.dim() != dim_) throw ValidationError("state and POVM dimensions differ");
  std::vector<double> p(elements_.size());
  const ComplexVector& v = psi.amplitudes();
  for (std::size_t x = 0; x < elements_.size(); ++x) {
    p[x] = std::max(0.0, v.dot(elements_[x] * v).real());
  }
  return p;
}

// Sampling -------------------------------------------------------------------

std::vector<std::int64_t> sample_counts(std::span<const double> probabilities, std::int64_t shots,
                                        RngStream& rng) {
  if (shots < 1) throw ValidationError("shots must be >= 1");
  if (probabilities.empty()) throw ValidationError("empty probability vector");
  double total = 0.0;
  for (double p : probabilities) {
    if (!std::isfinite(p) || p < -kProbabilitySumTol) throw ValidationError("invalid outcome probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilitySumTol) {
    std::ostringstream os;
    os << "outcome probabilities sum to " << total;
    throw ValidationError(os.str());
  }
  std::vector<double> cdf(probabilities.size());
  double acc = 0.0;
  for (std::size_t x = 0; x < probabilities.size(); ++x) {
    acc += std::max(0.0, probabilities[x]);
    cdf[x] = acc;
  }
  // Route the residual mass to the last outcome that carries probability.
  std::size_t last = probabilities.size() - 1;
  while (last > 0 && probabilities[last] <= 0.0) --last;
  for (std::size_t x = last; x < cdf.size(); ++x) cdf[x] = 1.0;

  std::vector<std::int64_t> counts(probabilities.size(), 0);
  for (std::int64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ++counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  return counts;
}

std::vector<std::int64_t> sample_measurement(const QuantumState& psi, const Povm& povm,
                                             std::int64_t shots, RngStream& rng) {
  const std::vector<double> p = povm.probabilities(psi);
  return sample_counts(p, shots, rng);
}

// Gram-Schmidt ---------------------------------------------------------------

std::vector<ComplexVector> orthonormalize(std::span<const ComplexVector> vectors) {
  std::vector<ComplexVector> out;
  out.reserve(vectors.size());
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    ComplexVector v = vectors[k];
    if (!out.empty() && v.size() != out.front().size()) {
      throw ValidationError("vectors to orthonormalize have different dimensions");
    }
    const double scale = std::max(1.0, v.norm());
    // Two passes of modified Gram-Schmidt keep the result orthogonal to
    // round-off even for nearly dependent inputs.
    for (int pass = 0; pass < 2; ++pass) {
      for (const ComplexVector& q : out) v -= q.dot(v) * q;
    }
    const double n = v.norm();
    if (!(n >= kIndependenceTol * scale)) {
      std::ostringstream os;
      os << "vector " << k << " is linearly dependent on its predecessors (residual " << n << ")";
      throw RankDeficiencyError(k, os.str());
    }
    out.push_back(v / n);
  }
  return out;
}

}  // namespace rabiest
