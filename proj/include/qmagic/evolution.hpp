// Copyright 2026 The qmagic Authors
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
#include <memory>
#include <optional>
#include <string_view>

#include "qmagic/common.hpp"
#include "qmagic/hamiltonian.hpp"
#include "qmagic/hilbert.hpp"

namespace qmagic {

enum class PropagatorMode { eig, krylov };

std::string_view to_string(PropagatorMode m) noexcept;
PropagatorMode parse_propagator_mode(std::string_view name);

struct KrylovOptions {
  int subspace_dim = 30;
  double tolerance = 1e-12;
};

/// Mode chosen when the caller has no preference: eig up to dimension 1000.
PropagatorMode default_propagator_mode(std::size_t dim) noexcept;

/// exp(-i H t) for a fixed Hermitian H. Immutable after construction;
/// apply() is reentrant.
class Propagator {
 public:
  /// Throws std::invalid_argument if H is not Hermitian to 1e-12.
  Propagator(std::shared_ptr<const HamiltonianOperator> h, PropagatorMode mode, KrylovOptions krylov = {});

  PropagatorMode mode() const noexcept { return mode_; }
  const HamiltonianOperator& hamiltonian() const noexcept { return *h_; }
  const KrylovOptions& krylov_options() const noexcept { return krylov_; }

  /// Ascending eigenvalues and orthonormal eigenvectors (eig mode only).
  const RVector& eigenvalues() const;
  const CMatrix& eigenvectors() const;

  /// exp(-i H dt) psi. Throws std::invalid_argument for dt <= 0.
  CVector apply(const CVector& psi, double dt) const;

 private:
  std::shared_ptr<const HamiltonianOperator> h_;
  PropagatorMode mode_;
  KrylovOptions krylov_;
  RVector evals_;
  CMatrix evecs_;
};

Propagator make_propagator(std::shared_ptr<const HamiltonianOperator> h, std::optional<PropagatorMode> mode = {},
                           KrylovOptions krylov = {});

StateVector apply_unitary(const Propagator& prop, const StateVector& psi, double dt);

/// Propagator specialised to one step size. In eig mode the dense step
/// matrix is formed once, so each step is a single matrix-vector product.
class FixedStep {
 public:
  FixedStep(std::shared_ptr<const Propagator> prop, double dt);

  double dt() const noexcept { return dt_; }
  const Propagator& propagator() const noexcept { return *prop_; }
  void apply_inplace(CVector& psi) const;

 private:
  std::shared_ptr<const Propagator> prop_;
  double dt_;
  CMatrix step_;
};

/// Restarted Lanczos approximation of exp(-i A t) v for Hermitian A given
/// as a matrix-vector callable. The step is split into substeps until the
/// a-posteriori error estimate of each falls below `tol * |v|`.
template <class MatVec>
CVector lanczos_expm(const MatVec& matvec, const CVector& v, double t, int m, double tol) {
  const Eigen::Index n = v.size();
  const double norm0 = v.norm();
  if (n == 0 || norm0 == 0.0 || t == 0.0) return v;
  m = std::max(1, std::min<int>(m, static_cast<int>(n)));

  CVector w = v;
  double remaining = t;
  double tau = t;
  CMatrix basis(n, m + 1);
  RVector alpha(m);
  RVector beta(m);

  while (remaining > 0.0) {
    const double beta0 = w.norm();
    basis.col(0) = w / beta0;
    int k = 0;
    bool breakdown = false;
    for (; k < m; ++k) {
      CVector u = matvec(basis.col(k));
      alpha[k] = basis.col(k).dot(u).real();
      u -= alpha[k] * basis.col(k);
      if (k > 0) u -= beta[k - 1] * basis.col(k - 1);
      // One reorthogonalization pass keeps the basis orthonormal at m ~ 30.
      u -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).adjoint() * u);
      beta[k] = u.norm();
      if (beta[k] <= 1e-14 * beta0 * (std::abs(alpha[k]) + 1.0)) {
        breakdown = true;
        ++k;
        break;
      }
      basis.col(k + 1) = u / beta[k];
    }
    const int dim = k;
    RMatrix tri = RMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < dim) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(tri);

    for (;;) {
      const double step = std::min(tau, remaining);
      CVector phases = (-kI * step * es.eigenvalues().cast<Complex>()).array().exp().matrix();
      CVector coeffs = es.eigenvectors().cast<Complex>() *
                       (phases.asDiagonal() * es.eigenvectors().row(0).transpose().cast<Complex>());
      const double err = breakdown ? 0.0 : beta[dim - 1] * std::abs(coeffs[dim - 1]) * beta0;
      if (err <= tol * norm0 || step < 1e-14 * std::abs(t)) {
        w = beta0 * (basis.leftCols(dim) * coeffs);
        remaining -= step;
        if (err < 0.1 * tol * norm0) tau = step * 1.5;
        else tau = step;
        break;
      }
      tau = 0.5 * step;
    }
  }
  return w;
}

}  // namespace qmagic
