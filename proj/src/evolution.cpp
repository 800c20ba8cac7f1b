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

#include "qmagic/evolution.hpp"

#include <string>

namespace qmagic {

std::string_view to_string(PropagatorMode m) noexcept { return m == PropagatorMode::eig ? "eig" : "krylov"; }

PropagatorMode parse_propagator_mode(std::string_view name) {
  if (name == "eig") return PropagatorMode::eig;
  if (name == "krylov") return PropagatorMode::krylov;
  throw std::invalid_argument("unknown propagator mode '" + std::string(name) + "' (expected eig or krylov)");
}

PropagatorMode default_propagator_mode(std::size_t dim) noexcept {
  return dim <= 1000 ? PropagatorMode::eig : PropagatorMode::krylov;
}

Propagator::Propagator(std::shared_ptr<const HamiltonianOperator> h, PropagatorMode mode, KrylovOptions krylov)
    : h_(std::move(h)), mode_(mode), krylov_(krylov) {
  if (!h_) throw std::invalid_argument("Propagator: null Hamiltonian");
  const double defect = h_->hermiticity_defect();
  if (!(defect < 1e-12))
    throw std::invalid_argument("Propagator: Hamiltonian is not Hermitian (max |H - H^dag| = " +
                                std::to_string(defect) + ")");
  if (krylov_.subspace_dim < 1 || !(krylov_.tolerance > 0.0))
    throw std::invalid_argument("Propagator: invalid Krylov options");
  if (mode_ == PropagatorMode::eig) {
    if (h_->dense.size() == 0) throw CapacityError("Propagator: eig mode needs a dense Hamiltonian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h_->dense);
    if (es.info() != Eigen::Success) throw NumericalIntegrityError("Propagator: eigensolver failed");
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
  }
}

const RVector& Propagator::eigenvalues() const {
  if (mode_ != PropagatorMode::eig) throw std::logic_error("eigenvalues() requires eig mode");
  return evals_;
}

const CMatrix& Propagator::eigenvectors() const {
  if (mode_ != PropagatorMode::eig) throw std::logic_error("eigenvectors() requires eig mode");
  return evecs_;
}

CVector Propagator::apply(const CVector& psi, double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("Propagator::apply: dt must be positive");
  if (psi.size() != h_->dim()) throw std::invalid_argument("Propagator::apply: dimension mismatch");
  if (mode_ == PropagatorMode::eig) {
    const CVector phases = (-kI * dt * evals_.cast<Complex>()).array().exp().matrix();
    return evecs_ * (phases.asDiagonal() * (evecs_.adjoint() * psi));
  }
  const auto matvec = [this](const CVector& v) { return h_->apply(v); };
  return lanczos_expm(matvec, psi, dt, krylov_.subspace_dim, krylov_.tolerance);
}

Propagator make_propagator(std::shared_ptr<const HamiltonianOperator> h, std::optional<PropagatorMode> mode,
                           KrylovOptions krylov) {
  if (!h) throw std::invalid_argument("make_propagator: null Hamiltonian");
  const auto m = mode.value_or(default_propagator_mode(static_cast<std::size_t>(h->dim())));
  return Propagator(std::move(h), m, krylov);
}

StateVector apply_unitary(const Propagator& prop, const StateVector& psi, double dt) {
  return StateVector(psi.basis_ptr(), prop.apply(psi.amps(), dt));
}

FixedStep::FixedStep(std::shared_ptr<const Propagator> prop, double dt) : prop_(std::move(prop)), dt_(dt) {
  if (!prop_) throw std::invalid_argument("FixedStep: null propagator");
  if (!(dt > 0.0)) throw std::invalid_argument("FixedStep: dt must be positive");
  if (prop_->mode() == PropagatorMode::eig) {
    const auto& v = prop_->eigenvectors();
    const CVector phases = (-kI * dt * prop_->eigenvalues().cast<Complex>()).array().exp().matrix();
    step_ = v * phases.asDiagonal() * v.adjoint();
  }
}

void FixedStep::apply_inplace(CVector& psi) const {
  if (prop_->mode() == PropagatorMode::eig) {
    psi = step_ * psi;
  } else {
    psi = prop_->apply(psi, dt_);
  }
}

}  // namespace qmagic
