// Copyright 2026 The stoqtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stoq/ito_sse.hpp"

#include <utility>

namespace stoq {

ItoModel::ItoModel(Operator hamiltonian, Operator noise_operator, double sigma)
    : h_(std::move(hamiltonian)), b_(std::move(noise_operator)), sigma_(sigma) {
    require_hermitian(h_, "Hamiltonian H");
    require_square(b_, "noise operator B");
    require_same_shape(h_, b_, "Ito model");
    if (!b_.allFinite()) throw Error(ErrorCode::InvalidArgument, "noise operator B has non-finite entries");
    if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
        throw Error(ErrorCode::InvalidArgument, "sigma must be finite and non-negative");
    }
    const Complex minus_i(0, -1);
    const double s2 = sigma_ * sigma_;
    drift_ = minus_i * h_ - 0.5 * s2 * (b_.adjoint() * b_);
    diffusion_ = sigma_ * b_;
    milstein_ = 0.5 * s2 * (b_ * b_);
}

double ItoModel::martingale_defect() const {
    const double s2 = sigma_ * sigma_;
    const Operator sum = drift_ + drift_.adjoint() + s2 * (b_.adjoint() * b_);
    return sum.cwiseAbs().maxCoeff();
}

StateVector em_step(const ItoModel& model, const StateVector& psi, double dt, double dw) {
    require_time_step(dt);
    require_same_shape(model.hamiltonian().col(0), psi, "em_step state");
    StateVector next = psi;
    next.noalias() += dt * (model.drift() * psi);
    next.noalias() += dw * (model.diffusion() * psi);
    return next;
}

StateVector milstein_step(const ItoModel& model, const StateVector& psi, double dt, double dw) {
    StateVector next = em_step(model, psi, dt, dw);
    next.noalias() += (dw * dw - dt) * (model.milstein_operator() * psi);
    return next;
}

void require_normalized(const StateVector& psi, double tolerance) {
    if (!(std::abs(psi.norm() - 1.0) <= tolerance)) {
        throw Error(ErrorCode::InvalidArgument,
                    "initial state must be normalized (|psi| = " + std::to_string(psi.norm()) + ")");
    }
}

std::vector<StateVector> run_ito_trajectory(const ItoModel& model, const StateVector& psi0,
                                            const WienerPath& path, ItoScheme scheme) {
    require_normalized(psi0);
    std::vector<StateVector> states;
    states.reserve(path.size() + 1);
    detail::walk_ito(model, psi0, path, scheme, [&](std::size_t, const StateVector& psi) { states.push_back(psi); });
    return states;
}

std::vector<StateVector> run_ito_trajectory(const ItoModel& model, const StateVector& psi0, double dt,
                                            std::size_t n_steps, ItoScheme scheme, RngStream& stream) {
    require_time_step(dt);
    return run_ito_trajectory(model, psi0, sample_wiener_increments(dt, n_steps, stream), scheme);
}

std::vector<DensityMatrix> trajectory_density(const std::vector<StateVector>& states) {
    std::vector<DensityMatrix> out;
    out.reserve(states.size());
    for (const auto& psi : states) out.push_back(projector(psi));
    return out;
}

}  // namespace stoq
