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

#include "stoq/rode.hpp"

#include <utility>

namespace stoq {

RodeModel::RodeModel(Operator hamiltonian, Operator noise_operator, OrnsteinUhlenbeck noise)
    : h_(std::move(hamiltonian)), r_(std::move(noise_operator)), noise_(noise) {
    require_hermitian(h_, "Hamiltonian H");
    require_hermitian(r_, "noise operator R");
    require_same_shape(h_, r_, "RODE model");
    if (!(noise_.std >= 0.0) || !(noise_.tau_c > 0.0) || !std::isfinite(noise_.std) || !std::isfinite(noise_.tau_c)) {
        throw Error(ErrorCode::InvalidArgument, "OU process needs std >= 0 and tau_c > 0");
    }
}

std::vector<StateVector> run_rode_on_path(const RodeModel& model, const StateVector& psi0, double dt,
                                          std::span<const double> half_grid_z, RodeScheme scheme) {
    require_normalized(psi0);
    std::vector<StateVector> states;
    states.reserve(half_grid_z.size() / 2 + 1);
    detail::walk_rode(model, psi0, dt, half_grid_z, scheme,
                      [&](std::size_t, const StateVector& psi) { states.push_back(psi); });
    return states;
}

std::vector<StateVector> run_rode_trajectory(const RodeModel& model, const StateVector& psi0, double dt,
                                             std::size_t n_steps, RngStream& stream, RodeScheme scheme) {
    require_time_step(dt);
    const auto z = sample_ou_path(model.noise(), 0.5 * dt, 2 * n_steps, stream);
    return run_rode_on_path(model, psi0, dt, z, scheme);
}

}  // namespace stoq
