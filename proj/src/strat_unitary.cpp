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

#include "stoq/strat_unitary.hpp"

#include <utility>

namespace stoq {

StratModel::StratModel(Operator hamiltonian, Operator noise_operator, double sigma)
    : h_(std::move(hamiltonian)), r_(std::move(noise_operator)), sigma_(sigma) {
    require_hermitian(h_, "Hamiltonian H");
    require_hermitian(r_, "noise operator R");
    require_same_shape(h_, r_, "Stratonovich model");
    if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
        throw Error(ErrorCode::InvalidArgument, "sigma must be finite and non-negative");
    }
}

Operator strat_step_unitary(const StratModel& model, double dt, double dw) {
    require_time_step(dt);
    const Operator generator = model.hamiltonian() * dt + (model.sigma() * dw) * model.noise_operator();
    return expm_generator(generator, 1.0);
}

std::vector<StateVector> run_strat_trajectory(const StratModel& model, const StateVector& psi0,
                                              const WienerPath& path) {
    require_normalized(psi0);
    std::vector<StateVector> states;
    states.reserve(path.size() + 1);
    detail::walk_strat(model, psi0, path, [&](std::size_t, const StateVector& psi) { states.push_back(psi); });
    return states;
}

std::vector<StateVector> run_strat_trajectory(const StratModel& model, const StateVector& psi0, double dt,
                                              std::size_t n_steps, RngStream& stream) {
    require_time_step(dt);
    return run_strat_trajectory(model, psi0, sample_wiener_increments(dt, n_steps, stream));
}

ItoEquivalent strat_to_ito_drift(const StratModel& model) {
    const Complex minus_i(0, -1);
    const double s2 = model.sigma() * model.sigma();
    const Operator& r = model.noise_operator();
    Operator drift = minus_i * model.hamiltonian() - 0.5 * s2 * (r * r);
    ItoModel ito(model.hamiltonian(), Complex(0, 1) * r, model.sigma());
    return {std::move(drift), std::move(ito)};
}

}  // namespace stoq
