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

#pragma once

#include <vector>

#include "stoq/ito_sse.hpp"
#include "stoq/linops.hpp"
#include "stoq/noise.hpp"

namespace stoq {

/// Stratonovich SSE  d psi = -iH psi dt - i sigma R psi o dW  with H, R Hermitian.
class StratModel {
public:
    StratModel(Operator hamiltonian, Operator noise_operator, double sigma);

    const Operator& hamiltonian() const { return h_; }
    const Operator& noise_operator() const { return r_; }
    double sigma() const { return sigma_; }
    Eigen::Index dim() const { return h_.rows(); }

private:
    Operator h_;
    Operator r_;
    double sigma_;
};

/// First-order Magnus step  U = exp(-iH dt - i sigma R dW).
Operator strat_step_unitary(const StratModel& model, double dt, double dw);

/// psi_{k+1} = U_k psi_k; n_steps + 1 states, each of unit norm.
std::vector<StateVector> run_strat_trajectory(const StratModel& model, const StateVector& psi0, double dt,
                                              std::size_t n_steps, RngStream& stream);
std::vector<StateVector> run_strat_trajectory(const StratModel& model, const StateVector& psi0,
                                              const WienerPath& path);

struct ItoEquivalent {
    Operator drift;  // -iH - sigma^2/2 R^2
    ItoModel model;  // {H, B = iR, sigma}
};

/// Stratonovich-to-Ito conversion of the stochastic Hamiltonian class.
ItoEquivalent strat_to_ito_drift(const StratModel& model);

namespace detail {

template <typename Visitor>
void walk_strat(const StratModel& model, const StateVector& psi0, const WienerPath& path, Visitor&& visit) {
    require_time_step(path.dt);
    if (psi0.size() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");
    const Operator h_dt = model.hamiltonian() * path.dt;
    const Operator sigma_r = model.sigma() * model.noise_operator();
    Operator generator(model.dim(), model.dim());
    StateVector psi = psi0;
    StateVector next(psi.size());
    visit(std::size_t{0}, psi);
    for (std::size_t k = 0; k < path.size(); ++k) {
        generator = h_dt + path.increments[k] * sigma_r;
        next.noalias() = detail::expm_hermitian(generator, 1.0) * psi;
        psi.swap(next);
        visit(k + 1, psi);
    }
}

}  // namespace detail

}  // namespace stoq
