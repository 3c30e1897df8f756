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

// Template bodies for rode.hpp.

#include <cmath>
#include <string>

#include "stoq/errors.hpp"
#include "stoq/ito_sse.hpp"

namespace stoq::detail {

template <typename Visitor>
void walk_rode(const RodeModel& model, const StateVector& psi0, double dt, std::span<const double> z,
               RodeScheme scheme, Visitor&& visit) {
    require_time_step(dt);
    if (z.empty() || z.size() % 2 == 0) {
        throw Error(ErrorCode::InvalidArgument, "half-step noise path must have 2 n_steps + 1 samples");
    }
    if (psi0.size() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");
    const std::size_t n_steps = z.size() / 2;
    const Operator& h = model.hamiltonian();
    const Operator& r = model.noise_operator();
    const Complex minus_i(0, -1);
    Operator h_eff(model.dim(), model.dim());
    StateVector psi = psi0;
    StateVector next(psi.size()), k1(psi.size()), k2(psi.size());
    visit(std::size_t{0}, psi);
    for (std::size_t k = 0; k < n_steps; ++k) {
        if (scheme == RodeScheme::MidpointUnitary) {
            h_eff = h + z[2 * k + 1] * r;
            next.noalias() = expm_hermitian(h_eff, dt) * psi;
        } else {
            h_eff = h + z[2 * k] * r;
            k1.noalias() = minus_i * (h_eff * psi);
            next = psi + dt * k1;
            h_eff = h + z[2 * k + 2] * r;
            k2.noalias() = minus_i * (h_eff * next);
            next = psi + (0.5 * dt) * (k1 + k2);
            const double norm = next.norm();
            if (!(norm <= kBlowupNorm)) {
                throw Error(ErrorCode::NumericalBlowup, "Heun RODE trajectory norm " + std::to_string(norm) +
                                                            " at step " + std::to_string(k + 1) +
                                                            "; reduce dt");
            }
        }
        psi.swap(next);
        visit(k + 1, psi);
    }
}

}  // namespace stoq::detail
