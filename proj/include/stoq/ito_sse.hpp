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

#include <cmath>
#include <string>
#include <vector>

#include "stoq/errors.hpp"
#include "stoq/linops.hpp"
#include "stoq/noise.hpp"

namespace stoq {

enum class ItoScheme { EulerMaruyama, Milstein };

/// Linear Ito SSE  d psi = A psi dt + sigma B psi dW  with the drift fixed by
/// the martingale condition A + A^dag + sigma^2 B^dag B = 0, i.e.
/// A = -iH - sigma^2/2 B^dag B. B may be non-Hermitian.
class ItoModel {
public:
    ItoModel(Operator hamiltonian, Operator noise_operator, double sigma);

    const Operator& hamiltonian() const { return h_; }
    const Operator& noise_operator() const { return b_; }
    double sigma() const { return sigma_; }
    Eigen::Index dim() const { return h_.rows(); }

    /// -iH - sigma^2/2 B^dag B
    const Operator& drift() const { return drift_; }
    /// sigma B
    const Operator& diffusion() const { return diffusion_; }
    /// sigma^2/2 B^2, the constant-coefficient Milstein operator
    const Operator& milstein_operator() const { return milstein_; }

    /// max |A + A^dag + sigma^2 B^dag B|
    double martingale_defect() const;

private:
    Operator h_;
    Operator b_;
    double sigma_;
    Operator drift_;
    Operator diffusion_;
    Operator milstein_;
};

/// Blow-up guard for unbounded linear SDE trajectories.
inline constexpr double kBlowupNorm = 1e3;

StateVector em_step(const ItoModel& model, const StateVector& psi, double dt, double dw);
StateVector milstein_step(const ItoModel& model, const StateVector& psi, double dt, double dw);

/// n_steps + 1 states including psi0. Norms are not renormalized.
std::vector<StateVector> run_ito_trajectory(const ItoModel& model, const StateVector& psi0, double dt,
                                            std::size_t n_steps, ItoScheme scheme, RngStream& stream);
std::vector<StateVector> run_ito_trajectory(const ItoModel& model, const StateVector& psi0,
                                            const WienerPath& path, ItoScheme scheme);

/// psi psi^dag per time point; trace equals the squared norm.
std::vector<DensityMatrix> trajectory_density(const std::vector<StateVector>& states);

void require_normalized(const StateVector& psi, double tolerance = 1e-10);

namespace detail {

// Steps psi0 along `path`, calling visit(k, psi_k) for k = 0..n.
template <typename Visitor>
void walk_ito(const ItoModel& model, const StateVector& psi0, const WienerPath& path, ItoScheme scheme,
              Visitor&& visit) {
    require_time_step(path.dt);
    if (psi0.size() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");
    const double dt = path.dt;
    StateVector psi = psi0;
    StateVector next(psi.size());
    visit(std::size_t{0}, psi);
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double dw = path.increments[k];
        next = psi;
        next.noalias() += dt * (model.drift() * psi);
        next.noalias() += dw * (model.diffusion() * psi);
        if (scheme == ItoScheme::Milstein) {
            next.noalias() += (dw * dw - dt) * (model.milstein_operator() * psi);
        }
        psi.swap(next);
        const double norm = psi.norm();
        if (!(norm <= kBlowupNorm)) {
            const double bnorm = operator_norm(model.noise_operator());
            throw Error(ErrorCode::NumericalBlowup,
                        "Ito trajectory norm " + std::to_string(norm) + " exceeded " +
                            std::to_string(kBlowupNorm) + " at step " + std::to_string(k + 1) +
                            "; reduce dt below ~1/(sigma^2 |B|^2) = " +
                            std::to_string(1.0 / (model.sigma() * model.sigma() * bnorm * bnorm)));
        }
        visit(k + 1, psi);
    }
}

}  // namespace detail

}  // namespace stoq
