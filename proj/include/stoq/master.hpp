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

#include <functional>
#include <optional>
#include <vector>

#include "stoq/linops.hpp"
#include "stoq/noise.hpp"

namespace stoq {

struct LindbladChannel {
    Operator op;
    double rate = 0.0;
};

struct LindbladModel {
    Operator hamiltonian;
    std::vector<LindbladChannel> channels;
};

/// H Hermitian, channel dims consistent, rates >= 0.
void validate(const LindbladModel& model);

/// sum_k rate_k (L rho L^dag - 1/2 {L^dag L, rho})
Operator dissipator(const std::vector<LindbladChannel>& channels, const DensityMatrix& rho);

/// -i[H, rho] + dissipator(channels, rho)
Operator lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho);

/// -i[H, rho] - gamma [R, [R, rho]]: mean dynamics under white noise.
/// For white noise of intensity sigma the matching gamma is sigma^2 / 2, see white_noise_rate().
Operator white_noise_sle_rhs(const Operator& hamiltonian, const Operator& noise_operator, double gamma,
                             const DensityMatrix& rho);

/// One-sided weight of the delta covariance: sigma^2 / 2.
inline double white_noise_rate(const WhiteNoise& noise) { return 0.5 * noise.sigma * noise.sigma; }

/// -i[H_eff, rho] + dissipator(channels, rho) for one trajectory, H_eff = H + Z_t R.
Operator sle_trajectory_rhs(const Operator& effective_hamiltonian, const std::vector<LindbladChannel>& channels,
                            const DensityMatrix& rho);

using Generator = std::function<Operator(double t, const DensityMatrix& rho)>;

inline constexpr double kPositivityTolerance = 1e-6;

struct PositivityWarning {
    double time = 0.0;
    double min_eigenvalue = 0.0;
};

struct Evolution {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    /// Largest entry removed by the per-step (rho + rho^dag)/2 symmetrization.
    double max_hermitian_correction = 0.0;
    /// Most negative eigenvalue seen below -kPositivityTolerance, if any.
    std::optional<PositivityWarning> positivity_warning;
    std::size_t positivity_violations = 0;
};

/// Classical RK4; Hermiticity restored after each step; positivity monitored, never clipped.
Evolution rk4_evolve(const Generator& rhs, const DensityMatrix& rho0, double dt, std::size_t n_steps);

Evolution lindblad_evolve(const LindbladModel& model, const DensityMatrix& rho0, double dt, std::size_t n_steps);

/// Second-order time-convolutionless equation with classical Gaussian noise:
///   d rho/dt = -i[H, rho] - int_0^t C(t,s) [R, [R_{t,s}, rho]] ds,
///   R_{t,s} = e^{-iH(t-s)} R e^{iH(t-s)}.
class RedfieldModel {
public:
    RedfieldModel(Operator hamiltonian, Operator noise_operator, NoiseSpec noise);

    const Operator& hamiltonian() const { return h_; }
    const Operator& noise_operator() const { return r_; }
    const NoiseSpec& noise() const { return noise_; }

private:
    Operator h_;
    Operator r_;
    NoiseSpec noise_;
};

/// White noise routes to white_noise_sle_rhs. OU integrates the memory kernel
/// by the trapezoid rule on the half-step grid used by the RK4 stages.
Evolution redfield_evolve(const RedfieldModel& model, const DensityMatrix& rho0, double dt, std::size_t n_steps);

/// int_0^{j h} C(u) R_u du for j = 0 .. n_points-1 (trapezoid, spacing h); exposed for tests.
std::vector<Operator> redfield_memory_operators(const RedfieldModel& model, double h, std::size_t n_points);

}  // namespace stoq
