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

#include <cstdint>
#include <span>
#include <vector>

#include "stoq/compare.hpp"
#include "stoq/linops.hpp"
#include "stoq/noise.hpp"

namespace stoq {

enum class RodeScheme { MidpointUnitary, Heun };

/// Schroedinger equation with a continuous fluctuating coefficient,
/// H_eff(t) = H + Z_t R, Z an Ornstein-Uhlenbeck process.
class RodeModel {
public:
    RodeModel(Operator hamiltonian, Operator noise_operator, OrnsteinUhlenbeck noise);

    const Operator& hamiltonian() const { return h_; }
    const Operator& noise_operator() const { return r_; }
    const OrnsteinUhlenbeck& noise() const { return noise_; }
    Eigen::Index dim() const { return h_.rows(); }

private:
    Operator h_;
    Operator r_;
    OrnsteinUhlenbeck noise_;
};

/// Samples Z on the half-step grid (2 n_steps + 1 points) and integrates.
std::vector<StateVector> run_rode_trajectory(const RodeModel& model, const StateVector& psi0, double dt,
                                             std::size_t n_steps, RngStream& stream,
                                             RodeScheme scheme = RodeScheme::MidpointUnitary);

/// Integrates on a given half-step path: z[2k] at t_k, z[2k+1] at t_k + dt/2.
std::vector<StateVector> run_rode_on_path(const RodeModel& model, const StateVector& psi0, double dt,
                                          std::span<const double> half_grid_z, RodeScheme scheme);

struct RodeRedfieldReport {
    ComparisonReport comparison;
    /// std^2 tau_c |R|^2 over the spectral width of H
    double coupling_ratio = 0.0;
    bool weak_coupling = true;
};

/// Weak-coupling threshold on coupling_ratio.
inline constexpr double kWeakCouplingRatio = 0.1;

/// RODE ensemble mean against the Redfield (TCL2) oracle, max(3 stderr, 1e-2) rule.
RodeRedfieldReport rode_vs_redfield_report(const RodeModel& model, const StateVector& psi0, double t_final,
                                           double dt, std::size_t n_trajectories, std::uint64_t seed,
                                           unsigned threads = 1);

namespace detail {

template <typename Visitor>
void walk_rode(const RodeModel& model, const StateVector& psi0, double dt, std::span<const double> z,
               RodeScheme scheme, Visitor&& visit);

}  // namespace detail

}  // namespace stoq

#include "stoq/rode_impl.hpp"
