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
#include <vector>

#include "stoq/ito_sse.hpp"
#include "stoq/rode.hpp"

namespace stoq {

struct ConvergenceLevel {
    double dt = 0.0;
    double mean_error = 0.0;  // mean over paths of |psi_T - psi_T^ref|
};

/// Least-squares slope of log(error) against log(dt).
double fitted_order(const std::vector<ConvergenceLevel>& levels);

struct StrongOrderReport {
    std::vector<ConvergenceLevel> euler_maruyama;
    std::vector<ConvergenceLevel> milstein;
    double euler_maruyama_slope = 0.0;
    double milstein_slope = 0.0;
};

/// Strong errors at dt_coarse / 2^l, l = 0..levels-1, against a Milstein
/// reference on the same Brownian path refined by a further reference_factor.
/// Finer paths come from Brownian-bridge refinement of the coarse one.
StrongOrderReport measure_ito_strong_order(const ItoModel& model, const StateVector& psi0, double t_final,
                                           double dt_coarse, unsigned levels, unsigned reference_factor,
                                           std::size_t n_paths, std::uint64_t seed);

struct RodeRefinementReport {
    std::vector<ConvergenceLevel> levels;
    /// error(dt) / error(dt/2) for consecutive levels
    std::vector<double> reduction_factors;
    double slope = 0.0;
};

/// MidpointUnitary endpoint errors at dt_coarse / 2^l against a run at
/// dt_finest / reference_factor on the same OU path (sampled once on the finest half-step grid).
RodeRefinementReport measure_rode_refinement(const RodeModel& model, const StateVector& psi0, double t_final,
                                             double dt_coarse, unsigned levels, unsigned reference_factor,
                                             std::size_t n_paths, std::uint64_t seed);

}  // namespace stoq
