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
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "stoq/compare.hpp"
#include "stoq/ito_sse.hpp"
#include "stoq/linops.hpp"
#include "stoq/master.hpp"
#include "stoq/noise.hpp"
#include "stoq/rode.hpp"
#include "stoq/strat_unitary.hpp"

namespace stoq {

struct ItoEngine {
    ItoModel model;
    ItoScheme scheme = ItoScheme::EulerMaruyama;
    StateVector psi0;
};

struct StratEngine {
    StratModel model;
    StateVector psi0;
};

struct RodeEngine {
    RodeModel model;
    RodeScheme scheme = RodeScheme::MidpointUnitary;
    StateVector psi0;
};

/// Trajectory-level Liouville equation  d rho = -i[H + Z_t R, rho] dt + D[rho] dt.
/// White noise: Stratonovich step unitaries then an RK4 sub-step of D.
/// OU noise: RK4 of sle_trajectory_rhs with Z on the half-step grid.
struct SleEngine {
    Operator hamiltonian;
    Operator noise_operator;
    NoiseSpec noise;
    std::vector<LindbladChannel> channels;
    DensityMatrix rho0;
};

/// Gate-level propagation of emit_trajectory_circuit sequences.
struct CircuitEngine {
    double eps = 0.0;
    double omega = 0.0;
    double sigma = 0.0;
    StateVector psi0;
};

using EngineSpec = std::variant<ItoEngine, StratEngine, RodeEngine, SleEngine, CircuitEngine>;

Eigen::Index engine_dim(const EngineSpec& engine);

/// Runs one trajectory and calls visit(k, rho_k) for k = 0..n_steps.
void run_trajectory_densities(const EngineSpec& engine, double dt, std::size_t n_steps, RngStream& stream,
                              const std::function<void(std::size_t, const DensityMatrix&)>& visit);

struct NamedOperator {
    std::string name;
    Operator op;
};

/// Hermitian basis {|a><a|, |a><b| + |b><a|, i|a><b| - i|b><a|}; default observables.
std::vector<NamedOperator> hermitian_basis(Eigen::Index dim);

struct EnsembleOptions {
    std::size_t n_trajectories = 1;
    double dt = 0.0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    std::vector<NamedOperator> observables;
    unsigned threads = 1;
    std::size_t record_every = 1;
    /// Abort when more than this fraction of trajectories blow up.
    double max_blowup_fraction = 0.01;
};

struct EnsembleResult {
    std::vector<double> times;
    std::vector<DensityMatrix> mean_rho;
    /// Max over observables of (sample std of Tr(O rho_w)) / sqrt(N), per time.
    std::vector<double> standard_error;
    std::vector<double> purity;
    std::map<std::string, std::vector<double>> observables;
    std::map<std::string, std::vector<double>> observable_stderr;
    std::vector<std::string> observable_order;
    std::size_t n_trajectories = 0;
    std::size_t n_failed = 0;
};

/// Trajectories are grouped in fixed chunks of kEnsembleChunk indices; chunk
/// sums are combined by a fixed pairwise tree, so the result does not depend
/// on the thread count.
inline constexpr std::size_t kEnsembleChunk = 16;

EnsembleResult run_ensemble(const EngineSpec& engine, const EnsembleOptions& options);

/// Per-time trace distances of result.mean_rho against a reference series.
ComparisonReport compare(const EnsembleResult& result, const std::vector<DensityMatrix>& reference,
                         const ToleranceRule& rule);

/// Two ensembles on the same grid; stderr combined in quadrature.
ComparisonReport compare(const EnsembleResult& a, const EnsembleResult& b, const ToleranceRule& rule);

/// Picks every record_every-th state of a full oracle series.
std::vector<DensityMatrix> subsample(const std::vector<DensityMatrix>& series, std::size_t record_every);

std::string format_double(double x);

/// t, observables, purity, stderr, observable stderr columns, optional rho entries.
void write_ensemble_csv(std::ostream& out, const EnsembleResult& result, bool include_rho,
                        const std::string& provenance);

/// t, re/im of each entry (row-major), purity, trace.
void write_density_csv(std::ostream& out, const std::vector<double>& times, const std::vector<DensityMatrix>& states,
                       const std::string& provenance);

}  // namespace stoq
