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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stoq/ensemble.hpp"
#include "stoq/linops.hpp"
#include "stoq/master.hpp"
#include "stoq/noise.hpp"

namespace stoq {

enum class RunMode { Trajectory, Ensemble, Master, Compare, EmitCircuit, Convergence };
enum class EngineKind { ItoEm, ItoMilstein, Strat, RodeMidpoint, RodeHeun, Sle };
enum class OracleKind { Lindblad, Redfield, WhiteSle, None };

struct SystemConfig {
    Eigen::Index dim = 0;
    Operator hamiltonian;
    std::optional<Operator> r;
    std::optional<Operator> b;
    bool b_is_ir = false;
    std::optional<StateVector> psi0;
    std::optional<DensityMatrix> rho0;
    std::vector<LindbladChannel> channels;  // extra dissipators (SLE engine and oracles)
};

struct IntegratorConfig {
    EngineKind engine = EngineKind::Strat;
    double dt = 0.0;
    std::size_t n_steps = 0;
};

struct EnsembleConfig {
    std::size_t n = 1;
    std::uint64_t seed = 0;
};

struct CircuitConfig {
    double eps = 0.0;
    double omega = 0.0;
};

struct CompareConfig {
    double k = 3.0;
    double floor = 1e-2;
};

struct ConvergenceConfig {
    std::size_t paths = 200;
    unsigned levels = 5;
    unsigned reference_factor = 16;
};

struct OutputConfig {
    std::string prefix = "stoqtraj";
    std::vector<NamedOperator> observables;
    std::size_t record_every = 1;
    bool include_rho = false;
    bool wiener_dump = false;
};

struct RunConfig {
    RunMode mode = RunMode::Ensemble;
    SystemConfig system;
    NoiseSpec noise = WhiteNoise{1.0};
    IntegratorConfig integrator;
    EnsembleConfig ensemble;
    OracleKind oracle = OracleKind::None;
    std::optional<CircuitConfig> circuit;
    CompareConfig compare;
    ConvergenceConfig convergence;
    OutputConfig outputs;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// JSON document -> validated RunConfig. Throws ParseError (with line) or
/// ValidationError / InvalidTimeStep naming the violated rule.
RunConfig parse_config(std::string_view text);

/// Canonical JSON; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Engine/noise/oracle compatibility and mode requirements.
void validate(const RunConfig& config);

std::string_view to_string(RunMode mode);
std::string_view to_string(EngineKind engine);
std::string_view to_string(OracleKind oracle);

/// Builders shared by the CLI and the tests.
EngineSpec make_engine(const RunConfig& config);
/// Deterministic reference matching the engine's mean dynamics; throws if oracle is None.
Evolution evolve_oracle(const RunConfig& config);

}  // namespace stoq
