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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stoq/linops.hpp"
#include "stoq/noise.hpp"

namespace stoq {

enum class GateKind { RZ, RX };

/// Rotation R_A(angle) = exp(-i (angle/2) sigma_A); angle is the full rotation angle.
struct Gate {
    GateKind kind = GateKind::RZ;
    unsigned qubit = 0;
    double angle = 0.0;
    friend bool operator==(const Gate&, const Gate&) = default;
};

struct CircuitMetadata {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trajectory_index;
    std::optional<double> dt;
    std::optional<std::uint64_t> n_steps;
    std::optional<double> eps;
    std::optional<double> omega;
    std::optional<double> sigma;
    friend bool operator==(const CircuitMetadata&, const CircuitMetadata&) = default;
};

struct GateSequence {
    unsigned n_qubits = 1;
    std::vector<Gate> gates;
    CircuitMetadata metadata;
    friend bool operator==(const GateSequence&, const GateSequence&) = default;
};

/// Qubit model H = eps sz + omega sx with white noise on sx. Each step emits
/// RZ(2 eps dt), RX(2 omega dt), RX(2 sigma dW_k) on qubit 0 (first-order Trotter).
GateSequence emit_trajectory_circuit(double eps, double omega, double sigma, double dt, std::size_t n_steps,
                                     RngStream& stream);

/// 2x2 matrix of a single gate.
Operator gate_matrix(const Gate& gate);

/// Ordered product (last gate leftmost) on the 2^n_qubits space.
Operator gate_sequence_unitary(const GateSequence& seq);

/// Inverse of gate_matrix for a known kind: angle in (-2 pi, 2 pi].
double rotation_angle(GateKind kind, const Operator& u);

struct MagnusDefect {
    double max_step_defect = 0.0;  // operator norm, per Trotter block vs Magnus step
    double endpoint_defect = 0.0;  // operator norm of the full products
};

/// Compares each 3-gate Trotter block with the Magnus step
/// exp(-i(H dt + sigma sx dW_k)), dW_k recovered from the noise-gate angle.
MagnusDefect verify_against_magnus(const GateSequence& seq);

/// Operator norm of E_dW[U_T (.) U_T^dag - U_M (.) U_M^dag] in the Liouville
/// representation, dW ~ N(0, dt), by Gauss-Hermite quadrature.
double mean_step_channel_defect(double eps, double omega, double sigma, double dt, unsigned quadrature_order = 40);

/// Probabilists' Gauss-Hermite nodes and weights (weights sum to one).
void gauss_hermite(unsigned order, std::vector<double>& nodes, std::vector<double>& weights);

void write_gate_file(std::ostream& out, const GateSequence& seq);
GateSequence read_gate_file(std::istream& in);

}  // namespace stoq
