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

#include "stoq/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "stoq/errors.hpp"
#include "stoq/strat_unitary.hpp"

namespace stoq {

namespace {

std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

const char* kind_name(GateKind kind) { return kind == GateKind::RZ ? "RZ" : "RX"; }

Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Operator qubit_model_hamiltonian(double eps, double omega) { return eps * pauli_z() + omega * pauli_x(); }

// Embeds a single-qubit gate on `qubit` (qubit 0 is the most significant factor).
Operator embed(const Operator& g, unsigned qubit, unsigned n_qubits) {
    Operator out = Operator::Identity(1, 1);
    for (unsigned q = 0; q < n_qubits; ++q) out = kron(out, q == qubit ? g : identity(2));
    return out;
}

}  // namespace

GateSequence emit_trajectory_circuit(double eps, double omega, double sigma, double dt, std::size_t n_steps,
                                     RngStream& stream) {
    require_time_step(dt);
    GateSequence seq;
    seq.n_qubits = 1;
    seq.metadata = {stream.master_seed(), stream.trajectory_index(), dt, n_steps, eps, omega, sigma};
    const WienerPath path = sample_wiener_increments(dt, n_steps, stream);
    seq.gates.reserve(3 * n_steps);
    for (double dw : path.increments) {
        seq.gates.push_back({GateKind::RZ, 0, 2.0 * eps * dt});
        seq.gates.push_back({GateKind::RX, 0, 2.0 * omega * dt});
        seq.gates.push_back({GateKind::RX, 0, 2.0 * sigma * dw});
    }
    return seq;
}

Operator gate_matrix(const Gate& gate) {
    if (!std::isfinite(gate.angle)) throw Error(ErrorCode::InvalidArgument, "gate angle must be finite");
    const double half = 0.5 * gate.angle;
    const double c = std::cos(half);
    const double s = std::sin(half);
    Operator m(2, 2);
    if (gate.kind == GateKind::RZ) {
        m << Complex(c, -s), 0, 0, Complex(c, s);
    } else {
        m << c, Complex(0, -s), Complex(0, -s), c;
    }
    return m;
}

double rotation_angle(GateKind kind, const Operator& u) {
    if (u.rows() != 2 || u.cols() != 2) throw Error(ErrorCode::DimensionMismatch, "rotation must be 2x2");
    const double c = u(0, 0).real();
    const double s = kind == GateKind::RZ ? -u(0, 0).imag() : -u(1, 0).imag();
    return 2.0 * std::atan2(s, c);
}

Operator gate_sequence_unitary(const GateSequence& seq) {
    if (seq.n_qubits == 0 || seq.n_qubits > 10) {
        throw Error(ErrorCode::InvalidArgument, "gate sequences support 1..10 qubits");
    }
    const Eigen::Index dim = Eigen::Index(1) << seq.n_qubits;
    Operator u = Operator::Identity(dim, dim);
    for (const auto& gate : seq.gates) {
        if (gate.qubit >= seq.n_qubits) throw Error(ErrorCode::InvalidArgument, "gate qubit index out of range");
        const Operator g = seq.n_qubits == 1 ? gate_matrix(gate) : embed(gate_matrix(gate), gate.qubit, seq.n_qubits);
        u = g * u;
    }
    return u;
}

MagnusDefect verify_against_magnus(const GateSequence& seq) {
    const auto& m = seq.metadata;
    if (!m.dt || !m.n_steps || !m.eps || !m.omega || !m.sigma) {
        throw Error(ErrorCode::MetadataMissing, "gate sequence needs dt, n_steps, eps, omega and sigma metadata");
    }
    if (seq.n_qubits != 1 || seq.gates.size() != 3 * *m.n_steps) {
        throw Error(ErrorCode::InvalidArgument, "expected one qubit and three gates per step");
    }
    const StratModel model(qubit_model_hamiltonian(*m.eps, *m.omega), pauli_x(), *m.sigma);
    MagnusDefect out;
    Operator trotter_total = identity(2);
    Operator magnus_total = identity(2);
    for (std::size_t k = 0; k < *m.n_steps; ++k) {
        const Gate& noise_gate = seq.gates[3 * k + 2];
        const double dw = *m.sigma > 0.0 ? noise_gate.angle / (2.0 * *m.sigma) : 0.0;
        const Operator block =
            gate_matrix(noise_gate) * gate_matrix(seq.gates[3 * k + 1]) * gate_matrix(seq.gates[3 * k]);
        const Operator magnus = strat_step_unitary(model, *m.dt, dw);
        out.max_step_defect = std::max(out.max_step_defect, operator_norm(block - magnus));
        trotter_total = block * trotter_total;
        magnus_total = magnus * magnus_total;
    }
    out.endpoint_defect = operator_norm(trotter_total - magnus_total);
    return out;
}

void gauss_hermite(unsigned order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order == 0) throw Error(ErrorCode::InvalidArgument, "quadrature order must be positive");
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (unsigned k = 1; k < order; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(double(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    nodes.resize(order);
    weights.resize(order);
    for (unsigned k = 0; k < order; ++k) {
        nodes[k] = eig.eigenvalues()(k);
        const double v0 = eig.eigenvectors()(0, k);
        weights[k] = v0 * v0;
    }
}

double mean_step_channel_defect(double eps, double omega, double sigma, double dt, unsigned quadrature_order) {
    require_time_step(dt);
    std::vector<double> nodes, weights;
    gauss_hermite(quadrature_order, nodes, weights);
    const StratModel model(qubit_model_hamiltonian(eps, omega), pauli_x(), sigma);
    const Operator fixed = gate_matrix({GateKind::RX, 0, 2.0 * omega * dt}) * gate_matrix({GateKind::RZ, 0, 2.0 * eps * dt});
    Operator mean = Operator::Zero(4, 4);
    for (unsigned i = 0; i < quadrature_order; ++i) {
        const double dw = nodes[i] * std::sqrt(dt);
        const Operator trotter = gate_matrix({GateKind::RX, 0, 2.0 * sigma * dw}) * fixed;
        const Operator magnus = strat_step_unitary(model, dt, dw);
        mean += weights[i] * (kron(trotter.conjugate(), trotter) - kron(magnus.conjugate(), magnus));
    }
    return operator_norm(mean);
}

void write_gate_file(std::ostream& out, const GateSequence& seq) {
    const auto& m = seq.metadata;
    out << "# stoqtraj v1\n";
    out << "# meta n_qubits=" << seq.n_qubits;
    if (m.seed) out << " seed=" << *m.seed;
    if (m.trajectory_index) out << " trajectory_index=" << *m.trajectory_index;
    if (m.dt) out << " dt=" << format17(*m.dt);
    if (m.n_steps) out << " n_steps=" << *m.n_steps;
    if (m.eps) out << " eps=" << format17(*m.eps);
    if (m.omega) out << " omega=" << format17(*m.omega);
    if (m.sigma) out << " sigma=" << format17(*m.sigma);
    out << '\n';
    for (const auto& g : seq.gates) out << kind_name(g.kind) << ' ' << g.qubit << ' ' << format17(g.angle) << '\n';
    if (!out) throw Error(ErrorCode::IoError, "failed writing gate file");
}

GateSequence read_gate_file(std::istream& in) {
    GateSequence seq;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::ParseError, "gate file line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.rfind("# stoqtraj v1", 0) == 0) {
            saw_header = true;
            continue;
        }
        if (line.rfind("# meta", 0) == 0) {
            std::istringstream fields(line.substr(6));
            std::string kv;
            while (fields >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) fail("malformed meta field '" + kv + "'");
                const std::string key = kv.substr(0, eq);
                const std::string value = kv.substr(eq + 1);
                try {
                    if (key == "n_qubits") seq.n_qubits = unsigned(std::stoul(value));
                    else if (key == "seed") seq.metadata.seed = std::stoull(value);
                    else if (key == "trajectory_index") seq.metadata.trajectory_index = std::stoull(value);
                    else if (key == "dt") seq.metadata.dt = std::stod(value);
                    else if (key == "n_steps") seq.metadata.n_steps = std::stoull(value);
                    else if (key == "eps") seq.metadata.eps = std::stod(value);
                    else if (key == "omega") seq.metadata.omega = std::stod(value);
                    else if (key == "sigma") seq.metadata.sigma = std::stod(value);
                } catch (const std::logic_error&) {
                    fail("bad value for '" + key + "'");
                }
            }
            continue;
        }
        if (line[0] == '#') continue;
        std::istringstream fields(line);
        std::string kind;
        unsigned qubit = 0;
        std::string angle_text;
        if (!(fields >> kind >> qubit >> angle_text)) fail("expected '<RZ|RX> <qubit> <angle>'");
        Gate g;
        if (kind == "RZ") g.kind = GateKind::RZ;
        else if (kind == "RX") g.kind = GateKind::RX;
        else fail("unknown gate '" + kind + "'");
        g.qubit = qubit;
        try {
            g.angle = std::stod(angle_text);
        } catch (const std::logic_error&) {
            fail("bad angle");
        }
        seq.gates.push_back(g);
    }
    if (!saw_header) throw Error(ErrorCode::ParseError, "missing '# stoqtraj v1' header");
    return seq;
}

}  // namespace stoq
