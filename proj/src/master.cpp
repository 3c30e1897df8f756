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

#include "stoq/master.hpp"

#include <cmath>
#include <utility>

#include "stoq/errors.hpp"

namespace stoq {

namespace {

const Complex kMinusI(0, -1);

Operator von_neumann(const Operator& h, const DensityMatrix& rho) { return kMinusI * commutator(h, rho); }

}  // namespace

void validate(const LindbladModel& model) {
    require_hermitian(model.hamiltonian, "Hamiltonian H");
    for (const auto& ch : model.channels) {
        require_same_shape(model.hamiltonian, ch.op, "Lindblad channel");
        if (!(ch.rate >= 0.0) || !std::isfinite(ch.rate)) {
            throw Error(ErrorCode::InvalidArgument, "Lindblad rates must be finite and non-negative");
        }
        if (!ch.op.allFinite()) throw Error(ErrorCode::InvalidArgument, "Lindblad operator has non-finite entries");
    }
}

Operator dissipator(const std::vector<LindbladChannel>& channels, const DensityMatrix& rho) {
    Operator out = Operator::Zero(rho.rows(), rho.cols());
    for (const auto& ch : channels) {
        require_same_shape(ch.op, rho, "dissipator");
        const Operator ldl = ch.op.adjoint() * ch.op;
        out.noalias() += ch.rate * (ch.op * rho * ch.op.adjoint());
        out -= (0.5 * ch.rate) * anticommutator(ldl, rho);
    }
    return out;
}

Operator lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho) {
    require_same_shape(model.hamiltonian, rho, "lindblad_rhs");
    return von_neumann(model.hamiltonian, rho) + dissipator(model.channels, rho);
}

Operator white_noise_sle_rhs(const Operator& hamiltonian, const Operator& noise_operator, double gamma,
                             const DensityMatrix& rho) {
    require_hermitian(noise_operator, "noise operator R");
    require_same_shape(hamiltonian, rho, "white_noise_sle_rhs");
    return von_neumann(hamiltonian, rho) - gamma * commutator(noise_operator, commutator(noise_operator, rho));
}

Operator sle_trajectory_rhs(const Operator& effective_hamiltonian, const std::vector<LindbladChannel>& channels,
                            const DensityMatrix& rho) {
    require_hermitian(effective_hamiltonian, "effective Hamiltonian");
    require_same_shape(effective_hamiltonian, rho, "sle_trajectory_rhs");
    return von_neumann(effective_hamiltonian, rho) + dissipator(channels, rho);
}

Evolution rk4_evolve(const Generator& rhs, const DensityMatrix& rho0, double dt, std::size_t n_steps) {
    require_time_step(dt);
    require_square(rho0, "initial density matrix");
    Evolution ev;
    ev.times.reserve(n_steps + 1);
    ev.states.reserve(n_steps + 1);
    DensityMatrix rho = rho0;
    ev.times.push_back(0.0);
    ev.states.push_back(rho);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = double(k) * dt;
        const Operator k1 = rhs(t, rho);
        const Operator k2 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k1);
        const Operator k3 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k2);
        const Operator k4 = rhs(t + dt, rho + dt * k3);
        DensityMatrix next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const DensityMatrix herm = 0.5 * (next + next.adjoint());
        const double correction = next.size() ? (next - herm).cwiseAbs().maxCoeff() : 0.0;
        ev.max_hermitian_correction = std::max(ev.max_hermitian_correction, correction);
        rho = herm;
        if (!rho.allFinite()) {
            throw Error(ErrorCode::NumericalBlowup, "master equation state became non-finite at step " +
                                                        std::to_string(k + 1));
        }
        const double t_next = double(k + 1) * dt;
        const double lambda_min = min_eigenvalue(rho);
        if (lambda_min < -kPositivityTolerance) {
            ++ev.positivity_violations;
            if (!ev.positivity_warning || lambda_min < ev.positivity_warning->min_eigenvalue) {
                ev.positivity_warning = PositivityWarning{t_next, lambda_min};
            }
        }
        ev.times.push_back(t_next);
        ev.states.push_back(rho);
    }
    return ev;
}

Evolution lindblad_evolve(const LindbladModel& model, const DensityMatrix& rho0, double dt, std::size_t n_steps) {
    validate(model);
    require_same_shape(model.hamiltonian, rho0, "lindblad_evolve");
    return rk4_evolve([&model](double, const DensityMatrix& rho) { return lindblad_rhs(model, rho); }, rho0, dt,
                      n_steps);
}

RedfieldModel::RedfieldModel(Operator hamiltonian, Operator noise_operator, NoiseSpec noise)
    : h_(std::move(hamiltonian)), r_(std::move(noise_operator)), noise_(std::move(noise)) {
    require_hermitian(h_, "Hamiltonian H");
    require_hermitian(r_, "noise operator R");
    require_same_shape(h_, r_, "Redfield model");
}

std::vector<Operator> redfield_memory_operators(const RedfieldModel& model, double h, std::size_t n_points) {
    require_time_step(h);
    const Eigen::Index dim = model.hamiltonian().rows();
    Eigen::SelfAdjointEigenSolver<Operator> eig(0.5 * (model.hamiltonian() + model.hamiltonian().adjoint()));
    const Operator& v = eig.eigenvectors();
    const Eigen::VectorXd& energies = eig.eigenvalues();
    const Operator r_eig = v.adjoint() * model.noise_operator() * v;

    // (R_u)_{ab} = R_ab e^{-i(E_a - E_b) u} in the eigenbasis of H.
    auto kernel = [&](std::size_t j) {
        const double u = double(j) * h;
        const double c = std::get<double>(covariance(model.noise(), u, 0.0));
        Operator k(dim, dim);
        for (Eigen::Index a = 0; a < dim; ++a) {
            for (Eigen::Index b = 0; b < dim; ++b) {
                k(a, b) = c * r_eig(a, b) * std::exp(kMinusI * ((energies(a) - energies(b)) * u));
            }
        }
        return k;
    };

    std::vector<Operator> out;
    out.reserve(n_points);
    Operator integral = Operator::Zero(dim, dim);
    Operator previous = kernel(0);
    for (std::size_t j = 0; j < n_points; ++j) {
        if (j > 0) {
            Operator current = kernel(j);
            integral += (0.5 * h) * (previous + current);
            previous = std::move(current);
        }
        out.push_back(v * integral * v.adjoint());
    }
    return out;
}

Evolution redfield_evolve(const RedfieldModel& model, const DensityMatrix& rho0, double dt, std::size_t n_steps) {
    require_time_step(dt);
    require_same_shape(model.hamiltonian(), rho0, "redfield_evolve");
    const Operator& h = model.hamiltonian();
    const Operator& r = model.noise_operator();
    if (const auto* white = std::get_if<WhiteNoise>(&model.noise())) {
        const double gamma = white_noise_rate(*white);
        return rk4_evolve([&](double, const DensityMatrix& rho) { return white_noise_sle_rhs(h, r, gamma, rho); },
                          rho0, dt, n_steps);
    }
    const double half = 0.5 * dt;
    const auto memory = redfield_memory_operators(model, half, 2 * n_steps + 1);
    auto rhs = [&](double t, const DensityMatrix& rho) -> Operator {
        const auto j = static_cast<std::size_t>(std::llround(t / half));
        return von_neumann(h, rho) - commutator(r, commutator(memory[j], rho));
    };
    return rk4_evolve(rhs, rho0, dt, n_steps);
}

}  // namespace stoq
