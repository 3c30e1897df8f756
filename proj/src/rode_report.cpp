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

#include <cmath>

#include "stoq/ensemble.hpp"
#include "stoq/master.hpp"
#include "stoq/rode.hpp"

namespace stoq {

RodeRedfieldReport rode_vs_redfield_report(const RodeModel& model, const StateVector& psi0, double t_final,
                                           double dt, std::size_t n_trajectories, std::uint64_t seed,
                                           unsigned threads) {
    require_time_step(dt);
    if (!(t_final > 0.0)) throw Error(ErrorCode::InvalidArgument, "final time must be positive");
    const auto n_steps = static_cast<std::size_t>(std::llround(t_final / dt));

    RodeRedfieldReport report;
    Eigen::SelfAdjointEigenSolver<Operator> eig(model.hamiltonian(), Eigen::EigenvaluesOnly);
    const double width = eig.eigenvalues().maxCoeff() - eig.eigenvalues().minCoeff();
    const double r_norm = operator_norm(model.noise_operator());
    const double strength = model.noise().std * model.noise().std * model.noise().tau_c * r_norm * r_norm;
    report.coupling_ratio = strength == 0.0 ? 0.0 : (width > 0.0 ? strength / width : INFINITY);
    report.weak_coupling = report.coupling_ratio <= kWeakCouplingRatio;

    EnsembleOptions options;
    options.n_trajectories = n_trajectories;
    options.dt = dt;
    options.n_steps = n_steps;
    options.seed = seed;
    options.threads = threads;
    options.observables = hermitian_basis(model.dim());
    const EnsembleResult ensemble =
        run_ensemble(RodeEngine{model, RodeScheme::MidpointUnitary, psi0}, options);

    const RedfieldModel redfield(model.hamiltonian(), model.noise_operator(), model.noise());
    const Evolution oracle = redfield_evolve(redfield, projector(psi0), dt, n_steps);
    report.comparison = compare(ensemble, oracle.states, StderrOrAbsRule{3.0, 1e-2});
    return report;
}

}  // namespace stoq
