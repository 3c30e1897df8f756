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

#include "stoq/convergence.hpp"

#include <cmath>

#include "stoq/errors.hpp"

namespace stoq {

namespace {

std::size_t step_count(double t_final, double dt) {
    const double n = t_final / dt;
    const auto rounded = static_cast<std::size_t>(std::llround(n));
    if (rounded == 0 || std::abs(n - double(rounded)) > 1e-9 * n) {
        throw Error(ErrorCode::InvalidArgument, "final time must be a multiple of the coarse step");
    }
    return rounded;
}

StateVector endpoint_ito(const ItoModel& model, const StateVector& psi0, const WienerPath& path, ItoScheme scheme) {
    StateVector last;
    detail::walk_ito(model, psi0, path, scheme, [&](std::size_t k, const StateVector& psi) {
        if (k == path.size()) last = psi;
    });
    return last;
}

}  // namespace

double fitted_order(const std::vector<ConvergenceLevel>& levels) {
    if (levels.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two levels to fit an order");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(levels.size());
    for (const auto& l : levels) {
        const double x = std::log(l.dt);
        const double y = std::log(l.mean_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

StrongOrderReport measure_ito_strong_order(const ItoModel& model, const StateVector& psi0, double t_final,
                                           double dt_coarse, unsigned levels, unsigned reference_factor,
                                           std::size_t n_paths, std::uint64_t seed) {
    require_time_step(dt_coarse);
    require_normalized(psi0);
    if (levels < 2 || reference_factor < 2 || n_paths == 0) {
        throw Error(ErrorCode::InvalidArgument, "need >= 2 levels, reference factor >= 2 and >= 1 path");
    }
    const std::size_t n_coarse = step_count(t_final, dt_coarse);
    StrongOrderReport report;
    std::vector<double> em_sum(levels, 0.0), mil_sum(levels, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
        RngStream stream(seed, p);
        RngStream bridge = stream.substream(1);
        std::vector<WienerPath> paths;
        paths.push_back(sample_wiener_increments(dt_coarse, n_coarse, stream));
        for (unsigned l = 1; l < levels; ++l) paths.push_back(refine_wiener_path(paths.back(), 2, bridge));
        const WienerPath reference_path = refine_wiener_path(paths.back(), reference_factor, bridge);
        const StateVector reference = endpoint_ito(model, psi0, reference_path, ItoScheme::Milstein);
        for (unsigned l = 0; l < levels; ++l) {
            em_sum[l] += (endpoint_ito(model, psi0, paths[l], ItoScheme::EulerMaruyama) - reference).norm();
            mil_sum[l] += (endpoint_ito(model, psi0, paths[l], ItoScheme::Milstein) - reference).norm();
        }
    }
    for (unsigned l = 0; l < levels; ++l) {
        const double dt = dt_coarse / double(1u << l);
        report.euler_maruyama.push_back({dt, em_sum[l] / double(n_paths)});
        report.milstein.push_back({dt, mil_sum[l] / double(n_paths)});
    }
    report.euler_maruyama_slope = fitted_order(report.euler_maruyama);
    report.milstein_slope = fitted_order(report.milstein);
    return report;
}

RodeRefinementReport measure_rode_refinement(const RodeModel& model, const StateVector& psi0, double t_final,
                                             double dt_coarse, unsigned levels, unsigned reference_factor,
                                             std::size_t n_paths, std::uint64_t seed) {
    require_time_step(dt_coarse);
    require_normalized(psi0);
    if (levels < 2 || reference_factor < 2 || n_paths == 0) {
        throw Error(ErrorCode::InvalidArgument, "need >= 2 levels, reference factor >= 2 and >= 1 path");
    }
    const std::size_t n_coarse = step_count(t_final, dt_coarse);
    // Finest half-step grid: dt_ref / 2 with dt_ref = dt_coarse / (2^(levels-1) * reference_factor).
    const std::size_t ref_multiplier = (std::size_t(1) << (levels - 1)) * reference_factor;
    const double dt_ref = dt_coarse / double(ref_multiplier);
    const std::size_t n_ref = n_coarse * ref_multiplier;

    auto endpoint = [&](const std::vector<double>& z_fine, std::size_t stride_steps, double dt) {
        // Z at half steps of dt sits every stride_steps fine half-points.
        std::vector<double> z;
        z.reserve(z_fine.size() / stride_steps + 1);
        for (std::size_t i = 0; i < z_fine.size(); i += stride_steps) z.push_back(z_fine[i]);
        StateVector last;
        detail::walk_rode(model, psi0, dt, z, RodeScheme::MidpointUnitary, [&](std::size_t k, const StateVector& psi) {
            if (2 * k + 1 == z.size()) last = psi;
        });
        return last;
    };

    std::vector<double> sums(levels, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
        RngStream stream(seed, p);
        const auto z_fine = sample_ou_path(model.noise(), 0.5 * dt_ref, 2 * n_ref, stream);
        const StateVector reference = endpoint(z_fine, 1, dt_ref);
        for (unsigned l = 0; l < levels; ++l) {
            const std::size_t mult = ref_multiplier >> l;  // dt_l / dt_ref
            sums[l] += (endpoint(z_fine, mult, dt_coarse / double(1u << l)) - reference).norm();
        }
    }
    RodeRefinementReport report;
    for (unsigned l = 0; l < levels; ++l) {
        report.levels.push_back({dt_coarse / double(1u << l), sums[l] / double(n_paths)});
    }
    for (unsigned l = 0; l + 1 < levels; ++l) {
        report.reduction_factors.push_back(report.levels[l].mean_error / report.levels[l + 1].mean_error);
    }
    report.slope = fitted_order(report.levels);
    return report;
}

}  // namespace stoq
