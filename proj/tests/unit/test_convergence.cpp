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

#include <gtest/gtest.h>

#include <cmath>

#include "stoq/convergence.hpp"
#include "stoq/errors.hpp"

namespace {

using namespace stoq;

TEST(FittedOrder, RecoversExactPowerLaws) {
    for (double p : {0.5, 1.0, 2.0}) {
        std::vector<ConvergenceLevel> levels;
        for (int l = 0; l < 5; ++l) {
            const double dt = 0.1 / std::pow(2.0, l);
            levels.push_back({dt, 3.0 * std::pow(dt, p)});
        }
        EXPECT_NEAR(fitted_order(levels), p, 1e-12);
    }
}

TEST(StrongOrder, NoiselessCaseIsFirstOrderForBothSchemes) {
    // Without noise both schemes reduce to explicit Euler.
    const ItoModel model(pauli_z() + 0.5 * pauli_x(), sigma_minus(), 0.0);
    const StrongOrderReport r = measure_ito_strong_order(model, plus_state(), 1.0, 1e-2, 4, 8, 3, 1);
    ASSERT_EQ(r.euler_maruyama.size(), 4u);
    // Against a reference at dt_min / 8 the global error is ~ C (dt - dt_ref).
    const double dt_ref = 1e-2 / 8.0 / 8.0;
    const double c0 = r.euler_maruyama[0].mean_error / (1e-2 - dt_ref);
    for (std::size_t l = 0; l < 4; ++l) {
        EXPECT_DOUBLE_EQ(r.euler_maruyama[l].mean_error, r.milstein[l].mean_error);
        EXPECT_DOUBLE_EQ(r.euler_maruyama[l].dt, 1e-2 / std::pow(2.0, double(l)));
        EXPECT_NEAR(r.euler_maruyama[l].mean_error / (r.euler_maruyama[l].dt - dt_ref), c0, 0.02 * c0) << l;
    }
    EXPECT_NEAR(r.milstein_slope, 1.0, 0.1);
}

TEST(StrongOrder, NilpotentNoiseMakesEulerMatchMilstein) {
    // B^2 = 0 removes the Milstein correction.
    const ItoModel model(pauli_z(), sigma_minus(), 1.0);
    const StrongOrderReport r = measure_ito_strong_order(model, plus_state(), 0.5, 1e-2, 3, 4, 20, 2);
    for (std::size_t l = 0; l < 3; ++l) EXPECT_DOUBLE_EQ(r.euler_maruyama[l].mean_error, r.milstein[l].mean_error);
}

TEST(StrongOrder, NoisySlopes) {
    Operator b(2, 2);
    b << Complex(0.3, 0), Complex(1.0, 0), Complex(0, 0.2), Complex(-0.4, 0);
    const ItoModel model(pauli_z() + 0.5 * pauli_x(), b, 1.0);
    const StrongOrderReport r = measure_ito_strong_order(model, plus_state(), 1.0, 1e-2, 4, 8, 60, 3);
    EXPECT_NEAR(r.euler_maruyama_slope, 0.5, 0.3);
    EXPECT_NEAR(r.milstein_slope, 1.0, 0.3);
    EXPECT_LT(r.milstein.back().mean_error, r.euler_maruyama.back().mean_error);
}

TEST(RodeRefinement, ReportShape) {
    const RodeModel model(pauli_z(), pauli_x(), OrnsteinUhlenbeck{0.5, 0.5, InitialValueMode::StationaryDraw, 0.0});
    const RodeRefinementReport r = measure_rode_refinement(model, plus_state(), 1.0, 1e-1, 4, 4, 10, 4);
    ASSERT_EQ(r.levels.size(), 4u);
    ASSERT_EQ(r.reduction_factors.size(), 3u);
    for (std::size_t l = 0; l + 1 < r.levels.size(); ++l) {
        EXPECT_DOUBLE_EQ(r.reduction_factors[l], r.levels[l].mean_error / r.levels[l + 1].mean_error);
    }
}

TEST(Convergence, RejectsDegenerateRequests) {
    const ItoModel model(pauli_z(), sigma_minus(), 1.0);
    EXPECT_THROW(measure_ito_strong_order(model, plus_state(), 1.0, 1e-2, 1, 8, 3, 1), Error);
    EXPECT_THROW(measure_ito_strong_order(model, plus_state(), 1.0, 0.0, 3, 8, 3, 1), Error);
    EXPECT_THROW(measure_ito_strong_order(model, plus_state(), 1.0, 1e-2, 3, 8, 0, 1), Error);
}

}  // namespace
