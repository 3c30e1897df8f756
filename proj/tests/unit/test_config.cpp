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

#include <random>

#include "stoq/config.hpp"
#include "stoq/errors.hpp"

namespace {

using namespace stoq;

const char* kDephasing = R"({
  "mode": "ensemble",
  "system": {"dim": 2, "H": [[[1,0],[0,0]],[[0,0],[-1,0]]], "R": [[[1,0],[0,0]],[[0,0],[-1,0]]]},
  "noise": {"type": "white", "sigma": 0.7},
  "integrator": {"engine": "strat", "dt": 0.001, "n_steps": 100}
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return text.replace(pos, from.size(), to);
}

ErrorCode code_of(const std::string& text, std::string* message = nullptr) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.code();
    }
    ADD_FAILURE() << "config was accepted";
    return ErrorCode::IoError;
}

TEST(ParseConfig, MinimalDefaults) {
    const RunConfig c = parse_config(kDephasing);
    EXPECT_EQ(c.mode, RunMode::Ensemble);
    EXPECT_EQ(c.ensemble.seed, 0u);
    EXPECT_EQ(c.ensemble.n, 1u);
    EXPECT_TRUE(c.outputs.observables.empty());
    EXPECT_EQ(c.oracle, OracleKind::None);
    EXPECT_EQ(c.integrator.engine, EngineKind::Strat);
    EXPECT_EQ(c.system.hamiltonian, pauli_z());
    EXPECT_DOUBLE_EQ(std::get<WhiteNoise>(c.noise).sigma, 0.7);
}

TEST(ParseConfig, StratRequiresHermitianR) {
    std::string message;
    const std::string text = with(kDephasing, R"("R": [[[1,0],[0,0]],[[0,0],[-1,0]]])", R"("R": [[[0,0],[1,0]],[[0,0],[0,0]]])");
    EXPECT_EQ(code_of(text, &message), ErrorCode::ValidationError);
    EXPECT_EQ(message, "strat engine requires Hermitian R");
}

TEST(ParseConfig, ItoIsWhiteNoiseOnly) {
    std::string text = with(kDephasing, R"({"type": "white", "sigma": 0.7})", R"({"type": "ou", "std": 0.1, "tau_c": 0.5})");
    text = with(text, R"("engine": "strat")", R"("engine": "ito-em")");
    text = with(text, R"("R": )", R"("B_is_iR": true, "R": )");
    std::string message;
    EXPECT_EQ(code_of(text, &message), ErrorCode::ValidationError);
    EXPECT_EQ(message, "ito engine is white-noise only; use rode");
}

TEST(ParseConfig, CompatibilityMatrix) {
    const std::string ou = R"({"type": "ou", "std": 0.1, "tau_c": 0.5})";
    const std::string white = R"({"type": "white", "sigma": 0.7})";
    auto make = [&](const std::string& engine, const std::string& noise) {
        std::string t = with(kDephasing, R"("engine": "strat")", "\"engine\": \"" + engine + "\"");
        t = with(t, white, noise);
        return with(t, R"("R": )", R"("B": [[[0,0],[1,0]],[[0,0],[0,0]]], "R": )");
    };
    EXPECT_NO_THROW(parse_config(make("ito-milstein", white)));
    EXPECT_EQ(code_of(make("strat", ou)), ErrorCode::ValidationError);
    EXPECT_NO_THROW(parse_config(make("rode-midpoint", ou)));
    EXPECT_NO_THROW(parse_config(make("rode-heun", ou)));
    EXPECT_EQ(code_of(make("rode-heun", white)), ErrorCode::ValidationError);
    EXPECT_NO_THROW(parse_config(make("sle", white)));
    EXPECT_NO_THROW(parse_config(make("sle", ou)));
}

TEST(ParseConfig, ItoAcceptsNonHermitianB) {
    std::string text = with(kDephasing, R"("engine": "strat")", R"("engine": "ito-em")");
    text = with(text, R"("R": [[[1,0],[0,0]],[[0,0],[-1,0]]])", R"("B": [[[0,0],[1,0]],[[0,0],[0,0]]])");
    const RunConfig c = parse_config(text);
    EXPECT_EQ(*c.system.b, sigma_minus());
    EXPECT_TRUE(std::holds_alternative<ItoEngine>(make_engine(c)));
}

TEST(ParseConfig, RejectsNonGaussianNoise) {
    std::string message;
    EXPECT_EQ(code_of(with(kDephasing, R"("type": "white")", R"("type": "poisson")"), &message), ErrorCode::ValidationError);
    EXPECT_NE(message.find("Gaussian"), std::string::npos);
}

TEST(ParseConfig, TimeStep) {
    EXPECT_EQ(code_of(with(kDephasing, R"("dt": 0.001)", R"("dt": 0)")), ErrorCode::InvalidTimeStep);
    EXPECT_EQ(code_of(with(kDephasing, R"("dt": 0.001)", R"("dt": -0.1)")), ErrorCode::InvalidTimeStep);
}

TEST(ParseConfig, ParseErrorReportsLine) {
    std::string message;
    EXPECT_EQ(code_of(with(kDephasing, R"("noise": {"type")", R"("noise": {"type" 7,)"), &message), ErrorCode::ParseError);
    EXPECT_EQ(message.rfind("line 4:", 0), 0u) << message;
}

TEST(ParseConfig, StructuralRules) {
    EXPECT_EQ(code_of(with(kDephasing, R"("dim": 2)", R"("dim": 3)")), ErrorCode::ValidationError);
    EXPECT_EQ(code_of(with(kDephasing, R"("mode": "ensemble")", R"("mode": "compare")")), ErrorCode::ValidationError);
    EXPECT_EQ(code_of(with(kDephasing, R"("mode": "ensemble")", R"("mode": "emit-circuit")")), ErrorCode::ValidationError);
    EXPECT_EQ(code_of(with(kDephasing, R"("mode": "ensemble")", R"("mode": "convergence")")), ErrorCode::ValidationError);
    EXPECT_EQ(code_of(with(kDephasing, R"("mode": "ensemble")", R"("mode": "sideways")")), ErrorCode::ValidationError);
    EXPECT_EQ(code_of(with(kDephasing, R"("mode": "ensemble")", R"("mode": "ensemble", "extra": 1)")),
              ErrorCode::ValidationError);
    EXPECT_EQ(code_of(with(kDephasing, R"([[[1,0],[0,0]],[[0,0],[-1,0]]], "R")", R"([[[1,0],[0,1]],[[0,0],[-1,0]]], "R")")),
              ErrorCode::ValidationError);
    EXPECT_EQ(code_of(with(kDephasing, R"("sigma": 0.7)", R"("sigma": 0)")), ErrorCode::ValidationError);
    EXPECT_EQ(code_of(with(kDephasing, R"("mode": "ensemble")", R"("mode": "ensemble", "oracle": "redfield", "ensemble": {"N": 0})")),
              ErrorCode::ValidationError);
    EXPECT_EQ(code_of(with(kDephasing, R"("sigma": 0.7})", R"("sigma": 0.7}, "oracle": "lindblad", "system2": {})")),
              ErrorCode::ValidationError);
    EXPECT_EQ(code_of("[1, 2]"), ErrorCode::ValidationError);
}

TEST(ParseConfig, OptionalSections) {
    const std::string text = with(kDephasing, R"("mode": "ensemble")", R"("mode": "compare",
  "oracle": "lindblad",
  "ensemble": {"N": 64, "seed": 18446744073709551615},
  "compare": {"k": 4, "floor": 0.02},
  "outputs": {"prefix": "run", "record_every": 10, "include_rho": true,
              "observables": [{"name": "Z", "matrix": [[[1,0],[0,0]],[[0,0],[-1,0]]]}]})");
    const RunConfig c = parse_config(text);
    EXPECT_EQ(c.mode, RunMode::Compare);
    EXPECT_EQ(c.ensemble.seed, 18446744073709551615ull);
    EXPECT_EQ(c.ensemble.n, 64u);
    EXPECT_EQ(c.compare.k, 4.0);
    EXPECT_EQ(c.outputs.prefix, "run");
    ASSERT_EQ(c.outputs.observables.size(), 1u);
    EXPECT_EQ(c.outputs.observables[0].name, "Z");
    EXPECT_TRUE(c.outputs.include_rho);
}

RunConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 5);
    auto hermitian = [&](Eigen::Index n) {
        Operator m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
        return Operator(0.5 * (m + m.adjoint()));
    };
    RunConfig c;
    const Eigen::Index dim = 2 + pick(rng) % 3;
    c.system.dim = dim;
    c.system.hamiltonian = hermitian(dim);
    c.system.r = hermitian(dim);
    c.integrator.engine = EngineKind(pick(rng));
    c.integrator.dt = std::abs(u(rng)) * 1e-2 + 1e-6;
    c.integrator.n_steps = 1 + std::size_t(pick(rng)) * 37;
    const bool needs_ou = c.integrator.engine == EngineKind::RodeMidpoint || c.integrator.engine == EngineKind::RodeHeun;
    if (needs_ou || (c.integrator.engine == EngineKind::Sle && pick(rng) % 2)) {
        OrnsteinUhlenbeck ou{std::abs(u(rng)) + 0.01, std::abs(u(rng)) + 0.01, InitialValueMode::StationaryDraw, 0.0};
        if (pick(rng) % 2) {
            ou.z0_mode = InitialValueMode::Fixed;
            ou.z0 = u(rng);
        }
        c.noise = ou;
        c.oracle = pick(rng) % 2 ? OracleKind::Redfield : OracleKind::None;
    } else {
        c.noise = WhiteNoise{std::abs(u(rng)) + 0.01};
        c.oracle = OracleKind(pick(rng) % 4);
    }
    if (c.integrator.engine == EngineKind::ItoEm || c.integrator.engine == EngineKind::ItoMilstein) {
        if (pick(rng) % 2) {
            Operator b(dim, dim);
            for (Eigen::Index i = 0; i < dim; ++i)
                for (Eigen::Index j = 0; j < dim; ++j) b(i, j) = Complex(u(rng), u(rng));
            c.system.b = b;
        } else {
            c.system.b_is_ir = true;
        }
    }
    if (c.integrator.engine == EngineKind::Sle && c.oracle != OracleKind::Redfield && pick(rng) % 2) {
        c.system.channels.push_back({hermitian(dim), std::abs(u(rng))});
    }
    c.mode = c.oracle == OracleKind::None ? RunMode(pick(rng) % 2) : RunMode(pick(rng) % 4);
    c.ensemble.n = 1 + std::size_t(pick(rng)) * 100;
    c.ensemble.seed = rng();
    c.compare.k = 1.0 + std::abs(u(rng));
    c.outputs.record_every = 1 + std::size_t(pick(rng));
    c.outputs.include_rho = pick(rng) % 2;
    if (pick(rng) % 2) c.outputs.observables.push_back({"O" + std::to_string(pick(rng)), hermitian(dim)});
    if (pick(rng) % 3 == 0) c.circuit = CircuitConfig{u(rng), u(rng)};
    return c;
}

TEST(ConfigRoundTrip, ParseOfSerializeIsIdentity) {
    std::mt19937_64 rng(71);
    int valid = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const RunConfig c = random_config(rng);
        try {
            validate(c);
        } catch (const Error&) {
            continue;
        }
        ++valid;
        const std::string text = serialize_config(c);
        const RunConfig back = parse_config(text);
        EXPECT_TRUE(back == c) << text;
        EXPECT_EQ(serialize_config(back), text);
        EXPECT_EQ(config_hash(back), config_hash(c));
    }
    EXPECT_GT(valid, 200);
}

TEST(ConfigHash, SensitiveToEveryField) {
    const RunConfig base = parse_config(kDephasing);
    const std::string h = config_hash(base);
    EXPECT_EQ(h.size(), 16u);
    RunConfig other = base;
    other.ensemble.seed = 1;
    EXPECT_NE(config_hash(other), h);
    other = base;
    other.integrator.dt = std::nextafter(base.integrator.dt, 1.0);
    EXPECT_NE(config_hash(other), h);
    other = base;
    other.outputs.prefix = "x";
    EXPECT_NE(config_hash(other), h);
}

TEST(Builders, EnginesAndOracles) {
    RunConfig c = parse_config(kDephasing);
    c.system.psi0 = plus_state();
    EXPECT_TRUE(std::holds_alternative<StratEngine>(make_engine(c)));
    c.oracle = OracleKind::Lindblad;
    const Evolution lind = evolve_oracle(c);
    c.oracle = OracleKind::WhiteSle;
    const Evolution sle = evolve_oracle(c);
    c.oracle = OracleKind::Redfield;
    const Evolution red = evolve_oracle(c);
    ASSERT_EQ(lind.states.size(), 101u);
    EXPECT_LE((lind.states.back() - sle.states.back()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((lind.states.back() - red.states.back()).cwiseAbs().maxCoeff(), 1e-12);
    c.oracle = OracleKind::None;
    EXPECT_THROW(evolve_oracle(c), Error);

    c.integrator.engine = EngineKind::RodeHeun;
    c.noise = OrnsteinUhlenbeck{0.1, 0.5, InitialValueMode::StationaryDraw, 0.0};
    const EngineSpec rode = make_engine(c);
    ASSERT_TRUE(std::holds_alternative<RodeEngine>(rode));
    EXPECT_EQ(std::get<RodeEngine>(rode).scheme, RodeScheme::Heun);
    c.integrator.engine = EngineKind::Sle;
    EXPECT_TRUE(std::holds_alternative<SleEngine>(make_engine(c)));
}

}  // namespace
