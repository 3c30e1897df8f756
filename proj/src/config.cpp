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

#include "stoq/config.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>

#include "json.hpp"

#include "stoq/errors.hpp"

namespace stoq {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::ValidationError, message); }

template <typename Enum>
struct Names {
    Enum value;
    std::string_view name;
};

constexpr Names<RunMode> kModes[] = {
    {RunMode::Trajectory, "trajectory"}, {RunMode::Ensemble, "ensemble"},       {RunMode::Master, "master"},
    {RunMode::Compare, "compare"},       {RunMode::EmitCircuit, "emit-circuit"}, {RunMode::Convergence, "convergence"},
};
constexpr Names<EngineKind> kEngines[] = {
    {EngineKind::ItoEm, "ito-em"},           {EngineKind::ItoMilstein, "ito-milstein"},
    {EngineKind::Strat, "strat"},            {EngineKind::RodeMidpoint, "rode-midpoint"},
    {EngineKind::RodeHeun, "rode-heun"},     {EngineKind::Sle, "sle"},
};
constexpr Names<OracleKind> kOracles[] = {
    {OracleKind::Lindblad, "lindblad"},
    {OracleKind::Redfield, "redfield"},
    {OracleKind::WhiteSle, "white-sle"},
    {OracleKind::None, "none"},
};

template <typename Enum, std::size_t N>
Enum lookup(const Names<Enum> (&table)[N], const std::string& text, const char* what) {
    for (const auto& entry : table) {
        if (entry.name == text) return entry.value;
    }
    std::string allowed;
    for (const auto& entry : table) allowed += (allowed.empty() ? "" : ", ") + std::string(entry.name);
    invalid(std::string("unknown ") + what + " '" + text + "' (expected one of: " + allowed + ")");
}

template <typename Enum, std::size_t N>
std::string_view name_of(const Names<Enum> (&table)[N], Enum value) {
    for (const auto& entry : table) {
        if (entry.value == value) return entry.name;
    }
    return "?";
}

void reject_unknown_keys(const json& object, const std::string& where, std::initializer_list<const char*> keys) {
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& item : object.items()) {
        if (!known.count(item.key())) invalid("unknown field '" + where + item.key() + "'");
    }
}

const json& require_object(const json& parent, const char* key, const std::string& where) {
    if (!parent.contains(key)) invalid("missing required field '" + where + key + "'");
    const json& value = parent.at(key);
    if (!value.is_object()) invalid("field '" + where + key + "' must be an object");
    return value;
}

double get_number(const json& parent, const char* key, const std::string& where) {
    if (!parent.contains(key)) invalid("missing required field '" + where + key + "'");
    const json& v = parent.at(key);
    if (!v.is_number()) invalid("field '" + where + key + "' must be a number");
    return v.get<double>();
}

double get_number_or(const json& parent, const char* key, const std::string& where, double fallback) {
    return parent.contains(key) ? get_number(parent, key, where) : fallback;
}

std::uint64_t get_unsigned(const json& parent, const char* key, const std::string& where) {
    if (!parent.contains(key)) invalid("missing required field '" + where + key + "'");
    const json& v = parent.at(key);
    if (!v.is_number_unsigned()) invalid("field '" + where + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::uint64_t get_unsigned_or(const json& parent, const char* key, const std::string& where, std::uint64_t fallback) {
    return parent.contains(key) ? get_unsigned(parent, key, where) : fallback;
}

std::string get_string(const json& parent, const char* key, const std::string& where) {
    if (!parent.contains(key)) invalid("missing required field '" + where + key + "'");
    const json& v = parent.at(key);
    if (!v.is_string()) invalid("field '" + where + key + "' must be a string");
    return v.get<std::string>();
}

bool get_bool_or(const json& parent, const char* key, const std::string& where, bool fallback) {
    if (!parent.contains(key)) return fallback;
    const json& v = parent.at(key);
    if (!v.is_boolean()) invalid("field '" + where + key + "' must be true or false");
    return v.get<bool>();
}

Complex decode_complex(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        invalid("'" + where + "' must be a complex literal [re, im]");
    }
    const Complex z(v[0].get<double>(), v[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) invalid("'" + where + "' must be finite");
    return z;
}

Operator decode_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) invalid("'" + where + "' must be a non-empty array of rows");
    const auto rows = Eigen::Index(v.size());
    Operator m(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = v[std::size_t(i)];
        const std::string row_where = where + "[" + std::to_string(i) + "]";
        if (!row.is_array() || Eigen::Index(row.size()) != rows) invalid("'" + row_where + "' must have " + std::to_string(rows) + " entries (square matrix)");
        for (Eigen::Index j = 0; j < rows; ++j) {
            m(i, j) = decode_complex(row[std::size_t(j)], row_where + "[" + std::to_string(j) + "]");
        }
    }
    return m;
}

StateVector decode_vector(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) invalid("'" + where + "' must be a non-empty array of [re, im]");
    StateVector out(Eigen::Index(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(Eigen::Index(i)) = decode_complex(v[i], where + "[" + std::to_string(i) + "]");
    }
    return out;
}

json encode_complex(const Complex& z) { return json::array({z.real(), z.imag()}); }

json encode_matrix(const Operator& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(encode_complex(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json encode_vector(const StateVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode_complex(v(i)));
    return out;
}

void require_dim(const Operator& m, Eigen::Index dim, const std::string& what) {
    if (m.rows() != dim) invalid("'" + what + "' must be " + std::to_string(dim) + "x" + std::to_string(dim) +
                                 " to match system.dim");
}

bool is_ito(EngineKind e) { return e == EngineKind::ItoEm || e == EngineKind::ItoMilstein; }
bool is_rode(EngineKind e) { return e == EngineKind::RodeMidpoint || e == EngineKind::RodeHeun; }

bool same_operator(const Operator& a, const Operator& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

template <typename T>
bool same_optional(const std::optional<T>& a, const std::optional<T>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->rows() == b->rows() && a->cols() == b->cols() && *a == *b);
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

}  // namespace

std::string_view to_string(RunMode mode) { return name_of(kModes, mode); }
std::string_view to_string(EngineKind engine) { return name_of(kEngines, engine); }
std::string_view to_string(OracleKind oracle) { return name_of(kOracles, oracle); }

bool operator==(const RunConfig& a, const RunConfig& b) {
    auto same_channels = [](const std::vector<LindbladChannel>& x, const std::vector<LindbladChannel>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i].rate != y[i].rate || !same_operator(x[i].op, y[i].op)) return false;
        }
        return true;
    };
    auto same_observables = [](const std::vector<NamedOperator>& x, const std::vector<NamedOperator>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i].name != y[i].name || !same_operator(x[i].op, y[i].op)) return false;
        }
        return true;
    };
    const auto& sa = a.system;
    const auto& sb = b.system;
    const bool system_equal = sa.dim == sb.dim && same_operator(sa.hamiltonian, sb.hamiltonian) &&
                              same_optional(sa.r, sb.r) && same_optional(sa.b, sb.b) && sa.b_is_ir == sb.b_is_ir &&
                              same_optional(sa.psi0, sb.psi0) && same_optional(sa.rho0, sb.rho0) &&
                              same_channels(sa.channels, sb.channels);
    const bool circuit_equal = a.circuit.has_value() == b.circuit.has_value() &&
                               (!a.circuit || (a.circuit->eps == b.circuit->eps && a.circuit->omega == b.circuit->omega));
    return a.mode == b.mode && system_equal && a.noise == b.noise && a.integrator.engine == b.integrator.engine &&
           a.integrator.dt == b.integrator.dt && a.integrator.n_steps == b.integrator.n_steps &&
           a.ensemble.n == b.ensemble.n && a.ensemble.seed == b.ensemble.seed && a.oracle == b.oracle &&
           circuit_equal && a.compare.k == b.compare.k && a.compare.floor == b.compare.floor &&
           a.convergence.paths == b.convergence.paths && a.convergence.levels == b.convergence.levels &&
           a.convergence.reference_factor == b.convergence.reference_factor && a.outputs.prefix == b.outputs.prefix &&
           same_observables(a.outputs.observables, b.outputs.observables) &&
           a.outputs.record_every == b.outputs.record_every && a.outputs.include_rho == b.outputs.include_rho &&
           a.outputs.wiener_dump == b.outputs.wiener_dump;
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " + e.what());
    }
    if (!doc.is_object()) invalid("config must be a JSON object");
    reject_unknown_keys(doc, "", {"mode", "system", "noise", "integrator", "ensemble", "oracle", "circuit", "compare",
                                  "convergence", "outputs"});

    RunConfig cfg;
    cfg.mode = lookup(kModes, get_string(doc, "mode", ""), "mode");

    const json& sys = require_object(doc, "system", "");
    reject_unknown_keys(sys, "system.", {"dim", "H", "R", "B", "B_is_iR", "psi0", "rho0", "channels"});
    cfg.system.dim = Eigen::Index(get_unsigned(sys, "dim", "system."));
    if (cfg.system.dim < 1) invalid("'system.dim' must be at least 1");
    if (!sys.contains("H")) invalid("missing required field 'system.H'");
    cfg.system.hamiltonian = decode_matrix(sys.at("H"), "system.H");
    require_dim(cfg.system.hamiltonian, cfg.system.dim, "system.H");
    if (sys.contains("R")) {
        cfg.system.r = decode_matrix(sys.at("R"), "system.R");
        require_dim(*cfg.system.r, cfg.system.dim, "system.R");
    }
    if (sys.contains("B")) {
        cfg.system.b = decode_matrix(sys.at("B"), "system.B");
        require_dim(*cfg.system.b, cfg.system.dim, "system.B");
    }
    cfg.system.b_is_ir = get_bool_or(sys, "B_is_iR", "system.", false);
    if (sys.contains("psi0")) cfg.system.psi0 = decode_vector(sys.at("psi0"), "system.psi0");
    if (sys.contains("rho0")) cfg.system.rho0 = decode_matrix(sys.at("rho0"), "system.rho0");
    if (sys.contains("channels")) {
        const json& chans = sys.at("channels");
        if (!chans.is_array()) invalid("'system.channels' must be an array");
        for (std::size_t i = 0; i < chans.size(); ++i) {
            const std::string where = "system.channels[" + std::to_string(i) + "].";
            const json& ch = chans[i];
            if (!ch.is_object()) invalid("'" + where + "' must be an object");
            reject_unknown_keys(ch, where, {"L", "rate"});
            if (!ch.contains("L")) invalid("missing required field '" + where + "L'");
            LindbladChannel c{decode_matrix(ch.at("L"), where + "L"), get_number(ch, "rate", where)};
            cfg.system.channels.push_back(std::move(c));
        }
    }

    const json& noise = require_object(doc, "noise", "");
    const std::string noise_type = get_string(noise, "type", "noise.");
    if (noise_type == "white") {
        reject_unknown_keys(noise, "noise.", {"type", "sigma"});
        cfg.noise = WhiteNoise{get_number(noise, "sigma", "noise.")};
    } else if (noise_type == "ou") {
        reject_unknown_keys(noise, "noise.", {"type", "std", "tau_c", "z0"});
        OrnsteinUhlenbeck ou;
        ou.std = get_number(noise, "std", "noise.");
        ou.tau_c = get_number(noise, "tau_c", "noise.");
        if (noise.contains("z0")) {
            const json& z0 = noise.at("z0");
            if (z0.is_string() && z0.get<std::string>() == "stationary") {
                ou.z0_mode = InitialValueMode::StationaryDraw;
            } else if (z0.is_number()) {
                ou.z0_mode = InitialValueMode::Fixed;
                ou.z0 = z0.get<double>();
            } else {
                invalid("'noise.z0' must be \"stationary\" or a number");
            }
        }
        cfg.noise = ou;
    } else {
        invalid("noise type '" + noise_type +
                "' is unsupported: only Gaussian drives (white, ou) close the mean dynamics");
    }

    const json& integ = require_object(doc, "integrator", "");
    reject_unknown_keys(integ, "integrator.", {"engine", "dt", "n_steps"});
    cfg.integrator.engine = lookup(kEngines, get_string(integ, "engine", "integrator."), "engine");
    cfg.integrator.dt = get_number(integ, "dt", "integrator.");
    cfg.integrator.n_steps = get_unsigned(integ, "n_steps", "integrator.");

    if (doc.contains("ensemble")) {
        const json& ens = require_object(doc, "ensemble", "");
        reject_unknown_keys(ens, "ensemble.", {"N", "seed"});
        cfg.ensemble.n = get_unsigned_or(ens, "N", "ensemble.", 1);
        cfg.ensemble.seed = get_unsigned_or(ens, "seed", "ensemble.", 0);
    }
    if (doc.contains("oracle")) {
        if (!doc.at("oracle").is_string()) invalid("field 'oracle' must be a string");
        cfg.oracle = lookup(kOracles, doc.at("oracle").get<std::string>(), "oracle");
    }
    if (doc.contains("circuit")) {
        const json& c = require_object(doc, "circuit", "");
        reject_unknown_keys(c, "circuit.", {"eps", "omega"});
        cfg.circuit = CircuitConfig{get_number(c, "eps", "circuit."), get_number(c, "omega", "circuit.")};
    }
    if (doc.contains("compare")) {
        const json& c = require_object(doc, "compare", "");
        reject_unknown_keys(c, "compare.", {"k", "floor"});
        cfg.compare.k = get_number_or(c, "k", "compare.", cfg.compare.k);
        cfg.compare.floor = get_number_or(c, "floor", "compare.", cfg.compare.floor);
    }
    if (doc.contains("convergence")) {
        const json& c = require_object(doc, "convergence", "");
        reject_unknown_keys(c, "convergence.", {"paths", "levels", "reference_factor"});
        cfg.convergence.paths = get_unsigned_or(c, "paths", "convergence.", cfg.convergence.paths);
        cfg.convergence.levels = unsigned(get_unsigned_or(c, "levels", "convergence.", cfg.convergence.levels));
        cfg.convergence.reference_factor =
            unsigned(get_unsigned_or(c, "reference_factor", "convergence.", cfg.convergence.reference_factor));
    }
    if (doc.contains("outputs")) {
        const json& o = require_object(doc, "outputs", "");
        reject_unknown_keys(o, "outputs.", {"prefix", "observables", "record_every", "include_rho", "wiener_dump"});
        if (o.contains("prefix")) cfg.outputs.prefix = get_string(o, "prefix", "outputs.");
        cfg.outputs.record_every = get_unsigned_or(o, "record_every", "outputs.", 1);
        cfg.outputs.include_rho = get_bool_or(o, "include_rho", "outputs.", false);
        cfg.outputs.wiener_dump = get_bool_or(o, "wiener_dump", "outputs.", false);
        if (o.contains("observables")) {
            const json& obs = o.at("observables");
            if (!obs.is_array()) invalid("'outputs.observables' must be an array");
            for (std::size_t i = 0; i < obs.size(); ++i) {
                const std::string where = "outputs.observables[" + std::to_string(i) + "].";
                if (!obs[i].is_object()) invalid("'" + where + "' must be an object");
                reject_unknown_keys(obs[i], where, {"name", "matrix"});
                if (!obs[i].contains("matrix")) invalid("missing required field '" + where + "matrix'");
                cfg.outputs.observables.push_back(
                    {get_string(obs[i], "name", where), decode_matrix(obs[i].at("matrix"), where + "matrix")});
            }
        }
    }

    validate(cfg);
    return cfg;
}

void validate(const RunConfig& cfg) {
    const auto& sys = cfg.system;
    const EngineKind engine = cfg.integrator.engine;
    require_dim(sys.hamiltonian, sys.dim, "system.H");
    if (!is_hermitian(sys.hamiltonian)) invalid("system.H must be Hermitian");
    require_time_step(cfg.integrator.dt);
    if (cfg.integrator.n_steps == 0) invalid("integrator.n_steps must be at least 1");
    validate(cfg.noise);
    const bool white = std::holds_alternative<WhiteNoise>(cfg.noise);

    if (is_ito(engine)) {
        if (!white) invalid("ito engine is white-noise only; use rode");
        if (sys.b && sys.b_is_ir) invalid("give either system.B or system.B_is_iR, not both");
        if (!sys.b && !(sys.b_is_ir && sys.r)) invalid("ito engine requires system.B, or system.R with B_is_iR = true");
        if (sys.b_is_ir && !is_hermitian(*sys.r)) invalid("B_is_iR requires Hermitian R");
    } else {
        const char* name = engine == EngineKind::Strat ? "strat" : (is_rode(engine) ? "rode" : "sle");
        if (!sys.r) invalid(std::string(name) + " engine requires system.R");
        if (!is_hermitian(*sys.r)) invalid(std::string(name) + " engine requires Hermitian R");
        if (engine == EngineKind::Strat && !white) invalid("strat engine is white-noise only; use rode");
        if (is_rode(engine) && white) invalid("rode engine requires an OU process; use strat or ito for white noise");
    }
    if (!sys.channels.empty() && engine != EngineKind::Sle) invalid("extra Lindblad channels require the sle engine");
    for (std::size_t i = 0; i < sys.channels.size(); ++i) {
        require_dim(sys.channels[i].op, sys.dim, "system.channels[" + std::to_string(i) + "].L");
        if (!(sys.channels[i].rate >= 0.0)) invalid("Lindblad rates must be non-negative");
    }
    if (sys.psi0) {
        if (sys.psi0->size() != sys.dim) invalid("system.psi0 must have system.dim entries");
        if (std::abs(sys.psi0->norm() - 1.0) > 1e-10) invalid("system.psi0 must be normalized");
    }
    if (sys.rho0) {
        require_dim(*sys.rho0, sys.dim, "system.rho0");
        if (!is_hermitian(*sys.rho0, 1e-10)) invalid("system.rho0 must be Hermitian");
        if (std::abs(sys.rho0->trace().real() - 1.0) > 1e-9) invalid("system.rho0 must have unit trace");
        if (engine != EngineKind::Sle) invalid("system.rho0 (mixed initial state) requires the sle engine");
    }
    for (const auto& o : cfg.outputs.observables) {
        require_dim(o.op, sys.dim, "observable " + o.name);
        if (!is_hermitian(o.op)) invalid("observable '" + o.name + "' must be Hermitian");
    }
    if (cfg.outputs.record_every == 0) invalid("outputs.record_every must be positive");
    if (cfg.ensemble.n == 0) invalid("ensemble.N must be at least 1");

    switch (cfg.oracle) {
        case OracleKind::None: break;
        case OracleKind::Lindblad:
            if (!white) invalid("lindblad oracle requires white noise; use redfield for OU");
            break;
        case OracleKind::WhiteSle:
            if (!white) invalid("white-sle oracle requires white noise; use redfield for OU");
            if (!sys.r) invalid("white-sle oracle requires system.R");
            break;
        case OracleKind::Redfield:
            if (!sys.r) invalid("redfield oracle requires system.R");
            if (!sys.channels.empty()) invalid("redfield oracle does not support extra channels");
            break;
    }
    if (cfg.mode == RunMode::Compare && cfg.oracle == OracleKind::None) invalid("compare mode requires an oracle");
    if (cfg.mode == RunMode::Master && cfg.oracle == OracleKind::None) invalid("master mode requires an oracle");
    if (cfg.mode == RunMode::EmitCircuit) {
        if (!cfg.circuit) invalid("emit-circuit mode requires a circuit section {eps, omega}");
        if (!white) invalid("emit-circuit mode requires white noise");
    }
    if (cfg.mode == RunMode::Convergence) {
        if (!is_ito(engine) && engine != EngineKind::RodeMidpoint) {
            invalid("convergence mode supports ito-em, ito-milstein and rode-midpoint engines");
        }
        if (cfg.convergence.levels < 2) invalid("convergence.levels must be at least 2");
        if (cfg.convergence.levels > 20) invalid("convergence.levels must be at most 20");
        if (cfg.convergence.reference_factor < 2) invalid("convergence.reference_factor must be at least 2");
        if (cfg.convergence.paths == 0) invalid("convergence.paths must be at least 1");
    }
}

std::string serialize_config(const RunConfig& cfg) {
    json doc;
    doc["mode"] = std::string(to_string(cfg.mode));
    json sys;
    sys["dim"] = std::uint64_t(cfg.system.dim);
    sys["H"] = encode_matrix(cfg.system.hamiltonian);
    if (cfg.system.r) sys["R"] = encode_matrix(*cfg.system.r);
    if (cfg.system.b) sys["B"] = encode_matrix(*cfg.system.b);
    sys["B_is_iR"] = cfg.system.b_is_ir;
    if (cfg.system.psi0) sys["psi0"] = encode_vector(*cfg.system.psi0);
    if (cfg.system.rho0) sys["rho0"] = encode_matrix(*cfg.system.rho0);
    json chans = json::array();
    for (const auto& c : cfg.system.channels) chans.push_back({{"L", encode_matrix(c.op)}, {"rate", c.rate}});
    sys["channels"] = chans;
    doc["system"] = sys;
    if (const auto* white = std::get_if<WhiteNoise>(&cfg.noise)) {
        doc["noise"] = {{"type", "white"}, {"sigma", white->sigma}};
    } else {
        const auto& ou = std::get<OrnsteinUhlenbeck>(cfg.noise);
        json n = {{"type", "ou"}, {"std", ou.std}, {"tau_c", ou.tau_c}};
        if (ou.z0_mode == InitialValueMode::Fixed) n["z0"] = ou.z0;
        else n["z0"] = "stationary";
        doc["noise"] = n;
    }
    doc["integrator"] = {{"engine", std::string(to_string(cfg.integrator.engine))},
                         {"dt", cfg.integrator.dt},
                         {"n_steps", std::uint64_t(cfg.integrator.n_steps)}};
    doc["ensemble"] = {{"N", std::uint64_t(cfg.ensemble.n)}, {"seed", cfg.ensemble.seed}};
    doc["oracle"] = std::string(to_string(cfg.oracle));
    if (cfg.circuit) doc["circuit"] = {{"eps", cfg.circuit->eps}, {"omega", cfg.circuit->omega}};
    doc["compare"] = {{"k", cfg.compare.k}, {"floor", cfg.compare.floor}};
    doc["convergence"] = {{"paths", std::uint64_t(cfg.convergence.paths)},
                          {"levels", cfg.convergence.levels},
                          {"reference_factor", cfg.convergence.reference_factor}};
    json obs = json::array();
    for (const auto& o : cfg.outputs.observables) obs.push_back({{"name", o.name}, {"matrix", encode_matrix(o.op)}});
    doc["outputs"] = {{"prefix", cfg.outputs.prefix},
                      {"observables", obs},
                      {"record_every", std::uint64_t(cfg.outputs.record_every)},
                      {"include_rho", cfg.outputs.include_rho},
                      {"wiener_dump", cfg.outputs.wiener_dump}};
    return doc.dump(2);
}

std::string config_hash(const RunConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

StateVector initial_state(const RunConfig& cfg) {
    return cfg.system.psi0 ? *cfg.system.psi0 : basis_state(cfg.system.dim, 0);
}

DensityMatrix initial_density(const RunConfig& cfg) {
    return cfg.system.rho0 ? *cfg.system.rho0 : projector(initial_state(cfg));
}

Operator ito_noise_operator(const RunConfig& cfg) {
    return cfg.system.b ? *cfg.system.b : Operator(Complex(0, 1) * *cfg.system.r);
}

}  // namespace

EngineSpec make_engine(const RunConfig& cfg) {
    const auto& sys = cfg.system;
    switch (cfg.integrator.engine) {
        case EngineKind::ItoEm:
        case EngineKind::ItoMilstein: {
            const auto scheme = cfg.integrator.engine == EngineKind::ItoEm ? ItoScheme::EulerMaruyama : ItoScheme::Milstein;
            return ItoEngine{ItoModel(sys.hamiltonian, ito_noise_operator(cfg), std::get<WhiteNoise>(cfg.noise).sigma),
                             scheme, initial_state(cfg)};
        }
        case EngineKind::Strat:
            return StratEngine{StratModel(sys.hamiltonian, *sys.r, std::get<WhiteNoise>(cfg.noise).sigma),
                               initial_state(cfg)};
        case EngineKind::RodeMidpoint:
        case EngineKind::RodeHeun: {
            const auto scheme =
                cfg.integrator.engine == EngineKind::RodeMidpoint ? RodeScheme::MidpointUnitary : RodeScheme::Heun;
            return RodeEngine{RodeModel(sys.hamiltonian, *sys.r, std::get<OrnsteinUhlenbeck>(cfg.noise)), scheme,
                              initial_state(cfg)};
        }
        case EngineKind::Sle:
            return SleEngine{sys.hamiltonian, *sys.r, cfg.noise, sys.channels, initial_density(cfg)};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown engine");
}

Evolution evolve_oracle(const RunConfig& cfg) {
    const auto& sys = cfg.system;
    const double dt = cfg.integrator.dt;
    const std::size_t n = cfg.integrator.n_steps;
    const DensityMatrix rho0 = initial_density(cfg);
    switch (cfg.oracle) {
        case OracleKind::Lindblad: {
            const double sigma = std::get<WhiteNoise>(cfg.noise).sigma;
            LindbladModel model{sys.hamiltonian, sys.channels};
            const Operator l = is_ito(cfg.integrator.engine) ? ito_noise_operator(cfg) : *sys.r;
            model.channels.push_back({l, sigma * sigma});
            return lindblad_evolve(model, rho0, dt, n);
        }
        case OracleKind::WhiteSle: {
            const double gamma = white_noise_rate(std::get<WhiteNoise>(cfg.noise));
            const Operator& h = sys.hamiltonian;
            const Operator& r = *sys.r;
            const auto& channels = sys.channels;
            return rk4_evolve(
                [&](double, const DensityMatrix& rho) {
                    return Operator(white_noise_sle_rhs(h, r, gamma, rho) + dissipator(channels, rho));
                },
                rho0, dt, n);
        }
        case OracleKind::Redfield:
            return redfield_evolve(RedfieldModel(sys.hamiltonian, *sys.r, cfg.noise), rho0, dt, n);
        case OracleKind::None: break;
    }
    throw Error(ErrorCode::InvalidArgument, "no oracle configured");
}

}  // namespace stoq
