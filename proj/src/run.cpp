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

#include "stoq/run.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "stoq/circuit.hpp"
#include "stoq/convergence.hpp"
#include "stoq/ensemble.hpp"

namespace stoq {

namespace {

std::ofstream open_output(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::vector<NamedOperator> observables_for(const RunConfig& cfg) {
    return cfg.outputs.observables.empty() ? hermitian_basis(cfg.system.dim) : cfg.outputs.observables;
}

EnsembleOptions ensemble_options(const RunConfig& cfg, unsigned threads) {
    EnsembleOptions o;
    o.n_trajectories = cfg.ensemble.n;
    o.dt = cfg.integrator.dt;
    o.n_steps = cfg.integrator.n_steps;
    o.seed = cfg.ensemble.seed;
    o.observables = observables_for(cfg);
    o.threads = threads;
    o.record_every = cfg.outputs.record_every;
    return o;
}

std::vector<double> oracle_times(const Evolution& ev, std::size_t record_every) {
    std::vector<double> out;
    for (std::size_t k = 0; k < ev.times.size(); k += record_every) out.push_back(ev.times[k]);
    return out;
}

void report_positivity(const Evolution& ev, std::ostream& log) {
    if (!ev.positivity_warning) return;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "warning: oracle lost positivity at t=%.6g (min eigenvalue %.3e, %zu steps)\n",
                  ev.positivity_warning->time, ev.positivity_warning->min_eigenvalue, ev.positivity_violations);
    log << buf;
}

std::filesystem::path artifact(const RunConfig& cfg, const RunOptions& opt, const std::string& suffix) {
    return opt.out_dir / (cfg.outputs.prefix + suffix);
}

int run_trajectory(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const EngineSpec engine = make_engine(cfg);
    const std::size_t every = cfg.outputs.record_every;
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    RngStream stream(cfg.ensemble.seed, 0);
    run_trajectory_densities(engine, cfg.integrator.dt, cfg.integrator.n_steps, stream,
                             [&](std::size_t k, const DensityMatrix& rho) {
                                 if (k % every != 0) return;
                                 times.push_back(double(k) * cfg.integrator.dt);
                                 states.push_back(rho);
                             });
    const auto path = artifact(cfg, opt, "_trajectory.csv");
    auto out = open_output(path);
    write_density_csv(out, times, states, provenance_line(cfg));
    finish(out, path);

    if (cfg.outputs.wiener_dump && std::holds_alternative<WhiteNoise>(cfg.noise)) {
        // Same stream position as the engine's first draw.
        RngStream replay(cfg.ensemble.seed, 0);
        const WienerPath w = sample_wiener_increments(cfg.integrator.dt, cfg.integrator.n_steps, replay);
        const auto dump_path = artifact(cfg, opt, "_wiener.bin");
        auto dump = open_output(dump_path, true);
        write_wiener_dump(dump, w, cfg.ensemble.seed, 0);
        finish(dump, dump_path);
    }
    if (!opt.quiet) log << "wrote " << path.string() << '\n';
    return kExitPass;
}

EnsembleResult ensemble_of(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
    EnsembleResult result = run_ensemble(make_engine(cfg), ensemble_options(cfg, opt.threads));
    if (result.n_failed > 0 && !opt.quiet) {
        log << "warning: " << result.n_failed << " of " << result.n_trajectories
            << " trajectories exceeded the norm bound and were dropped\n";
    }
    return result;
}

int run_ensemble_mode(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const EnsembleResult result = ensemble_of(cfg, opt, log);
    const auto path = artifact(cfg, opt, "_ensemble.csv");
    auto out = open_output(path);
    write_ensemble_csv(out, result, cfg.outputs.include_rho, provenance_line(cfg));
    finish(out, path);
    if (!opt.quiet) log << "wrote " << path.string() << '\n';
    return kExitPass;
}

int run_master(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const Evolution ev = evolve_oracle(cfg);
    if (!opt.quiet) report_positivity(ev, log);
    const auto path = artifact(cfg, opt, "_master.csv");
    auto out = open_output(path);
    write_density_csv(out, oracle_times(ev, cfg.outputs.record_every), subsample(ev.states, cfg.outputs.record_every),
                      provenance_line(cfg));
    finish(out, path);
    if (!opt.quiet) log << "wrote " << path.string() << '\n';
    return kExitPass;
}

int run_compare(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const EnsembleResult result = ensemble_of(cfg, opt, log);
    const Evolution ev = evolve_oracle(cfg);
    if (!opt.quiet) report_positivity(ev, log);
    const auto reference = subsample(ev.states, cfg.outputs.record_every);
    const ComparisonReport report = compare(result, reference, StderrOrAbsRule{cfg.compare.k, cfg.compare.floor});

    const std::string prov = provenance_line(cfg);
    const auto ens_path = artifact(cfg, opt, "_ensemble.csv");
    auto ens = open_output(ens_path);
    write_ensemble_csv(ens, result, cfg.outputs.include_rho, prov);
    finish(ens, ens_path);

    const auto oracle_path = artifact(cfg, opt, "_oracle.csv");
    auto orc = open_output(oracle_path);
    write_density_csv(orc, oracle_times(ev, cfg.outputs.record_every), reference, prov);
    finish(orc, oracle_path);

    const auto report_path = artifact(cfg, opt, "_compare.txt");
    auto rep = open_output(report_path);
    rep << "# " << prov << '\n' << report.summary() << '\n';
    rep << "t,trace_distance,stderr,bound\n";
    for (std::size_t j = 0; j < report.times.size(); ++j) {
        rep << format_double(report.times[j]) << ',' << format_double(report.per_time_distance[j]) << ','
            << format_double(report.per_time_stderr[j]) << ',' << format_double(report.per_time_bound[j]) << '\n';
    }
    finish(rep, report_path);
    if (!opt.quiet) log << report.summary() << '\n';
    return report.pass ? kExitPass : kExitFailure;
}

int run_emit_circuit(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const double sigma = std::get<WhiteNoise>(cfg.noise).sigma;
    const std::string prov = provenance_line(cfg);
    for (std::size_t i = 0; i < cfg.ensemble.n; ++i) {
        RngStream stream(cfg.ensemble.seed, i);
        const GateSequence seq = emit_trajectory_circuit(cfg.circuit->eps, cfg.circuit->omega, sigma, cfg.integrator.dt,
                                                         cfg.integrator.n_steps, stream);
        const auto path = artifact(cfg, opt, "_circuit_" + std::to_string(i) + ".txt");
        auto out = open_output(path);
        write_gate_file(out, seq);
        out << "# " << prov << '\n';
        finish(out, path);
    }
    if (!opt.quiet) log << "wrote " << cfg.ensemble.n << " gate files\n";
    return kExitPass;
}

void write_levels(std::ostream& out, const std::string& scheme, const std::vector<ConvergenceLevel>& levels,
                  double slope) {
    out << "scheme=" << scheme << " slope=" << format_double(slope) << '\n';
    for (const auto& l : levels) out << scheme << ',' << format_double(l.dt) << ',' << format_double(l.mean_error) << '\n';
}

int run_convergence(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
    const double t_final = cfg.integrator.dt * double(cfg.integrator.n_steps);
    const auto& conv = cfg.convergence;
    const EngineSpec engine = make_engine(cfg);
    std::ostringstream body;
    body << "scheme,dt,mean_error\n";
    if (const auto* ito = std::get_if<ItoEngine>(&engine)) {
        const StrongOrderReport r = measure_ito_strong_order(ito->model, ito->psi0, t_final, cfg.integrator.dt,
                                                             conv.levels, conv.reference_factor, conv.paths,
                                                             cfg.ensemble.seed);
        write_levels(body, "euler-maruyama", r.euler_maruyama, r.euler_maruyama_slope);
        write_levels(body, "milstein", r.milstein, r.milstein_slope);
    } else {
        const auto& rode = std::get<RodeEngine>(engine);
        const RodeRefinementReport r = measure_rode_refinement(rode.model, rode.psi0, t_final, cfg.integrator.dt,
                                                               conv.levels, conv.reference_factor, conv.paths,
                                                               cfg.ensemble.seed);
        write_levels(body, "rode-midpoint", r.levels, r.slope);
        body << "reduction_factors";
        for (double f : r.reduction_factors) body << ',' << format_double(f);
        body << '\n';
    }
    const auto path = artifact(cfg, opt, "_convergence.txt");
    auto out = open_output(path);
    out << "# " << provenance_line(cfg) << '\n' << body.str();
    finish(out, path);
    if (!opt.quiet) log << body.str();
    return kExitPass;
}

}  // namespace

std::string provenance_line(const RunConfig& config) {
    return "stoqtraj config_hash=" + config_hash(config) + " mode=" + std::string(to_string(config.mode));
}

std::string error_line(const Error& error) {
    return "ERROR " + std::string(to_string(error.code())) + " " + error.what();
}

int run(const RunConfig& config, const RunOptions& options, std::ostream& log) {
    validate(config);
    if (options.threads == 0) throw Error(ErrorCode::InvalidArgument, "--threads must be at least 1");
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + options.out_dir.string() + "': " + ec.message());
    switch (config.mode) {
        case RunMode::Trajectory: return run_trajectory(config, options, log);
        case RunMode::Ensemble: return run_ensemble_mode(config, options, log);
        case RunMode::Master: return run_master(config, options, log);
        case RunMode::Compare: return run_compare(config, options, log);
        case RunMode::EmitCircuit: return run_emit_circuit(config, options, log);
        case RunMode::Convergence: return run_convergence(config, options, log);
    }
    return kExitFailure;
}

}  // namespace stoq
