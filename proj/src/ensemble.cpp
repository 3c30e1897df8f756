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

#include "stoq/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#include "stoq/circuit.hpp"
#include "stoq/errors.hpp"

namespace stoq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_valid_density(const DensityMatrix& rho) {
    require_hermitian(rho, "initial density matrix", 1e-10);
    if (std::abs(rho.trace().real() - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "initial density matrix must have unit trace");
    }
}

// Dispatches one trajectory. `visit` is called with either a StateVector or a
// DensityMatrix for every step k = 0..n_steps.
template <typename Visitor>
void walk_engine(const EngineSpec& engine, double dt, std::size_t n_steps, RngStream& stream, Visitor& visit) {
    require_time_step(dt);
    std::visit(
        overloaded{
            [&](const ItoEngine& e) {
                require_normalized(e.psi0);
                const WienerPath path = sample_wiener_increments(dt, n_steps, stream);
                detail::walk_ito(e.model, e.psi0, path, e.scheme, visit);
            },
            [&](const StratEngine& e) {
                require_normalized(e.psi0);
                const WienerPath path = sample_wiener_increments(dt, n_steps, stream);
                detail::walk_strat(e.model, e.psi0, path, visit);
            },
            [&](const RodeEngine& e) {
                require_normalized(e.psi0);
                const auto z = sample_ou_path(e.model.noise(), 0.5 * dt, 2 * n_steps, stream);
                detail::walk_rode(e.model, e.psi0, dt, z, e.scheme, visit);
            },
            [&](const CircuitEngine& e) {
                require_normalized(e.psi0);
                if (e.psi0.size() != 2) throw Error(ErrorCode::DimensionMismatch, "circuit engine is single-qubit");
                const GateSequence seq = emit_trajectory_circuit(e.eps, e.omega, e.sigma, dt, n_steps, stream);
                StateVector psi = e.psi0;
                StateVector next(2);
                visit(std::size_t{0}, psi);
                for (std::size_t k = 0; k < n_steps; ++k) {
                    for (std::size_t g = 3 * k; g < 3 * k + 3; ++g) {
                        next.noalias() = gate_matrix(seq.gates[g]) * psi;
                        psi.swap(next);
                    }
                    visit(k + 1, psi);
                }
            },
            [&](const SleEngine& e) {
                require_hermitian(e.hamiltonian, "Hamiltonian H");
                require_hermitian(e.noise_operator, "noise operator R");
                require_same_shape(e.hamiltonian, e.rho0, "SLE initial state");
                require_valid_density(e.rho0);
                const Operator& h = e.hamiltonian;
                const Operator& r = e.noise_operator;
                DensityMatrix rho = e.rho0;
                visit(std::size_t{0}, rho);
                if (const auto* white = std::get_if<WhiteNoise>(&e.noise)) {
                    const WienerPath path = sample_wiener_increments(dt, n_steps, stream);
                    const Operator h_dt = h * dt;
                    const Operator sigma_r = white->sigma * r;
                    auto diss = [&](const DensityMatrix& x) { return dissipator(e.channels, x); };
                    for (std::size_t k = 0; k < n_steps; ++k) {
                        const Operator u = detail::expm_hermitian(Operator(h_dt + path.increments[k] * sigma_r), 1.0);
                        rho = u * rho * u.adjoint();
                        if (!e.channels.empty()) {
                            const Operator k1 = diss(rho);
                            const Operator k2 = diss(rho + (0.5 * dt) * k1);
                            const Operator k3 = diss(rho + (0.5 * dt) * k2);
                            const Operator k4 = diss(rho + dt * k3);
                            rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                        }
                        rho = 0.5 * (rho + rho.adjoint()).eval();
                        visit(k + 1, rho);
                    }
                } else {
                    const auto& ou = std::get<OrnsteinUhlenbeck>(e.noise);
                    const auto z = sample_ou_path(ou, 0.5 * dt, 2 * n_steps, stream);
                    auto rhs = [&](double zt, const DensityMatrix& x) {
                        return sle_trajectory_rhs(Operator(h + zt * r), e.channels, x);
                    };
                    for (std::size_t k = 0; k < n_steps; ++k) {
                        const Operator k1 = rhs(z[2 * k], rho);
                        const Operator k2 = rhs(z[2 * k + 1], rho + (0.5 * dt) * k1);
                        const Operator k3 = rhs(z[2 * k + 1], rho + (0.5 * dt) * k2);
                        const Operator k4 = rhs(z[2 * k + 2], rho + dt * k3);
                        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                        rho = 0.5 * (rho + rho.adjoint()).eval();
                        visit(k + 1, rho);
                    }
                }
            },
        },
        engine);
}

struct Partial {
    std::vector<Operator> rho_sum;
    Eigen::MatrixXd obs_sum;
    Eigen::MatrixXd obs_sq_sum;
    std::size_t count = 0;
    std::size_t failed = 0;

    Partial(std::size_t records, Eigen::Index dim, std::size_t n_obs)
        : rho_sum(records, Operator::Zero(dim, dim)),
          obs_sum(Eigen::MatrixXd::Zero(Eigen::Index(records), Eigen::Index(n_obs))),
          obs_sq_sum(Eigen::MatrixXd::Zero(Eigen::Index(records), Eigen::Index(n_obs))) {}

    Partial& operator+=(const Partial& other) {
        for (std::size_t j = 0; j < rho_sum.size(); ++j) rho_sum[j] += other.rho_sum[j];
        obs_sum += other.obs_sum;
        obs_sq_sum += other.obs_sq_sum;
        count += other.count;
        failed += other.failed;
        return *this;
    }
};

// Records one trajectory at every record_every-th step.
class TrajectoryRecorder {
public:
    TrajectoryRecorder(std::size_t records, std::size_t record_every, Eigen::Index dim,
                       const std::vector<NamedOperator>& observables)
        : record_every_(record_every),
          observables_(observables),
          rho_(records, Operator::Zero(dim, dim)),
          obs_(Eigen::MatrixXd::Zero(Eigen::Index(records), Eigen::Index(observables.size()))),
          scratch_(dim) {}

    void operator()(std::size_t k, const StateVector& psi) {
        if (k % record_every_ != 0) return;
        const std::size_t j = k / record_every_;
        if (j >= rho_.size()) return;
        rho_[j].noalias() = psi * psi.adjoint();
        for (std::size_t o = 0; o < observables_.size(); ++o) {
            scratch_.noalias() = observables_[o].op * psi;
            obs_(Eigen::Index(j), Eigen::Index(o)) = psi.dot(scratch_).real();
        }
    }

    void operator()(std::size_t k, const DensityMatrix& rho) {
        if (k % record_every_ != 0) return;
        const std::size_t j = k / record_every_;
        if (j >= rho_.size()) return;
        rho_[j] = rho;
        for (std::size_t o = 0; o < observables_.size(); ++o) {
            obs_(Eigen::Index(j), Eigen::Index(o)) = observables_[o].op.cwiseProduct(rho.transpose()).sum().real();
        }
    }

    void commit(Partial& into) const {
        for (std::size_t j = 0; j < rho_.size(); ++j) into.rho_sum[j] += rho_[j];
        into.obs_sum += obs_;
        into.obs_sq_sum += obs_.cwiseAbs2();
        ++into.count;
    }

private:
    std::size_t record_every_;
    const std::vector<NamedOperator>& observables_;
    std::vector<Operator> rho_;
    Eigen::MatrixXd obs_;
    StateVector scratch_;
};

Partial tree_reduce(std::vector<Partial>& parts, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(parts[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    Partial left = tree_reduce(parts, lo, mid);
    left += tree_reduce(parts, mid, hi);
    return left;
}

}  // namespace

Eigen::Index engine_dim(const EngineSpec& engine) {
    return std::visit(overloaded{
                          [](const ItoEngine& e) { return e.model.dim(); },
                          [](const StratEngine& e) { return e.model.dim(); },
                          [](const RodeEngine& e) { return e.model.dim(); },
                          [](const SleEngine& e) { return e.hamiltonian.rows(); },
                          [](const CircuitEngine&) { return Eigen::Index(2); },
                      },
                      engine);
}

void run_trajectory_densities(const EngineSpec& engine, double dt, std::size_t n_steps, RngStream& stream,
                              const std::function<void(std::size_t, const DensityMatrix&)>& visit) {
    auto adapter = overloaded{
        [&](std::size_t k, const StateVector& psi) { visit(k, projector(psi)); },
        [&](std::size_t k, const DensityMatrix& rho) { visit(k, rho); },
    };
    walk_engine(engine, dt, n_steps, stream, adapter);
}

std::vector<NamedOperator> hermitian_basis(Eigen::Index dim) {
    std::vector<NamedOperator> basis;
    for (Eigen::Index a = 0; a < dim; ++a) {
        Operator p = Operator::Zero(dim, dim);
        p(a, a) = 1;
        basis.push_back({"P" + std::to_string(a), p});
    }
    for (Eigen::Index a = 0; a < dim; ++a) {
        for (Eigen::Index b = a + 1; b < dim; ++b) {
            Operator x = Operator::Zero(dim, dim);
            x(a, b) = x(b, a) = 1;
            Operator y = Operator::Zero(dim, dim);
            y(a, b) = Complex(0, -1);
            y(b, a) = Complex(0, 1);
            const std::string tag = std::to_string(a) + std::to_string(b);
            basis.push_back({"X" + tag, x});
            basis.push_back({"Y" + tag, y});
        }
    }
    return basis;
}

EnsembleResult run_ensemble(const EngineSpec& engine, const EnsembleOptions& options) {
    if (options.n_trajectories == 0) throw Error(ErrorCode::InvalidArgument, "ensemble needs N >= 1");
    if (options.record_every == 0) throw Error(ErrorCode::InvalidArgument, "record_every must be positive");
    require_time_step(options.dt);
    const Eigen::Index dim = engine_dim(engine);
    for (const auto& o : options.observables) {
        require_hermitian(o.op, ("observable " + o.name).c_str());
        if (o.op.rows() != dim) throw Error(ErrorCode::DimensionMismatch, "observable " + o.name + " dimension");
    }

    const std::size_t records = options.n_steps / options.record_every + 1;
    const std::size_t n_obs = options.observables.size();
    const std::size_t n_chunks = (options.n_trajectories + kEnsembleChunk - 1) / kEnsembleChunk;
    std::vector<Partial> partials;
    partials.reserve(n_chunks);
    for (std::size_t c = 0; c < n_chunks; ++c) partials.emplace_back(records, dim, n_obs);
    std::vector<std::exception_ptr> errors(n_chunks);
    std::atomic<std::size_t> next_chunk{0};

    auto worker = [&]() {
        TrajectoryRecorder recorder(records, options.record_every, dim, options.observables);
        for (;;) {
            const std::size_t c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                const std::size_t first = c * kEnsembleChunk;
                const std::size_t last = std::min(first + kEnsembleChunk, options.n_trajectories);
                for (std::size_t i = first; i < last; ++i) {
                    RngStream stream(options.seed, i);
                    try {
                        walk_engine(engine, options.dt, options.n_steps, stream, recorder);
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::NumericalBlowup) throw;
                        ++partials[c].failed;
                        continue;
                    }
                    recorder.commit(partials[c]);
                }
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(options.threads, unsigned(n_chunks)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }

    Partial total = tree_reduce(partials, 0, n_chunks);
    const double allowed = options.max_blowup_fraction * double(options.n_trajectories);
    if (double(total.failed) > allowed || total.count == 0) {
        throw Error(ErrorCode::NumericalBlowup, std::to_string(total.failed) + " of " +
                                                    std::to_string(options.n_trajectories) +
                                                    " trajectories blew up; reduce dt");
    }

    EnsembleResult result;
    result.n_trajectories = total.count;
    result.n_failed = total.failed;
    const double n = double(total.count);
    result.times.resize(records);
    result.mean_rho.resize(records);
    result.purity.resize(records);
    result.standard_error.assign(records, 0.0);
    for (const auto& o : options.observables) {
        result.observable_order.push_back(o.name);
        result.observables[o.name].resize(records);
        result.observable_stderr[o.name].resize(records);
    }
    for (std::size_t j = 0; j < records; ++j) {
        result.times[j] = double(j * options.record_every) * options.dt;
        DensityMatrix mean = total.rho_sum[j] / n;
        mean = 0.5 * (mean + mean.adjoint()).eval();
        result.purity[j] = purity(mean);
        result.mean_rho[j] = std::move(mean);
        for (std::size_t o = 0; o < n_obs; ++o) {
            const double s = total.obs_sum(Eigen::Index(j), Eigen::Index(o));
            const double sq = total.obs_sq_sum(Eigen::Index(j), Eigen::Index(o));
            const double mean_o = s / n;
            double se = 0.0;
            if (total.count > 1) {
                const double var = std::max(0.0, (sq - n * mean_o * mean_o) / (n - 1.0));
                se = std::sqrt(var / n);
            }
            const auto& name = options.observables[o].name;
            result.observables[name][j] = mean_o;
            result.observable_stderr[name][j] = se;
            result.standard_error[j] = std::max(result.standard_error[j], se);
        }
    }
    return result;
}

double tolerance_bound(const ToleranceRule& rule, double stderr_value) {
    return std::visit(overloaded{
                          [](const AbsRule& r) { return r.eps; },
                          [&](const StderrRule& r) { return r.k * stderr_value; },
                          [&](const StderrOrAbsRule& r) { return std::max(r.k * stderr_value, r.floor); },
                      },
                      rule);
}

std::string describe(const ToleranceRule& rule) {
    return std::visit(overloaded{
                          [](const AbsRule& r) { return "distance <= " + format_double(r.eps); },
                          [](const StderrRule& r) { return "distance <= " + format_double(r.k) + "*stderr"; },
                          [](const StderrOrAbsRule& r) {
                              return "distance <= max(" + format_double(r.k) + "*stderr, " +
                                     format_double(r.floor) + ")";
                          },
                      },
                      rule);
}

std::string ComparisonReport::summary() const {
    std::ostringstream out;
    out << (pass ? "PASS" : "FAIL") << " max_trace_distance=" << format_double(max_trace_distance)
        << " time_of_max=" << format_double(time_of_max) << " rule=\"" << rule << "\"";
    if (!per_time_distance.empty()) {
        // Point closest to (or furthest past) its bound.
        std::size_t worst = 0;
        double worst_ratio = -1.0;
        for (std::size_t j = 0; j < per_time_distance.size(); ++j) {
            const double ratio = per_time_bound[j] > 0.0 ? per_time_distance[j] / per_time_bound[j]
                                                         : (per_time_distance[j] > 0.0 ? 1e300 : 0.0);
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst = j;
            }
        }
        out << "\nworst t=" << format_double(times[worst]) << " distance=" << format_double(per_time_distance[worst])
            << " bound=" << format_double(per_time_bound[worst]) << " stderr=" << format_double(per_time_stderr[worst]);
    }
    return out.str();
}

namespace {

ComparisonReport build_report(const std::vector<double>& times, const std::vector<DensityMatrix>& a,
                              const std::vector<DensityMatrix>& b, const std::vector<double>& stderr_values,
                              const ToleranceRule& rule) {
    if (a.size() != b.size() || a.size() != times.size()) {
        throw Error(ErrorCode::GridMismatch, "time grids differ (" + std::to_string(a.size()) + " vs " +
                                                 std::to_string(b.size()) + " points)");
    }
    ComparisonReport report;
    report.rule = describe(rule);
    report.times = times;
    report.per_time_stderr = stderr_values;
    report.per_time_distance.resize(times.size());
    report.per_time_bound.resize(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double d = trace_distance(a[j], b[j]);
        const double bound = tolerance_bound(rule, stderr_values[j]);
        report.per_time_distance[j] = d;
        report.per_time_bound[j] = bound;
        if (j == 0 || d > report.max_trace_distance) {
            report.max_trace_distance = d;
            report.time_of_max = times[j];
        }
        if (!(d <= bound)) report.pass = false;
    }
    return report;
}

}  // namespace

ComparisonReport compare(const EnsembleResult& result, const std::vector<DensityMatrix>& reference,
                         const ToleranceRule& rule) {
    return build_report(result.times, result.mean_rho, reference, result.standard_error, rule);
}

ComparisonReport compare(const EnsembleResult& a, const EnsembleResult& b, const ToleranceRule& rule) {
    if (a.times != b.times) throw Error(ErrorCode::GridMismatch, "ensembles recorded on different time grids");
    std::vector<double> combined(a.times.size());
    for (std::size_t j = 0; j < combined.size(); ++j) {
        combined[j] = std::hypot(a.standard_error[j], b.standard_error[j]);
    }
    return build_report(a.times, a.mean_rho, b.mean_rho, combined, rule);
}

std::vector<DensityMatrix> subsample(const std::vector<DensityMatrix>& series, std::size_t record_every) {
    if (record_every == 0) throw Error(ErrorCode::InvalidArgument, "record_every must be positive");
    std::vector<DensityMatrix> out;
    for (std::size_t k = 0; k < series.size(); k += record_every) out.push_back(series[k]);
    return out;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

void write_rho_header(std::ostream& out, Eigen::Index dim) {
    for (Eigen::Index a = 0; a < dim; ++a) {
        for (Eigen::Index b = 0; b < dim; ++b) {
            out << ",rho_" << a << '_' << b << "_re,rho_" << a << '_' << b << "_im";
        }
    }
}

void write_rho_entries(std::ostream& out, const DensityMatrix& rho) {
    for (Eigen::Index a = 0; a < rho.rows(); ++a) {
        for (Eigen::Index b = 0; b < rho.cols(); ++b) {
            out << ',' << format_double(rho(a, b).real()) << ',' << format_double(rho(a, b).imag());
        }
    }
}

}  // namespace

void write_ensemble_csv(std::ostream& out, const EnsembleResult& result, bool include_rho,
                        const std::string& provenance) {
    if (!provenance.empty()) out << "# " << provenance << '\n';
    out << 't';
    for (const auto& name : result.observable_order) out << ',' << name;
    out << ",purity,stderr";
    for (const auto& name : result.observable_order) out << ',' << name << "_stderr";
    const Eigen::Index dim = result.mean_rho.empty() ? 0 : result.mean_rho.front().rows();
    if (include_rho) write_rho_header(out, dim);
    out << '\n';
    for (std::size_t j = 0; j < result.times.size(); ++j) {
        out << format_double(result.times[j]);
        for (const auto& name : result.observable_order) out << ',' << format_double(result.observables.at(name)[j]);
        out << ',' << format_double(result.purity[j]) << ',' << format_double(result.standard_error[j]);
        for (const auto& name : result.observable_order) {
            out << ',' << format_double(result.observable_stderr.at(name)[j]);
        }
        if (include_rho) write_rho_entries(out, result.mean_rho[j]);
        out << '\n';
    }
}

void write_density_csv(std::ostream& out, const std::vector<double>& times, const std::vector<DensityMatrix>& states,
                       const std::string& provenance) {
    if (times.size() != states.size()) throw Error(ErrorCode::GridMismatch, "times and states differ in length");
    if (!provenance.empty()) out << "# " << provenance << '\n';
    out << 't';
    if (!states.empty()) write_rho_header(out, states.front().rows());
    out << ",purity,trace\n";
    for (std::size_t j = 0; j < states.size(); ++j) {
        out << format_double(times[j]);
        write_rho_entries(out, states[j]);
        out << ',' << format_double(purity(states[j])) << ',' << format_double(states[j].trace().real()) << '\n';
    }
}

}  // namespace stoq
