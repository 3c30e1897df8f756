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

#include "stoq/noise.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "stoq/errors.hpp"

namespace stoq {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = std::uint64_t(a) * std::uint64_t(b);
    hi = std::uint32_t(p >> 32);
    lo = std::uint32_t(p);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little, "big-endian hosts need a byte swap here");
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw Error(ErrorCode::IoError, "truncated Wiener dump");
    return value;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

void RngStream::refill() {
    const std::array<std::uint32_t, 4> ctr = {std::uint32_t(block_), std::uint32_t(block_ >> 32),
                                              std::uint32_t(index_), std::uint32_t(index_ >> 32)};
    const std::array<std::uint32_t, 2> key = {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)};
    const auto out = philox4x32_10(ctr, key);
    buffer_[0] = (std::uint64_t(out[1]) << 32) | out[0];
    buffer_[1] = (std::uint64_t(out[3]) << 32) | out[2];
    buffered_ = 2;
    ++block_;
}

RngStream::result_type RngStream::operator()() {
    if (buffered_ == 0) refill();
    return buffer_[2 - buffered_--];
}

RngStream RngStream::substream(std::uint64_t tag) const {
    return RngStream(splitmix64(seed_ ^ splitmix64(tag + 1)), index_);
}

void validate(const NoiseSpec& spec) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (const auto* white = std::get_if<WhiteNoise>(&spec)) {
        if (!positive(white->sigma)) {
            throw Error(ErrorCode::ValidationError, "white noise sigma must be positive and finite");
        }
        return;
    }
    const auto& ou = std::get<OrnsteinUhlenbeck>(spec);
    if (!positive(ou.std)) throw Error(ErrorCode::ValidationError, "OU std must be positive and finite");
    if (!positive(ou.tau_c)) throw Error(ErrorCode::ValidationError, "OU tau_c must be positive and finite");
    if (ou.z0_mode == InitialValueMode::Fixed && !std::isfinite(ou.z0)) {
        throw Error(ErrorCode::ValidationError, "OU fixed initial value must be finite");
    }
}

WienerPath sample_wiener_increments(double dt, std::size_t n_steps, RngStream& stream) {
    require_time_step(dt);
    WienerPath path{dt, std::vector<double>(n_steps)};
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    for (auto& dw : path.increments) dw = normal(stream);
    return path;
}

WienerPath refine_wiener_path(const WienerPath& path, unsigned factor, RngStream& stream) {
    if (factor < 2) throw Error(ErrorCode::InvalidArgument, "refinement factor must be at least 2");
    require_time_step(path.dt);
    const double fine_dt = path.dt / factor;
    WienerPath fine{fine_dt, std::vector<double>(path.size() * factor)};
    std::normal_distribution<double> normal(0.0, std::sqrt(fine_dt));
    std::vector<double> draws(factor);
    for (std::size_t k = 0; k < path.size(); ++k) {
        double sum = 0.0;
        for (auto& x : draws) {
            x = normal(stream);
            sum += x;
        }
        // Conditioning i.i.d. Gaussians on their sum shifts each by the mean defect.
        const double shift = (path.increments[k] - sum) / factor;
        double* out = fine.increments.data() + k * factor;
        double partial = 0.0;
        for (unsigned j = 0; j + 1 < factor; ++j) {
            out[j] = draws[j] + shift;
            partial += out[j];
        }
        out[factor - 1] = path.increments[k] - partial;
    }
    return fine;
}

WienerPath coarsen_wiener_path(const WienerPath& path, unsigned factor) {
    if (factor == 0 || path.size() % factor != 0) {
        throw Error(ErrorCode::InvalidArgument, "path length must be a multiple of the coarsening factor");
    }
    WienerPath coarse{path.dt * factor, std::vector<double>(path.size() / factor, 0.0)};
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        double sum = 0.0;
        for (unsigned j = 0; j < factor; ++j) sum += path.increments[k * factor + j];
        coarse.increments[k] = sum;
    }
    return coarse;
}

std::vector<double> sample_ou_path(const OrnsteinUhlenbeck& spec, double dt, std::size_t n_steps, RngStream& stream) {
    require_time_step(dt);
    if (!(spec.tau_c > 0.0) || !(spec.std >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "OU requires std >= 0 and tau_c > 0");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(n_steps + 1);
    z[0] = spec.z0_mode == InitialValueMode::Fixed ? spec.z0 : spec.std * normal(stream);
    const double decay = std::exp(-dt / spec.tau_c);
    const double kick = spec.std * std::sqrt(-std::expm1(-2.0 * dt / spec.tau_c));
    for (std::size_t k = 0; k < n_steps; ++k) z[k + 1] = z[k] * decay + kick * normal(stream);
    return z;
}

CovarianceForm covariance(const NoiseSpec& spec, double t, double s) {
    if (const auto* white = std::get_if<WhiteNoise>(&spec)) return DeltaForm{white->sigma * white->sigma};
    const auto& ou = std::get<OrnsteinUhlenbeck>(spec);
    return ou.std * ou.std * std::exp(-std::abs(t - s) / ou.tau_c);
}

void write_wiener_dump(std::ostream& out, const WienerPath& path, std::uint64_t seed, std::uint64_t index) {
    write_le<double>(out, path.dt);
    write_le<std::uint64_t>(out, path.size());
    write_le<std::uint64_t>(out, seed);
    write_le<std::uint64_t>(out, index);
    for (double dw : path.increments) write_le<double>(out, dw);
    if (!out) throw Error(ErrorCode::IoError, "failed writing Wiener dump");
}

WienerDump read_wiener_dump(std::istream& in) {
    WienerDump dump;
    dump.path.dt = read_le<double>(in);
    const auto n = read_le<std::uint64_t>(in);
    dump.seed = read_le<std::uint64_t>(in);
    dump.index = read_le<std::uint64_t>(in);
    dump.path.increments.resize(n);
    for (auto& dw : dump.path.increments) dw = read_le<double>(in);
    return dump;
}

}  // namespace stoq
