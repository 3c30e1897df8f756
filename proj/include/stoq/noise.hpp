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

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <variant>
#include <vector>

namespace stoq {

/// Philox4x32-10 keyed by the master seed. The 128-bit counter holds a block
/// index (low words) and the trajectory index (high words), so every
/// (seed, trajectory) pair owns an independent, schedule-free stream.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t master_seed, std::uint64_t trajectory_index)
        : seed_(master_seed), index_(trajectory_index) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t trajectory_index() const { return index_; }
    std::uint64_t block_counter() const { return block_; }

    /// A stream with a key derived from (seed, tag); used for auxiliary draws
    /// (bridge refinement, initial conditions) that must not shift the main sequence.
    RngStream substream(std::uint64_t tag) const;

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    unsigned buffered_ = 0;
};

/// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

struct WhiteNoise {
    double sigma = 1.0;
    friend bool operator==(const WhiteNoise&, const WhiteNoise&) = default;
};

enum class InitialValueMode { StationaryDraw, Fixed };

struct OrnsteinUhlenbeck {
    double std = 1.0;     // stationary standard deviation
    double tau_c = 1.0;   // correlation time
    InitialValueMode z0_mode = InitialValueMode::StationaryDraw;
    double z0 = 0.0;      // used when z0_mode == Fixed
    friend bool operator==(const OrnsteinUhlenbeck&, const OrnsteinUhlenbeck&) = default;
};

using NoiseSpec = std::variant<WhiteNoise, OrnsteinUhlenbeck>;

/// Enforces strictly positive finite parameters; throws ValidationError.
void validate(const NoiseSpec& spec);

struct WienerPath {
    double dt = 0.0;
    std::vector<double> increments;  // increment k covers [k dt, (k+1) dt)

    std::size_t size() const { return increments.size(); }
    double duration() const { return dt * double(increments.size()); }
};

WienerPath sample_wiener_increments(double dt, std::size_t n_steps, RngStream& stream);

/// Brownian-bridge refinement: each coarse increment is split into `factor`
/// increments that are conditionally Normal given their sum, and sum to it.
WienerPath refine_wiener_path(const WienerPath& path, unsigned factor, RngStream& stream);

/// Sums consecutive groups of `factor` increments.
WienerPath coarsen_wiener_path(const WienerPath& path, unsigned factor);

/// Exact-in-distribution OU samples Z_0 .. Z_{n_steps} on a grid of spacing dt.
std::vector<double> sample_ou_path(const OrnsteinUhlenbeck& spec, double dt, std::size_t n_steps, RngStream& stream);

struct DeltaForm {
    double weight = 0.0;  // C(t, s) = weight * delta(t - s)
    friend bool operator==(const DeltaForm&, const DeltaForm&) = default;
};

/// Either a pointwise value (continuous process) or the symbolic delta form of white noise.
using CovarianceForm = std::variant<double, DeltaForm>;

CovarianceForm covariance(const NoiseSpec& spec, double t, double s);

// Binary audit dump: little-endian; header f64 dt, u64 n_steps, u64 seed, u64 index; then n_steps f64.
struct WienerDump {
    WienerPath path;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

void write_wiener_dump(std::ostream& out, const WienerPath& path, std::uint64_t seed, std::uint64_t index);
WienerDump read_wiener_dump(std::istream& in);

}  // namespace stoq
