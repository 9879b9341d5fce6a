#pragma once

// Per-path random substreams. Every (seed, path, purpose) triple maps to its own
// std::mt19937_64 seeded through splitmix64, so paths can be generated in any
// order and coupled across runs that share a seed.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace symbolkit {

enum class StreamPurpose : std::uint64_t { diffusion = 1, jumps = 2, hazard = 3 };

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t substream_id(std::uint64_t seed, std::uint64_t path, StreamPurpose purpose);

class RandomStream {
public:
    explicit RandomStream(std::uint64_t id) : engine_(id) {}

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    double normal() { return normal_(engine_); }
    /// Exponential(1), strictly positive.
    double exponential() { return -std::log(uniform()); }
    long poisson(double mean);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct PathStreams {
    RandomStream diffusion;
    RandomStream jumps;
    RandomStream hazard;

    PathStreams(std::uint64_t seed, std::uint64_t path);
};

/// Throws SimulationError if two substreams of the first n paths share an id.
void check_substream_collisions(std::uint64_t seed, std::uint64_t n_paths);

}  // namespace symbolkit
