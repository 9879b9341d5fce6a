#include "symbolkit/rng.hpp"

#include <algorithm>
#include <cmath>

#include "symbolkit/errors.hpp"

namespace symbolkit {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_id(std::uint64_t seed, std::uint64_t path, StreamPurpose purpose) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ path);
    return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

long RandomStream::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<long> dist(mean);
    return dist(engine_);
}

PathStreams::PathStreams(std::uint64_t seed, std::uint64_t path)
    : diffusion(substream_id(seed, path, StreamPurpose::diffusion)),
      jumps(substream_id(seed, path, StreamPurpose::jumps)),
      hazard(substream_id(seed, path, StreamPurpose::hazard)) {}

void check_substream_collisions(std::uint64_t seed, std::uint64_t n_paths) {
    std::vector<std::uint64_t> ids;
    ids.reserve(3 * n_paths);
    for (std::uint64_t p = 0; p < n_paths; ++p)
        for (StreamPurpose s : {StreamPurpose::diffusion, StreamPurpose::jumps, StreamPurpose::hazard})
            ids.push_back(substream_id(seed, p, s));
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw SimulationError("random substream collision for seed " + std::to_string(seed));
}

}  // namespace symbolkit
