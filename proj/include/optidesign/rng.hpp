#pragma once

#include <cstdint>

namespace optidesign {

// splitmix64: small, seedable, platform-stable stream generator. Used to
// derive independent per-sim substreams from (seed, index) so serial and
// parallel execution see identical draws.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform on (0, 1]
    double next_unit() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }
};

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    mix.next();
    return mix.next();
}

/// Box-Muller normal sampler over a SplitMix64 stream (bit-identical across
/// platforms, unlike std::normal_distribution).
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : stream_(seed) {}

    double next(double mean = 0.0, double stddev = 1.0);

private:
    SplitMix64 stream_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace optidesign
