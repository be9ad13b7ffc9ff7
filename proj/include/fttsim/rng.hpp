#pragma once

#include <cstdint>
#include <random>

namespace fttsim {

/// Stable identity of a random stream: (role, key) never depends on the
/// order in which nodes are created, so adding or removing a node leaves
/// every other node's draws untouched.
enum class StreamRole : std::uint32_t {
    Sensor = 1,
    Controller = 2,
    Actuator = 3,
    Interferer = 4,
    InterferenceSink = 5,
};

class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, StreamRole role, std::uint64_t key) {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(role), static_cast<std::uint32_t>(key),
                          static_cast<std::uint32_t>(key >> 32)};
        engine_.seed(seq);
    }

    /// Uniform integer in [0, upper].
    std::uint64_t uniform_int(std::uint64_t upper) {
        return std::uniform_int_distribution<std::uint64_t>(0, upper)(engine_);
    }

    /// Uniform real in [0, 1).
    double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform01() < p;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace fttsim
