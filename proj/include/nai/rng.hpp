#pragma once

#include <cstdint>
#include <random>

namespace nai {

/// Splitmix64 step, used to derive independent stream seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seeded random stream with a stable uniform-double contract: each draw
/// consumes exactly one mt19937_64 output and maps its top 53 bits to [0,1).
/// The draw order is part of the reproducibility contract, so callers can
/// replay sample sequences independently of the standard library's
/// distribution implementations.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [-1, 1).
    double uniform_sym() { return 2.0 * uniform01() - 1.0; }

    /// Uniform on [-r, r).
    double uniform_sym(double r) { return r * uniform_sym(); }

private:
    std::mt19937_64 engine_;
};

} // namespace nai
