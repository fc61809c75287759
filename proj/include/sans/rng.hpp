#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sans {

// splitmix64; used to derive independent stream seeds from one master seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// mt19937_64 with fixed int/double mappings so runs reproduce across
// platforms (std::uniform_*_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform in [0, bound). Multiply-shift map; bias is O(bound/2^64).
    uint64_t uniform(uint64_t bound) {
        return static_cast<uint64_t>(
            (static_cast<__uint128_t>(next_u64()) * bound) >> 64);
    }

    uint32_t uniform_u32(uint32_t bound) { return static_cast<uint32_t>(uniform(bound)); }

    // Uniform in [lo, hi) with 53-bit mantissa resolution.
    double uniform_real(double lo, double hi) {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    // Fisher-Yates; spelled out because std::shuffle is not reproducible
    // across standard library implementations.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace sans
