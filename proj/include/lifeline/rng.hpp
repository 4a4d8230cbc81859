#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lifeline/errors.hpp"

namespace lifeline {

// splitmix64: the standard 64-bit mixer, used both as a quick generator and
// to derive independent per-row stream seeds from (seed, row index).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256** seeded via splitmix64.  Small, fast, and the output sequence
// is pinned by this file alone (no dependence on library-specific
// std::*_distribution implementations), which keeps simulation batches
// bit-identical across platforms and worker counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    // Independent stream for one sample row: mixes (seed, row) so that
    // chunked parallel generation reproduces the serial batch exactly.
    static Rng for_row(std::uint64_t seed, std::uint64_t row) {
        std::uint64_t sm = seed;
        const std::uint64_t a = splitmix64_next(sm);
        sm = row + 0x632BE59BD9B4E019ULL;
        const std::uint64_t b = splitmix64_next(sm);
        return Rng(a ^ (b * 0x9E3779B97F4A7C15ULL));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]: avoids log(0) in exponential sampling.
    double uniform01_open_left() { return 1.0 - uniform01(); }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw DomainError("Rng::exponential: rate must be positive");
        return -std::log(uniform01_open_left()) / rate;
    }

    // Index i with probability weights[i] / sum(weights).
    int categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw DomainError("Rng::categorical: negative weight");
            total += w;
        }
        if (!(total > 0.0)) throw DomainError("Rng::categorical: all weights zero");
        double x = uniform01() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            x -= weights[i];
            if (x < 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

} // namespace lifeline
