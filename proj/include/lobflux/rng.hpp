#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lobflux {

// One splitmix64 round; used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based derivation of per-stream seeds from a single master seed.
// Replica i of a run always gets derive_seed(master, i), independent of
// scheduling, so ensembles are reproducible across machines.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x517CC1B727220A95ull));
}

// mt19937_64 wrapper with portable draw functions. The standard engine is
// bit-exact everywhere; the distributions below avoid the implementation-
// defined std::*_distribution classes so paths are byte-identical across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform on [0,1), 53-bit resolution
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

    // uniform integer on [lo, hi], inclusive
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1u;
        const std::uint64_t reject_below = (0u - range) % range;  // 2^64 mod range
        std::uint64_t x;
        do {
            x = gen_();
        } while (x < reject_below);
        return lo + static_cast<std::int64_t>(x % range);
    }

    // geometric on {1,2,...} with success probability theta
    std::int64_t geometric(double theta) {
        if (theta >= 1.0) return 1;
        const double u = uniform();
        const std::int64_t d =
            1 + static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-theta)));
        return d < 1 ? 1 : d;
    }

    // geometric conditioned on {1,...,k_max}
    std::int64_t truncated_geometric(double theta, std::int64_t k_max) {
        if (theta >= 1.0 || k_max <= 1) return 1;
        const double total = -std::expm1(static_cast<double>(k_max) * std::log1p(-theta));
        const double u = uniform() * total;
        std::int64_t d =
            1 + static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-theta)));
        if (d < 1) d = 1;
        if (d > k_max) d = k_max;
        return d;
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace lobflux
