#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace aqucb {

/// Deterministic random source. All draws are derived from raw mt19937_64
/// output so sequences are identical across platforms and standard library
/// implementations (std distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). Rejection sampling, exactly uniform.
    int uniform_int(int n) {
        if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
        const auto un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % un;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<int>(x % un);
    }

    /// Index drawn from a probability vector. Entries must be nonnegative and
    /// sum to 1; zero-probability indices are never returned.
    int categorical(std::span<const double> probs) {
        const double u = uniform01();
        double cum = 0.0;
        int last = -1;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0) continue;
            cum += probs[i];
            last = static_cast<int>(i);
            if (u < cum) return last;
        }
        if (last < 0) throw std::invalid_argument("Rng::categorical: no positive entry");
        return last;  // trailing rounding in the cumulative sum
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace aqucb
