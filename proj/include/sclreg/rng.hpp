#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace sclreg {

/// Deterministic random source used everywhere randomness is needed.
///
/// The raw stream is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard, so integer draws are identical on every platform. Derived
/// real draws use explicit constructions (not the standard distributions,
/// whose output is implementation-defined):
///   uniform01: (x >> 11) * 2^-53, uniform on [0, 1)
///   normal:    Box-Muller on two uniform01 draws
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = gen_();
        while (x >= limit)
            x = gen_();
        return x % n;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// splitmix64 step; the standard finalizer constants.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives a child seed from a base seed and a list of integer tags by
/// folding each tag through splitmix64. Used by the experiment harness so
/// that every (purpose, index...) cell has an independent, reproducible
/// stream; the exact chain is part of the documented output contract.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = splitmix64(base);
    for (std::uint64_t t : tags)
        s = splitmix64(s ^ t);
    return s;
}

} // namespace sclreg
