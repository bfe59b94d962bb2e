#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace winr {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy: maps onto CLI exit codes (usage=1, data=2, numeric=3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments, shape mismatches, contract violations.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Malformed files (captures, models, configs).
class ParseError : public Error {
public:
    using Error::Error;
};

// Divergence, non-finite values, undefined metrics.
class NumericError : public Error {
public:
    using Error::Error;
};

// Deterministic RNG. mt19937_64 has a standard-mandated sequence; the
// float mappings below are pinned here instead of using std::*_distribution,
// whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1).
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * 3.141592653589793238462643383279502884 * uniform();
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = gen_();
        while (x >= lim) x = gen_();
        return x % n;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace winr
