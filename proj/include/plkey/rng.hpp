// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace plkey {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive a child seed from a parent seed and a list of indices.
inline std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = mix64(parent);
    for (auto p : path)
        s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi)
    {
        if (lo == hi)
            return lo;
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

    double normal() { return normal_(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace plkey
