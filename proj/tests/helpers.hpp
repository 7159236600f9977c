// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <numbers>

#include "plkey/rng.hpp"
#include "plkey/two_port.hpp"

namespace plkey::test {

using cd = std::complex<double>;
inline constexpr cd J{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

inline FrequencyGrid small_grid(std::size_t n = 4)
{
    return {1e6, 1e6, n};
}

inline double max_rel(const Spectrum& ref, const Spectrum& x)
{
    return ((ref.values() - x.values()).cwiseAbs().array() / ref.values().cwiseAbs().array()).maxCoeff();
}

inline double max_abs(const Spectrum::Vector& x, const Spectrum::Vector& y)
{
    return (x - y).cwiseAbs().maxCoeff();
}

/// Random lossy line, shunt or series block; reciprocal by construction.
inline AbcdChannel random_block(const FrequencyGrid& g, Rng& rng)
{
    const auto n = static_cast<Eigen::Index>(g.n_bins);
    switch (rng.index(3)) {
    case 0: {
        Spectrum::Vector gamma(n);
        for (Eigen::Index k = 0; k < n; ++k)
            gamma[k] = cd(rng.uniform(0.0, 0.05), 2 * kPi * g.frequency(static_cast<std::size_t>(k)) / 1.8e8);
        return abcd_line(Spectrum(g, gamma), cd(rng.uniform(30, 150), rng.uniform(-5, 5)), rng.uniform(1, 40));
    }
    case 1:
        return abcd_shunt(Spectrum::constant(g, cd(rng.uniform(0, 0.05), rng.uniform(-0.05, 0.05))));
    default:
        return abcd_series(Spectrum::constant(g, cd(rng.uniform(0, 200), rng.uniform(-200, 200))));
    }
}

inline AbcdChannel random_cascade(const FrequencyGrid& g, Rng& rng, std::size_t blocks)
{
    AbcdChannel ch = abcd_identity(g);
    for (std::size_t i = 0; i < blocks; ++i)
        ch = cascade(ch, random_block(g, rng));
    return ch;
}

} // namespace plkey::test
