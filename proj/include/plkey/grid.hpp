// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Core>

#include "plkey/errors.hpp"

namespace plkey {

/// Uniform frequency grid f_k = f_start + k * f_step, k = 0 .. n_bins-1.
struct FrequencyGrid {
    double f_start = 0.0;
    double f_step = 1.0;
    std::size_t n_bins = 2;

    FrequencyGrid() = default;
    FrequencyGrid(double start, double step, std::size_t bins) : f_start(start), f_step(step), n_bins(bins)
    {
        if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(start))
            throw InvalidArgument("FrequencyGrid: f_step must be positive and finite");
        if (bins < 2)
            throw InvalidArgument("FrequencyGrid: n_bins must be at least 2");
    }

    /// Grid covering [f_lo, f_hi] inclusive with the given number of bins.
    static FrequencyGrid span(double f_lo, double f_hi, std::size_t bins)
    {
        if (bins < 2 || !(f_hi > f_lo))
            throw InvalidArgument("FrequencyGrid::span: need f_hi > f_lo and at least 2 bins");
        return {f_lo, (f_hi - f_lo) / static_cast<double>(bins - 1), bins};
    }

    double frequency(std::size_t k) const { return f_start + static_cast<double>(k) * f_step; }

    Eigen::VectorXd frequencies() const
    {
        Eigen::VectorXd f(static_cast<Eigen::Index>(n_bins));
        for (std::size_t k = 0; k < n_bins; ++k)
            f[static_cast<Eigen::Index>(k)] = frequency(k);
        return f;
    }

    friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;
};

} // namespace plkey
