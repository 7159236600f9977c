// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <utility>

#include <Eigen/Core>

#include "plkey/grid.hpp"

namespace plkey {

/// Complex samples over a frequency grid (CTFs, impedances, ABCD entries).
template <typename Real>
class BasicSpectrum {
public:
    using RealScalar = Real;
    using Scalar = std::complex<Real>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    BasicSpectrum() = default;

    BasicSpectrum(FrequencyGrid grid, Vector values) : grid_(grid), values_(std::move(values))
    {
        if (static_cast<std::size_t>(values_.size()) != grid_.n_bins)
            throw InvalidArgument("Spectrum: value count does not match grid");
        if (!values_.allFinite())
            throw InvalidArgument("Spectrum: non-finite value");
    }

    template <typename Derived>
    BasicSpectrum(FrequencyGrid grid, const Eigen::MatrixBase<Derived>& values)
        : BasicSpectrum(grid, Vector(values))
    {
    }

    static BasicSpectrum constant(const FrequencyGrid& grid, Scalar value)
    {
        return {grid, Vector::Constant(static_cast<Eigen::Index>(grid.n_bins), value)};
    }

    static BasicSpectrum zero(const FrequencyGrid& grid) { return constant(grid, Scalar(0)); }

    const FrequencyGrid& grid() const noexcept { return grid_; }
    const Vector& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return grid_.n_bins; }
    Scalar operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }

private:
    FrequencyGrid grid_;
    Vector values_;
};

using Spectrum = BasicSpectrum<double>;

template <typename Real>
void require_same_grid(const BasicSpectrum<Real>& a, const BasicSpectrum<Real>& b)
{
    if (!(a.grid() == b.grid()))
        throw GridMismatch();
}

} // namespace plkey
