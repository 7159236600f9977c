// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "plkey/quantize.hpp"
#include "plkey/spectrum.hpp"
#include "plkey/tdst.hpp"

namespace plkey {

/// sum x conj(y) / sqrt(sum |x|^2 sum |y|^2). Accepts any Eigen vector expression.
template <typename DerivedX, typename DerivedY>
std::complex<double> det_correlation(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y)
{
    if (x.size() != y.size() || x.size() == 0)
        throw InvalidArgument("det_correlation: sequences must have equal, nonzero length");
    const auto xc = x.template cast<std::complex<double>>().eval();
    const auto yc = y.template cast<std::complex<double>>().eval();
    const double ex = xc.squaredNorm();
    const double ey = yc.squaredNorm();
    if (!(ex > 0.0) || !(ey > 0.0))
        throw InvalidArgument("det_correlation: zero-energy input");
    // Eigen's dot conjugates its first argument
    return yc.dot(xc) / std::sqrt(ex * ey);
}

inline std::complex<double> det_correlation(const Spectrum& x, const Spectrum& y)
{
    require_same_grid(x, y);
    return det_correlation(x.values(), y.values());
}

/// det_correlation of the element-wise magnitudes.
template <typename DerivedX, typename DerivedY>
double abs_correlation(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y)
{
    return det_correlation(x.cwiseAbs(), y.cwiseAbs()).real();
}

inline double abs_correlation(const Spectrum& x, const Spectrum& y)
{
    require_same_grid(x, y);
    return abs_correlation(x.values(), y.values());
}

/// Which realization pairs (i, j) within a transmitter group enter the expectation.
enum class PairSet { all, distinct };

/// CTFs grouped by transmitter.
using CtfEnsemble = std::vector<std::vector<Spectrum>>;

/// E_ij[H_i(l) conj(H_j(m))] / sqrt(E_i|H_i(l)|^2 E_j|H_j(m)|^2) over pairs sharing a transmitter.
std::complex<double> space_freq_correlation(const CtfEnsemble& ensemble, std::size_t l, std::size_t m,
                                            PairSet pairs = PairSet::all);

struct ZinCtfRecord {
    Spectrum zin; // input impedance at the transmitter
    Spectrum h;   // CTF from the same transmitter
};
using ZinCtfEnsemble = std::vector<std::vector<ZinCtfRecord>>;

/// E_ij[Zin_i(l) conj(H_j(m))] / sqrt(E_i|Zin_i(l)|^2 E_j|H_j(m)|^2) over pairs sharing a transmitter.
std::complex<double> zin_ctf_correlation(const ZinCtfEnsemble& ensemble, std::size_t l, std::size_t m,
                                         PairSet pairs = PairSet::all);

/// sum |a_i - b_i| / max(max a, max b); the Hamming distance for binary keys.
double key_distance(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);
double key_distance(const BinaryKey& a, const BinaryKey& b);
/// Compares valid positions only; masks must agree.
double key_distance(const SymbolKey& a, const SymbolKey& b);

/// Plug-in entropy (bits) of the per-position symbol distribution, averaged over positions.
double key_entropy(std::span<const BinaryKey> keys);
double key_entropy(std::span<const SymbolKey> keys);

/// Plug-in entropy (bits per symbol) of the symbols inside one key.
double symbol_entropy(std::span<const std::uint32_t> symbols);

} // namespace plkey
