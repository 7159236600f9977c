// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------
//
// Two-port transmission (ABCD) algebra over a frequency grid:
//
//   [V1]   [A B] [V2]
//   [I1] = [C D] [I2]      I2 flowing out of port 2.
//
// Everything here is a pure function of immutable values.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Core>

#include "plkey/spectrum.hpp"

namespace plkey {

/// Divisors with magnitude below this are treated as zero.
inline constexpr double kNearZero = 1e-30;
/// Reciprocity tolerance for channels built by this library.
inline constexpr double kReciprocityTol = 1e-9;
/// Reciprocity tolerance for channels handed in from outside.
inline constexpr double kReciprocityInputTol = 1e-6;

namespace detail {

template <typename DerivedN, typename DerivedD>
auto checked_quotient(const Eigen::MatrixBase<DerivedN>& num, const Eigen::MatrixBase<DerivedD>& den,
                      const char* what)
{
    using Scalar = typename DerivedN::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(num.size());
    for (Eigen::Index k = 0; k < num.size(); ++k) {
        if (std::abs(den[k]) < kNearZero)
            throw DegenerateDenominator(what, static_cast<std::size_t>(k));
        out[k] = num[k] / den[k];
    }
    return out;
}

} // namespace detail

/// Per-bin ABCD matrix of a two-port.
template <typename Real>
class BasicAbcdChannel {
public:
    using Spec = BasicSpectrum<Real>;
    using Scalar = typename Spec::Scalar;
    using Vector = typename Spec::Vector;
    using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

    BasicAbcdChannel() = default;

    BasicAbcdChannel(FrequencyGrid grid, Vector a, Vector b, Vector c, Vector d)
        : grid_(grid), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d))
    {
        const auto n = static_cast<Eigen::Index>(grid_.n_bins);
        if (a_.size() != n || b_.size() != n || c_.size() != n || d_.size() != n)
            throw InvalidArgument("AbcdChannel: entry length does not match grid");
        if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite() || !d_.allFinite())
            throw InvalidArgument("AbcdChannel: non-finite entry");
    }

    const FrequencyGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_.n_bins; }

    const Vector& a() const noexcept { return a_; }
    const Vector& b() const noexcept { return b_; }
    const Vector& c() const noexcept { return c_; }
    const Vector& d() const noexcept { return d_; }

    Spec A() const { return {grid_, a_}; }
    Spec B() const { return {grid_, b_}; }
    Spec C() const { return {grid_, c_}; }
    Spec D() const { return {grid_, d_}; }

    Matrix2 matrix(std::size_t k) const
    {
        const auto i = static_cast<Eigen::Index>(k);
        Matrix2 m;
        m << a_[i], b_[i], c_[i], d_[i];
        return m;
    }

    /// |AD - BC - 1| per bin, relative to max(1, |A||D| + |B||C|).
    Eigen::Matrix<Real, Eigen::Dynamic, 1> reciprocity_error() const
    {
        Eigen::Matrix<Real, Eigen::Dynamic, 1> err(a_.size());
        for (Eigen::Index k = 0; k < a_.size(); ++k) {
            const Scalar det = a_[k] * d_[k] - b_[k] * c_[k];
            const Real scale = std::max<Real>(
                Real(1), std::abs(a_[k]) * std::abs(d_[k]) + std::abs(b_[k]) * std::abs(c_[k]));
            err[k] = std::abs(det - Scalar(1)) / scale;
        }
        return err;
    }

    Real max_reciprocity_error() const { return reciprocity_error().maxCoeff(); }

    /// Throws ReciprocityViolation at the first bin whose error exceeds tol.
    void require_reciprocal(Real tol) const
    {
        const auto err = reciprocity_error();
        for (Eigen::Index k = 0; k < err.size(); ++k)
            if (!(err[k] <= tol))
                throw ReciprocityViolation(static_cast<std::size_t>(k), static_cast<double>(err[k]));
    }

private:
    FrequencyGrid grid_;
    Vector a_, b_, c_, d_;
};

using AbcdChannel = BasicAbcdChannel<double>;

/// Transmit / receive impedances of the modems at the two ends.
template <typename Real>
struct BasicTermination {
    BasicSpectrum<Real> z_t;
    BasicSpectrum<Real> z_l;

    BasicTermination(BasicSpectrum<Real> zt, BasicSpectrum<Real> zl) : z_t(std::move(zt)), z_l(std::move(zl))
    {
        require_same_grid(z_t, z_l);
        if ((z_t.values().real().array() < Real(0)).any() || (z_l.values().real().array() < Real(0)).any())
            throw InvalidArgument("Termination: impedances must have non-negative real part");
    }

    /// Scalar impedances broadcast over the grid.
    static BasicTermination constant(const FrequencyGrid& grid, std::complex<Real> zt, std::complex<Real> zl)
    {
        return {BasicSpectrum<Real>::constant(grid, zt), BasicSpectrum<Real>::constant(grid, zl)};
    }

    const FrequencyGrid& grid() const noexcept { return z_t.grid(); }
};

using Termination = BasicTermination<double>;

// ---------------------------------------------------------------------------
// Building blocks

template <typename Real = double>
BasicAbcdChannel<Real> abcd_identity(const FrequencyGrid& grid)
{
    using V = typename BasicAbcdChannel<Real>::Vector;
    const auto n = static_cast<Eigen::Index>(grid.n_bins);
    return {grid, V::Ones(n), V::Zero(n), V::Zero(n), V::Ones(n)};
}

/// Uniform transmission line of characteristic impedance z0, propagation constant gamma (1/m).
template <typename Real>
BasicAbcdChannel<Real> abcd_line(const BasicSpectrum<Real>& z0, const BasicSpectrum<Real>& gamma, Real length)
{
    require_same_grid(z0, gamma);
    if (!(length > Real(0)))
        throw InvalidArgument("abcd_line: length must be positive");
    if ((z0.values().array().abs() < kNearZero).any())
        throw InvalidArgument("abcd_line: zero characteristic impedance");
    const auto gl = (gamma.values() * length).eval();
    const auto ch = gl.array().cosh().matrix().eval();
    const auto sh = gl.array().sinh().matrix().eval();
    return {gamma.grid(), ch, z0.values().cwiseProduct(sh), sh.cwiseQuotient(z0.values()), ch};
}

template <typename Real>
BasicAbcdChannel<Real> abcd_line(const BasicSpectrum<Real>& gamma, std::complex<Real> z0, Real length)
{
    return abcd_line(BasicSpectrum<Real>::constant(gamma.grid(), z0), gamma, length);
}

/// Shunt admittance y across the line.
template <typename Real>
BasicAbcdChannel<Real> abcd_shunt(const BasicSpectrum<Real>& y)
{
    using V = typename BasicAbcdChannel<Real>::Vector;
    const auto n = static_cast<Eigen::Index>(y.size());
    return {y.grid(), V::Ones(n), V::Zero(n), y.values(), V::Ones(n)};
}

/// Series impedance z in one conductor.
template <typename Real>
BasicAbcdChannel<Real> abcd_series(const BasicSpectrum<Real>& z)
{
    using V = typename BasicAbcdChannel<Real>::Vector;
    const auto n = static_cast<Eigen::Index>(z.size());
    return {z.grid(), V::Ones(n), z.values(), V::Zero(n), V::Ones(n)};
}

/// Per-bin matrix product left * right.
template <typename Real>
BasicAbcdChannel<Real> cascade(const BasicAbcdChannel<Real>& left, const BasicAbcdChannel<Real>& right)
{
    if (!(left.grid() == right.grid()))
        throw GridMismatch();
    const auto& la = left.a();
    const auto& lb = left.b();
    const auto& lc = left.c();
    const auto& ld = left.d();
    return {left.grid(),
            la.cwiseProduct(right.a()) + lb.cwiseProduct(right.c()),
            la.cwiseProduct(right.b()) + lb.cwiseProduct(right.d()),
            lc.cwiseProduct(right.a()) + ld.cwiseProduct(right.c()),
            lc.cwiseProduct(right.b()) + ld.cwiseProduct(right.d())};
}

/// Transmission matrix seen from port 2: A and D swap.
template <typename Real>
BasicAbcdChannel<Real> reverse_direction(const BasicAbcdChannel<Real>& ch)
{
    ch.require_reciprocal(Real(kReciprocityInputTol));
    return {ch.grid(), ch.d(), ch.b(), ch.c(), ch.a()};
}

// ---------------------------------------------------------------------------
// Transfer functions and input impedances

/// H1 = V2 / V1g = ZL / (ZL A + B + ZL ZT C + ZT D).
template <typename Real>
BasicSpectrum<Real> ctf_forward(const BasicAbcdChannel<Real>& ch, const BasicTermination<Real>& term)
{
    if (!(ch.grid() == term.grid()))
        throw GridMismatch();
    const auto& zt = term.z_t.values();
    const auto& zl = term.z_l.values();
    const auto den = (zl.cwiseProduct(ch.a()) + ch.b() + zl.cwiseProduct(zt).cwiseProduct(ch.c()) +
                      zt.cwiseProduct(ch.d()))
                         .eval();
    return {ch.grid(), detail::checked_quotient(zl, den, "ctf_forward")};
}

/// H2 = V1 / V2g = ZL / (ZL D + B + ZL ZT C + ZT A).
template <typename Real>
BasicSpectrum<Real> ctf_reverse(const BasicAbcdChannel<Real>& ch, const BasicTermination<Real>& term)
{
    if (!(ch.grid() == term.grid()))
        throw GridMismatch();
    const auto& zt = term.z_t.values();
    const auto& zl = term.z_l.values();
    const auto den = (zl.cwiseProduct(ch.d()) + ch.b() + zl.cwiseProduct(zt).cwiseProduct(ch.c()) +
                      zt.cwiseProduct(ch.a()))
                         .eval();
    return {ch.grid(), detail::checked_quotient(zl, den, "ctf_reverse")};
}

/// Zin1 = (A + B/ZL) / (C + D/ZL): port 1 looking in, port 2 loaded by z_l.
template <typename Real>
BasicSpectrum<Real> zin_port1(const BasicAbcdChannel<Real>& ch, const BasicSpectrum<Real>& z_l)
{
    if (!(ch.grid() == z_l.grid()))
        throw GridMismatch();
    const auto& zl = z_l.values();
    // multiplied through by ZL
    const auto num = (zl.cwiseProduct(ch.a()) + ch.b()).eval();
    const auto den = (zl.cwiseProduct(ch.c()) + ch.d()).eval();
    return {ch.grid(), detail::checked_quotient(num, den, "zin_port1")};
}

/// Zin2 = (D + B/ZL) / (C + A/ZL): port 2 looking in, port 1 loaded by z_l.
template <typename Real>
BasicSpectrum<Real> zin_port2(const BasicAbcdChannel<Real>& ch, const BasicSpectrum<Real>& z_l)
{
    if (!(ch.grid() == z_l.grid()))
        throw GridMismatch();
    const auto& zl = z_l.values();
    const auto num = (zl.cwiseProduct(ch.d()) + ch.b()).eval();
    const auto den = (zl.cwiseProduct(ch.c()) + ch.a()).eval();
    return {ch.grid(), detail::checked_quotient(num, den, "zin_port2")};
}

// ---------------------------------------------------------------------------
// Symmetric normalization

template <typename Real>
struct NormalizedPair {
    BasicSpectrum<Real> forward;  // Z21' or Y21'
    BasicSpectrum<Real> backward; // Z12' or Y12'
};

/// Trans-impedances referred to ideal current drive and open-circuit reception.
///
/// i1g, v2: source current at port 1 and received voltage at port 2 (forward);
/// i2g, v1: the same quantities for transmission from port 2.
template <typename Real>
NormalizedPair<Real> normalize_transimpedance(const BasicSpectrum<Real>& i1g, const BasicSpectrum<Real>& v2,
                                              const BasicSpectrum<Real>& i2g, const BasicSpectrum<Real>& v1,
                                              const BasicSpectrum<Real>& zin1, const BasicSpectrum<Real>& zin2,
                                              const BasicTermination<Real>& term)
{
    for (const auto* s : {&v2, &i2g, &v1, &zin1, &zin2, &term.z_t})
        require_same_grid(i1g, *s);
    const auto& zt = term.z_t.values();
    const auto& zl = term.z_l.values();
    const char* what = "normalize_transimpedance";

    const auto i1i = detail::checked_quotient(zt.cwiseProduct(i1g.values()), (zin1.values() + zt).eval(), what);
    const auto v2oc = detail::checked_quotient((zin2.values() + zl).cwiseProduct(v2.values()).eval(), zl, what);
    const auto i2i = detail::checked_quotient(zt.cwiseProduct(i2g.values()), (zin2.values() + zt).eval(), what);
    const auto v1oc = detail::checked_quotient((zin1.values() + zl).cwiseProduct(v1.values()).eval(), zl, what);

    return {{i1g.grid(), detail::checked_quotient(v2oc, i1i, what)},
            {i1g.grid(), detail::checked_quotient(v1oc, i2i, what)}};
}

/// Trans-admittances referred to ideal voltage drive and short-circuit reception.
///
/// v1g, i2: source voltage at port 1 and received current at port 2 (forward);
/// v2g, i1: the same quantities for transmission from port 2.
template <typename Real>
NormalizedPair<Real> normalize_transadmittance(const BasicSpectrum<Real>& v1g, const BasicSpectrum<Real>& i2,
                                               const BasicSpectrum<Real>& v2g, const BasicSpectrum<Real>& i1,
                                               const BasicSpectrum<Real>& zin1, const BasicSpectrum<Real>& zin2,
                                               const BasicTermination<Real>& term)
{
    for (const auto* s : {&i2, &v2g, &i1, &zin1, &zin2, &term.z_t})
        require_same_grid(v1g, *s);
    const auto& zt = term.z_t.values();
    const auto& zl = term.z_l.values();
    const char* what = "normalize_transadmittance";

    const auto v1i =
        detail::checked_quotient(zin1.values().cwiseProduct(v1g.values()), (zin1.values() + zt).eval(), what);
    const auto i2cc =
        detail::checked_quotient((zin2.values() + zl).cwiseProduct(i2.values()).eval(), zin2.values(), what);
    const auto v2i =
        detail::checked_quotient(zin2.values().cwiseProduct(v2g.values()), (zin2.values() + zt).eval(), what);
    const auto i1cc =
        detail::checked_quotient((zin1.values() + zl).cwiseProduct(i1.values()).eval(), zin1.values(), what);

    return {{v1g.grid(), detail::checked_quotient(i2cc, v1i, what)},
            {v1g.grid(), detail::checked_quotient(i1cc, v2i, what)}};
}

/// mean_k |h1 - h2| / mean_k |h1|; zero iff the spectra coincide.
template <typename Real>
Real asymmetry_metric(const BasicSpectrum<Real>& h1, const BasicSpectrum<Real>& h2)
{
    require_same_grid(h1, h2);
    const Real ref = h1.values().cwiseAbs().mean();
    if (!(ref > Real(0)))
        throw DegenerateDenominator("asymmetry_metric", 0);
    return (h1.values() - h2.values()).cwiseAbs().mean() / ref;
}

} // namespace plkey
