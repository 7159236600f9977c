// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include "plkey/sounding.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "plkey/rng.hpp"

namespace plkey {

void NoisySounder::validate() const
{
    if (n_avg < 1)
        throw InvalidArgument("NoisySounder: n_avg must be at least 1");
    if (std::isnan(snr_h_db) || std::isnan(snr_z_db))
        throw InvalidArgument("NoisySounder: SNR is NaN");
}

Spectrum observe(const Spectrum& truth, double snr_db, std::size_t n_avg, std::uint64_t seed)
{
    if (n_avg < 1)
        throw InvalidArgument("observe: n_avg must be at least 1");
    if (std::isinf(snr_db) && snr_db > 0)
        return truth;
    if (std::isnan(snr_db))
        throw InvalidArgument("observe: SNR is NaN");

    const double rel_sigma = std::pow(10.0, -snr_db / 20.0);
    Rng rng(seed);
    const auto& x = truth.values();
    Spectrum::Vector acc = Spectrum::Vector::Zero(x.size());
    for (std::size_t draw = 0; draw < n_avg; ++draw) {
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            // real and imaginary parts each carry half the noise power
            const double s = rel_sigma * std::abs(x[k]) * std::numbers::sqrt2 / 2.0;
            const double re = rng.normal();
            const double im = rng.normal();
            acc[k] += x[k] + std::complex<double>(s * re, s * im);
        }
    }
    return {truth.grid(), acc / static_cast<double>(n_avg)};
}

Spectrum observe(const Spectrum& truth, const NoisySounder& sounder, Observable what, std::uint64_t stream)
{
    sounder.validate();
    const double snr = what == Observable::transfer_function ? sounder.snr_h_db : sounder.snr_z_db;
    return observe(truth, snr, sounder.n_avg, derive_seed(sounder.seed, {stream}));
}

Eigen::VectorXd Window::weights(std::size_t n) const
{
    Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    if (n < 2)
        return w;
    const double last = static_cast<double>(n - 1);
    switch (kind) {
    case WindowKind::none:
        break;
    case WindowKind::hann:
        for (std::size_t k = 0; k < n; ++k)
            w[static_cast<Eigen::Index>(k)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / last);
        break;
    case WindowKind::raised_cosine: {
        // Tukey taper: cosine ramps over rolloff/2 of the band at each edge
        if (!(rolloff > 0.0))
            break;
        const double r = std::min(rolloff, 1.0);
        const double edge = r * last / 2.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = static_cast<double>(k);
            const double d = std::min(x, last - x);
            if (d < edge)
                w[static_cast<Eigen::Index>(k)] = 0.5 - 0.5 * std::cos(std::numbers::pi * d / edge);
        }
        break;
    }
    }
    return w;
}

std::string Window::describe() const
{
    std::ostringstream ss;
    ss << to_string(kind);
    if (kind == WindowKind::raised_cosine)
        ss << "(" << rolloff << ")";
    return ss.str();
}

WindowKind window_kind_from_string(const std::string& s)
{
    if (s == "none")
        return WindowKind::none;
    if (s == "raised_cosine")
        return WindowKind::raised_cosine;
    if (s == "hann")
        return WindowKind::hann;
    throw InvalidArgument("unknown window '" + s + "'");
}

std::string to_string(WindowKind k)
{
    switch (k) {
    case WindowKind::none:
        return "none";
    case WindowKind::raised_cosine:
        return "raised_cosine";
    case WindowKind::hann:
        return "hann";
    }
    return "none";
}

ImpulseResponse impulse_response(const Spectrum& h, std::size_t pad_factor, const Window& window)
{
    const std::size_t n_bins = h.size();
    const std::size_t n = (1 + pad_factor) * n_bins;
    const Eigen::VectorXd w = window.weights(n_bins);

    std::vector<std::complex<double>> freq(n, {0.0, 0.0});
    for (std::size_t k = 0; k < n_bins; ++k)
        freq[k] = h[k] * w[static_cast<Eigen::Index>(k)];

    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<std::complex<double>> time;
    fft.inv(time, freq);

    ImpulseResponse ir;
    ir.t_step = 1.0 / (static_cast<double>(n) * h.grid().f_step);
    ir.stride = 1 + pad_factor;
    ir.magnitude.resize(static_cast<Eigen::Index>(n));
    const double scale = 1.0 / static_cast<double>(n_bins);
    for (std::size_t i = 0; i < n; ++i)
        ir.magnitude[static_cast<Eigen::Index>(i)] = std::abs(time[i]) * scale;
    return ir;
}

} // namespace plkey
