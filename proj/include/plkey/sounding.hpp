// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "plkey/spectrum.hpp"

namespace plkey {

inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

/// Averaging estimator with per-bin complex Gaussian noise.
struct NoisySounder {
    double snr_h_db = 30.0; // transfer-function observations
    double snr_z_db = 30.0; // impedance observations
    std::size_t n_avg = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Mean of n_avg draws of truth + w, w circular complex Gaussian with
/// E|w(k)|^2 = |truth(k)|^2 / 10^(snr_db/10). Infinite SNR returns truth.
Spectrum observe(const Spectrum& truth, double snr_db, std::size_t n_avg, std::uint64_t seed);

enum class Observable { transfer_function, impedance };

/// Observation through `sounder`; `stream` selects an independent noise sequence.
Spectrum observe(const Spectrum& truth, const NoisySounder& sounder, Observable what, std::uint64_t stream);

enum class WindowKind { none, raised_cosine, hann };

struct Window {
    WindowKind kind = WindowKind::raised_cosine;
    double rolloff = 1.0;

    Eigen::VectorXd weights(std::size_t n) const;
    std::string describe() const;
};

WindowKind window_kind_from_string(const std::string& s);
std::string to_string(WindowKind k);

/// Magnitude of the time-domain response |h|.
struct ImpulseResponse {
    double t_step = 0.0;
    Eigen::VectorXd magnitude;
    /// Samples per original (unpadded) sample; index stride*m sits on the unpadded grid.
    std::size_t stride = 1;

    std::size_t size() const { return static_cast<std::size_t>(magnitude.size()); }
};

/// Inverse DFT of the windowed spectrum followed by pad_factor * n_bins zeros.
///
/// Normalized by 1/n_bins, so samples at multiples of (1 + pad_factor) equal
/// those of the unpadded transform and t_step = 1 / ((1 + pad_factor) n_bins f_step).
ImpulseResponse impulse_response(const Spectrum& h, std::size_t pad_factor, const Window& window = {});

} // namespace plkey
