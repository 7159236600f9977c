// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------
//
// Time-domain symmetry technique: a binary key from the positions of the
// impulse-response peaks. Reciprocal channels share path delays in both
// directions even when the amplitudes differ.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "plkey/sounding.hpp"

namespace plkey {

struct PeakSet {
    std::vector<std::size_t> indices; // strictly increasing
    double t_step = 0.0;
};

struct BinaryKey {
    std::vector<std::uint8_t> bits;

    std::size_t size() const { return bits.size(); }
    std::size_t popcount() const;
    std::string str() const;
    friend bool operator==(const BinaryKey&, const BinaryKey&) = default;
};

/// How the first and last samples see their outer neighbour.
enum class PeakBoundary {
    interior, // end samples are never peaks
    circular, // the trace wraps, as an inverse DFT does
};

/// Sample i is a peak iff |h[i]|^2 > |h[i-1]|^2, |h[i]|^2 >= |h[i+1]|^2 and
/// |h[i]|^2 >= gamma * max |h|^2.
PeakSet detect_peaks(std::span<const double> trace, double t_step, double gamma,
                     PeakBoundary boundary = PeakBoundary::interior);
PeakSet detect_peaks(const ImpulseResponse& h, double gamma, PeakBoundary boundary = PeakBoundary::interior);

/// Bit b is set iff some peak index lies in [b*eps, (b+1)*eps).
BinaryKey blockize(const PeakSet& peaks, std::size_t epsilon_samples, std::size_t n_blocks);

/// Clears every one after the m-th.
BinaryKey limit_first_m(const BinaryKey& key, std::size_t m);

struct TdstConfig {
    std::size_t pad_factor = 4;
    double gamma = 0.01;
    std::size_t epsilon_samples = 3; // block width on the interpolated grid
    std::size_t n_blocks = 200;
    std::size_t m = 5;
    Window window{};

    void validate() const;
};

/// impulse_response -> detect_peaks (circular) -> blockize -> limit_first_m.
BinaryKey tdst_key(const Spectrum& h_observed, const TdstConfig& cfg);

/// Peaks of the trace produced by the tdst_key front end, before blockization.
PeakSet tdst_peaks(const Spectrum& h_observed, const TdstConfig& cfg);

/// Fraction of the strongest min(cfg.m, |peaks(h1)|) peaks of h1 that have a
/// peak of h2 within +-tol_samples. Returns 1 when h1 has no peaks.
double peak_support_coincidence(const Spectrum& h1, const Spectrum& h2, const TdstConfig& cfg,
                                std::size_t tol_samples);

} // namespace plkey
