// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include "plkey/tdst.hpp"

#include <algorithm>
#include <cmath>

namespace plkey {

std::size_t BinaryKey::popcount() const
{
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::string BinaryKey::str() const
{
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits)
        s.push_back(b ? '1' : '0');
    return s;
}

PeakSet detect_peaks(std::span<const double> trace, double t_step, double gamma, PeakBoundary boundary)
{
    if (trace.empty())
        throw InvalidArgument("detect_peaks: empty trace");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw InvalidArgument("detect_peaks: gamma must lie in (0, 1)");

    const std::size_t n = trace.size();
    std::vector<double> energy(n);
    for (std::size_t i = 0; i < n; ++i)
        energy[i] = trace[i] * trace[i];
    const double floor = gamma * *std::max_element(energy.begin(), energy.end());

    PeakSet out;
    out.t_step = t_step;
    if (n < 3 && boundary == PeakBoundary::interior)
        return out;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t prev, next;
        if (i == 0 || i + 1 == n) {
            if (boundary == PeakBoundary::interior || n < 3)
                continue;
            prev = (i + n - 1) % n;
            next = (i + 1) % n;
        } else {
            prev = i - 1;
            next = i + 1;
        }
        // strict rise, non-strict fall: a plateau resolves to its first sample
        if (energy[i] > energy[prev] && energy[i] >= energy[next] && energy[i] >= floor)
            out.indices.push_back(i);
    }
    return out;
}

PeakSet detect_peaks(const ImpulseResponse& h, double gamma, PeakBoundary boundary)
{
    return detect_peaks(std::span<const double>(h.magnitude.data(), h.size()), h.t_step, gamma, boundary);
}

BinaryKey blockize(const PeakSet& peaks, std::size_t epsilon_samples, std::size_t n_blocks)
{
    if (epsilon_samples < 1 || n_blocks < 1)
        throw InvalidArgument("blockize: epsilon and n_blocks must be at least 1");
    BinaryKey key;
    key.bits.assign(n_blocks, 0);
    for (std::size_t idx : peaks.indices) {
        const std::size_t block = idx / epsilon_samples;
        if (block < n_blocks)
            key.bits[block] = 1;
    }
    return key;
}

BinaryKey limit_first_m(const BinaryKey& key, std::size_t m)
{
    if (m < 1)
        throw InvalidArgument("limit_first_m: m must be at least 1");
    BinaryKey out = key;
    std::size_t ones = 0;
    for (auto& b : out.bits) {
        if (b) {
            if (ones >= m)
                b = 0;
            else
                ++ones;
        }
    }
    return out;
}

void TdstConfig::validate() const
{
    if (!(gamma > 0.0 && gamma < 1.0))
        throw InvalidArgument("TdstConfig: gamma must lie in (0, 1)");
    if (epsilon_samples < 1 || n_blocks < 1 || m < 1)
        throw InvalidArgument("TdstConfig: epsilon, n_blocks and m must be at least 1");
}

PeakSet tdst_peaks(const Spectrum& h_observed, const TdstConfig& cfg)
{
    cfg.validate();
    const ImpulseResponse ir = impulse_response(h_observed, cfg.pad_factor, cfg.window);
    return detect_peaks(ir, cfg.gamma, PeakBoundary::circular);
}

BinaryKey tdst_key(const Spectrum& h_observed, const TdstConfig& cfg)
{
    return limit_first_m(blockize(tdst_peaks(h_observed, cfg), cfg.epsilon_samples, cfg.n_blocks), cfg.m);
}

double peak_support_coincidence(const Spectrum& h1, const Spectrum& h2, const TdstConfig& cfg,
                                std::size_t tol_samples)
{
    require_same_grid(h1, h2);
    cfg.validate();
    const ImpulseResponse ir1 = impulse_response(h1, cfg.pad_factor, cfg.window);
    const ImpulseResponse ir2 = impulse_response(h2, cfg.pad_factor, cfg.window);
    PeakSet p1 = detect_peaks(ir1, cfg.gamma, PeakBoundary::circular);
    const PeakSet p2 = detect_peaks(ir2, cfg.gamma, PeakBoundary::circular);
    if (p1.indices.empty())
        return 1.0;

    std::stable_sort(p1.indices.begin(), p1.indices.end(), [&](std::size_t a, std::size_t b) {
        return ir1.magnitude[static_cast<Eigen::Index>(a)] > ir1.magnitude[static_cast<Eigen::Index>(b)];
    });
    const std::size_t top = std::min(cfg.m, p1.indices.size());
    const std::size_t n = ir1.size();
    std::size_t matched = 0;
    for (std::size_t i = 0; i < top; ++i) {
        const std::size_t a = p1.indices[i];
        const bool hit = std::any_of(p2.indices.begin(), p2.indices.end(), [&](std::size_t b) {
            const std::size_t d = a > b ? a - b : b - a;
            return std::min(d, n - d) <= tol_samples;
        });
        matched += hit ? 1 : 0;
    }
    return static_cast<double>(matched) / static_cast<double>(top);
}

} // namespace plkey
