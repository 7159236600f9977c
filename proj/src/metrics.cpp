// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include "plkey/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace plkey {

namespace {

template <typename Group, typename GetX, typename GetY>
std::complex<double> grouped_correlation(const std::vector<Group>& ensemble, std::size_t l, std::size_t m,
                                         PairSet pairs, GetX get_x, GetY get_y)
{
    std::complex<double> cross(0.0, 0.0);
    double ex = 0.0, ey = 0.0;
    std::size_t n_pairs = 0, n_single = 0;
    for (const auto& group : ensemble) {
        for (std::size_t i = 0; i < group.size(); ++i) {
            const std::complex<double> xi = get_x(group[i], l);
            const std::complex<double> yi = get_y(group[i], m);
            ex += std::norm(xi);
            ey += std::norm(yi);
            ++n_single;
            for (std::size_t j = 0; j < group.size(); ++j) {
                if (pairs == PairSet::distinct && i == j)
                    continue;
                cross += xi * std::conj(get_y(group[j], m));
                ++n_pairs;
            }
        }
    }
    if (n_single == 0 || n_pairs == 0)
        throw InvalidArgument("correlation: ensemble has no admissible pairs");
    ex /= static_cast<double>(n_single);
    ey /= static_cast<double>(n_single);
    if (!(ex > 0.0) || !(ey > 0.0))
        throw InvalidArgument("correlation: zero-energy ensemble");
    return cross / static_cast<double>(n_pairs) / std::sqrt(ex * ey);
}

void check_bins(std::size_t n, std::size_t l, std::size_t m)
{
    if (l >= n || m >= n)
        throw InvalidArgument("correlation: bin index out of range");
}

} // namespace

std::complex<double> space_freq_correlation(const CtfEnsemble& ensemble, std::size_t l, std::size_t m,
                                            PairSet pairs)
{
    for (const auto& g : ensemble)
        for (const auto& h : g)
            check_bins(h.size(), l, m);
    auto at = [](const Spectrum& s, std::size_t k) { return s[k]; };
    return grouped_correlation(ensemble, l, m, pairs, at, at);
}

std::complex<double> zin_ctf_correlation(const ZinCtfEnsemble& ensemble, std::size_t l, std::size_t m,
                                         PairSet pairs)
{
    for (const auto& g : ensemble)
        for (const auto& r : g) {
            require_same_grid(r.zin, r.h);
            check_bins(r.h.size(), l, m);
        }
    return grouped_correlation(
        ensemble, l, m, pairs, [](const ZinCtfRecord& r, std::size_t k) { return r.zin[k]; },
        [](const ZinCtfRecord& r, std::size_t k) { return r.h[k]; });
}

double key_distance(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b)
{
    if (a.size() != b.size())
        throw InvalidArgument("key_distance: keys differ in length");
    if (a.empty())
        return 0.0;
    const std::uint32_t peak = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
    if (peak == 0)
        return 0.0; // both all-zero, hence identical
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
    return sum / static_cast<double>(peak);
}

double key_distance(const BinaryKey& a, const BinaryKey& b)
{
    const std::vector<std::uint32_t> x(a.bits.begin(), a.bits.end());
    const std::vector<std::uint32_t> y(b.bits.begin(), b.bits.end());
    return key_distance(x, y);
}

double key_distance(const SymbolKey& a, const SymbolKey& b)
{
    if (a.mask != b.mask)
        throw InvalidArgument("key_distance: key masks differ");
    return key_distance(a.valid_symbols(), b.valid_symbols());
}

namespace {

double plugin_entropy(const std::map<std::uint32_t, std::size_t>& counts, std::size_t total)
{
    double h = 0.0;
    for (const auto& [symbol, count] : counts) {
        const double p = static_cast<double>(count) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

template <typename Key, typename Get>
double positional_entropy(std::span<const Key> keys, std::size_t length, Get get)
{
    if (keys.empty())
        throw InvalidArgument("key_entropy: empty ensemble");
    if (length == 0)
        return 0.0;
    double total = 0.0;
    for (std::size_t pos = 0; pos < length; ++pos) {
        std::map<std::uint32_t, std::size_t> counts;
        for (const auto& k : keys)
            ++counts[get(k, pos)];
        total += plugin_entropy(counts, keys.size());
    }
    return total / static_cast<double>(length);
}

} // namespace

double key_entropy(std::span<const BinaryKey> keys)
{
    const std::size_t n = keys.empty() ? 0 : keys.front().size();
    for (const auto& k : keys)
        if (k.size() != n)
            throw InvalidArgument("key_entropy: keys differ in length");
    return positional_entropy(keys, n, [](const BinaryKey& k, std::size_t p) { return std::uint32_t{k.bits[p]}; });
}

double key_entropy(std::span<const SymbolKey> keys)
{
    const std::size_t n = keys.empty() ? 0 : keys.front().size();
    for (const auto& k : keys)
        if (k.size() != n)
            throw InvalidArgument("key_entropy: keys differ in length");
    return positional_entropy(keys, n, [](const SymbolKey& k, std::size_t p) { return k.symbols[p]; });
}

double symbol_entropy(std::span<const std::uint32_t> symbols)
{
    if (symbols.empty())
        return 0.0;
    std::map<std::uint32_t, std::size_t> counts;
    for (auto s : symbols)
        ++counts[s];
    return plugin_entropy(counts, symbols.size());
}

} // namespace plkey
