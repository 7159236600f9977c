// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include "plkey/quantize.hpp"

#include <algorithm>
#include <cmath>

namespace plkey {

namespace {

void check_nbits(unsigned nbits)
{
    if (nbits < 1 || nbits > 16)
        throw InvalidArgument("nbits must lie in [1, 16]");
}

bool is_valid(std::span<const std::uint8_t> mask, std::size_t k)
{
    return mask.empty() || mask[k] != 0;
}

double max_valid_magnitude(const Spectrum& csi, std::span<const std::uint8_t> mask)
{
    if (!mask.empty() && mask.size() != csi.size())
        throw InvalidArgument("quantizer: mask length does not match spectrum");
    double peak = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < csi.size(); ++k) {
        if (!is_valid(mask, k))
            continue;
        any = true;
        peak = std::max(peak, std::abs(csi[k]));
    }
    if (!any)
        throw InvalidArgument("quantizer: every bin is masked");
    return peak;
}

} // namespace

std::vector<std::uint32_t> SymbolKey::valid_symbols() const
{
    std::vector<std::uint32_t> out;
    for (std::size_t k = 0; k < symbols.size(); ++k)
        if (mask[k])
            out.push_back(symbols[k]);
    return out;
}

SymbolKey quantize_levels(const Spectrum& csi, unsigned nbits, std::span<const std::uint8_t> mask)
{
    check_nbits(nbits);
    const double peak = max_valid_magnitude(csi, mask);
    const double top = static_cast<double>((1u << nbits) - 1);

    SymbolKey key;
    key.nbits = nbits;
    key.symbols.assign(csi.size(), 0);
    key.mask.assign(csi.size(), 0);
    for (std::size_t k = 0; k < csi.size(); ++k) {
        if (!is_valid(mask, k))
            continue;
        key.mask[k] = 1;
        // all-zero spectrum: every level is 0
        const double level = peak > 0.0 ? std::round(std::abs(csi[k]) / peak * top) : 0.0;
        key.symbols[k] = static_cast<std::uint32_t>(std::clamp(level, 0.0, top));
    }
    return key;
}

double lsb_value(const Spectrum& csi, unsigned nbits, std::span<const std::uint8_t> mask)
{
    check_nbits(nbits);
    return max_valid_magnitude(csi, mask) / static_cast<double>((1u << nbits) - 1);
}

std::uint32_t gray(std::uint32_t s)
{
    return s ^ (s >> 1);
}

std::uint32_t gray_inverse(std::uint32_t g)
{
    std::uint32_t s = g;
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1)
        s ^= s >> shift;
    return s;
}

BinaryKey gray_encode(const SymbolKey& key)
{
    check_nbits(key.nbits);
    BinaryKey out;
    out.bits.reserve(key.size() * key.nbits);
    for (std::size_t k = 0; k < key.size(); ++k) {
        if (!key.mask[k])
            continue;
        const std::uint32_t g = gray(key.symbols[k]);
        for (unsigned b = key.nbits; b-- > 0;)
            out.bits.push_back(static_cast<std::uint8_t>((g >> b) & 1u));
    }
    return out;
}

SymbolKey gray_decode(const BinaryKey& bits, unsigned nbits)
{
    check_nbits(nbits);
    if (bits.size() % nbits != 0)
        throw InvalidArgument("gray_decode: bit count is not a multiple of nbits");
    SymbolKey key;
    key.nbits = nbits;
    for (std::size_t i = 0; i < bits.size(); i += nbits) {
        std::uint32_t g = 0;
        for (unsigned b = 0; b < nbits; ++b)
            g = (g << 1) | (bits.bits[i + b] & 1u);
        key.symbols.push_back(gray_inverse(g));
        key.mask.push_back(1);
    }
    return key;
}

std::uint32_t lsb_symbol(double lsb, unsigned nbits, double full_scale)
{
    check_nbits(nbits);
    if (!(lsb > 0.0) || !(full_scale > 0.0))
        throw InvalidArgument("lsb_symbol: lsb and full scale must be positive");
    const double top = static_cast<double>((1u << nbits) - 1);
    const double max_lsb = full_scale / top;
    return static_cast<std::uint32_t>(std::clamp(std::round(lsb / max_lsb * top), 0.0, top));
}

SymbolKey coded_arrange(const SymbolKey& key, double lsb, double full_scale)
{
    const std::uint32_t s_last = lsb_symbol(lsb, key.nbits, full_scale);
    const std::uint64_t modulus = std::uint64_t{1} << key.nbits;
    SymbolKey out = key;
    for (std::size_t k = 0; k < out.size(); ++k)
        if (out.mask[k])
            out.symbols[k] = static_cast<std::uint32_t>((std::uint64_t{out.symbols[k]} * s_last) % modulus);
    out.symbols.push_back(s_last);
    out.mask.push_back(1);
    return out;
}

} // namespace plkey
