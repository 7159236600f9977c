// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "plkey/spectrum.hpp"
#include "plkey/tdst.hpp"

namespace plkey {

/// Symbols over a 2^nbits-ary alphabet with a per-position validity mask.
struct SymbolKey {
    std::vector<std::uint32_t> symbols;
    std::vector<std::uint8_t> mask;
    unsigned nbits = 1;

    std::size_t size() const { return symbols.size(); }
    std::uint32_t alphabet() const { return 1u << nbits; }
    /// Valid positions only, in order.
    std::vector<std::uint32_t> valid_symbols() const;
    friend bool operator==(const SymbolKey&, const SymbolKey&) = default;
};

/// round(|csi| / max_valid |csi| * (2^nbits - 1)) per valid bin; masked bins
/// are emitted as 0 with mask = 0. An empty mask means every bin is valid.
SymbolKey quantize_levels(const Spectrum& csi, unsigned nbits, std::span<const std::uint8_t> mask = {});

/// Physical size of one quantization step, max_valid |csi| / (2^nbits - 1).
double lsb_value(const Spectrum& csi, unsigned nbits, std::span<const std::uint8_t> mask = {});

std::uint32_t gray(std::uint32_t s);
std::uint32_t gray_inverse(std::uint32_t g);

/// Gray code of every valid symbol, nbits each, most significant first.
BinaryKey gray_encode(const SymbolKey& key);
/// Inverse of gray_encode; every decoded position is valid.
SymbolKey gray_decode(const BinaryKey& bits, unsigned nbits);

/// Symbol carrying the LSB magnitude: the LSB measured in units of the largest
/// LSB a full-scale spectrum would produce, i.e. round(lsb * (2^n-1)^2 / full_scale),
/// clamped to the alphabet.
std::uint32_t lsb_symbol(double lsb, unsigned nbits, double full_scale = 1.0);

/// Every valid symbol becomes (k * s_last) mod 2^nbits; s_last is appended.
SymbolKey coded_arrange(const SymbolKey& key, double lsb, double full_scale = 1.0);

} // namespace plkey
