// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace plkey {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Two spectra (or channels) combined in one expression live on different grids.
class GridMismatch : public Error {
public:
    GridMismatch() : Error("frequency grids differ") {}
};

/// A divisor fell below the near-zero threshold at some bin.
class DegenerateDenominator : public Error {
public:
    DegenerateDenominator(const std::string& what, std::size_t bin)
        : Error(what + ": near-zero denominator at bin " + std::to_string(bin)), bin_(bin) {}
    std::size_t bin() const noexcept { return bin_; }

private:
    std::size_t bin_;
};

class ReciprocityViolation : public Error {
public:
    ReciprocityViolation(std::size_t bin, double err)
        : Error("reciprocity violated at bin " + std::to_string(bin) + " (|AD-BC-1| = " +
                std::to_string(err) + ")"),
          bin_(bin) {}
    std::size_t bin() const noexcept { return bin_; }

private:
    std::size_t bin_;
};

} // namespace plkey
