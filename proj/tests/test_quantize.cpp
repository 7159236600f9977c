// SPDX-License-Identifier: Apache-2.0
// plkey: reciprocal power-line channel key generation
// ------------------------------------------------------------------------

#include <doctest.h>

#include <bit>

#include "helpers.hpp"
#include "plkey/quantize.hpp"

using namespace plkey;
using namespace plkey::test;

namespace {

Spectrum real_spectrum(std::vector<double> v)
{
    Spectrum::Vector x(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        x[static_cast<Eigen::Index>(i)] = v[i];
    return {small_grid(v.size()), x};
}

SymbolKey symbols(std::vector<std::uint32_t> s, unsigned nbits)
{
    SymbolKey k;
    k.nbits = nbits;
    k.mask.assign(s.size(), 1);
    k.symbols = std::move(s);
    return k;
}

using U = std::vector<std::uint32_t>;

} // namespace

TEST_SUITE("quantize")
{
    TEST_CASE("uniform levels")
    {
        CHECK(quantize_levels(real_spectrum({0.0, 0.5, 1.0}), 2).symbols == U{0, 2, 3});
        CHECK(quantize_levels(real_spectrum({0.0, 0.5, 1.0}), 1).symbols == U{0, 1, 1});
        CHECK(quantize_levels(real_spectrum({0.2, 0.4, 0.6, 0.8}), 3).symbols == U{2, 4, 5, 7});
        CHECK(quantize_levels(real_spectrum({3.0, 3.0}), 4).symbols == U{15, 15});
        CHECK(quantize_levels(real_spectrum({0.0, 0.0}), 4).symbols == U{0, 0});

        // magnitude only
        Spectrum::Vector v(3);
        v << cd(0, 1), cd(-0.5, 0), cd(0.6, 0.8);
        CHECK(quantize_levels(Spectrum(small_grid(3), v), 2).symbols == U{3, 2, 3});

        SUBCASE("scale invariance")
        {
            Rng rng(2);
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> x(50);
                for (auto& e : x)
                    e = rng.uniform(0.0, 1.0);
                const Spectrum s = real_spectrum(x);
                const Spectrum scaled(s.grid(), s.values() * 37.5);
                CHECK(quantize_levels(s, 5) == quantize_levels(scaled, 5));
                CHECK(lsb_value(scaled, 5) == doctest::Approx(37.5 * lsb_value(s, 5)));
            }
        }

        SUBCASE("masks")
        {
            const std::vector<std::uint8_t> m{1, 0, 1, 1};
            const SymbolKey k = quantize_levels(real_spectrum({0.5, 9.0, 1.0, 0.0}), 2, m);
            CHECK(k.symbols == U{2, 0, 3, 0});
            CHECK(k.mask == m);
            CHECK(k.valid_symbols() == U{2, 3, 0});
            CHECK(lsb_value(real_spectrum({0.5, 9.0, 1.0, 0.0}), 2, m) == doctest::Approx(1.0 / 3.0));
            const std::vector<std::uint8_t> none(4, 0);
            CHECK_THROWS_AS(quantize_levels(real_spectrum({1, 2, 3, 4}), 2, none), InvalidArgument);
            const std::vector<std::uint8_t> short_mask{1, 1};
            CHECK_THROWS_AS(quantize_levels(real_spectrum({1, 2, 3, 4}), 2, short_mask), InvalidArgument);
        }

        CHECK_THROWS_AS(quantize_levels(real_spectrum({1.0}), 0), InvalidArgument);
        CHECK_THROWS_AS(quantize_levels(real_spectrum({1.0}), 17), InvalidArgument);
    }

    TEST_CASE("gray code")
    {
        CHECK(gray(5) == 7);
        CHECK(gray(0) == 0);
        CHECK(gray(1) == 1);
        CHECK(gray(2) == 3);
        CHECK(gray(3) == 2);
        for (std::uint32_t s = 0; s < (1u << 12); ++s) {
            CHECK(gray_inverse(gray(s)) == s);
            CHECK(std::popcount(gray(s) ^ gray(s + 1)) == 1);
        }

        const BinaryKey b = gray_encode(symbols({5, 0, 3}, 3));
        CHECK(b.str() == "111000010");
        CHECK(gray_decode(b, 3) == symbols({5, 0, 3}, 3));

        SymbolKey masked = symbols({5, 6, 3}, 3);
        masked.mask[1] = 0;
        CHECK(gray_encode(masked).str() == "111010");

        Rng rng(8);
        for (unsigned n = 1; n <= 10; ++n) {
            U s(40);
            for (auto& x : s)
                x = static_cast<std::uint32_t>(rng.index(std::size_t{1} << n));
            const SymbolKey k = symbols(s, n);
            CHECK(gray_decode(gray_encode(k), n) == k);
        }
        CHECK_THROWS_AS(gray_decode(b, 2), InvalidArgument);
    }

    TEST_CASE("lsb symbol")
    {
        // full-scale spectrum: max |csi| = full_scale
        CHECK(lsb_symbol(1.0 / 3.0, 2) == 3);
        CHECK(lsb_symbol(1.0 / 9.0, 2) == 1);
        CHECK(lsb_symbol(2.0 / 9.0, 2) == 2);
        CHECK(lsb_symbol(1e-9, 2) == 0);
        CHECK(lsb_symbol(5.0, 2) == 3);
        CHECK(lsb_symbol(2.0 / 3.0, 2, 2.0) == 3);
        CHECK(lsb_symbol(1.0 / 15.0 / 2.0, 4) == 8);
        CHECK_THROWS_AS(lsb_symbol(0.0, 2), InvalidArgument);
        CHECK_THROWS_AS(lsb_symbol(0.1, 2, 0.0), InvalidArgument);
    }

    TEST_CASE("coded arrangement")
    {
        // s_last = 1 leaves the symbols untouched
        const SymbolKey k = symbols({2, 3, 1}, 2);
        const SymbolKey one = coded_arrange(k, 1.0 / 9.0);
        CHECK(one.symbols == U{2, 3, 1, 1});
        CHECK(one.mask == std::vector<std::uint8_t>{1, 1, 1, 1});

        CHECK(coded_arrange(symbols({2, 3}, 2), 2.0 / 9.0).symbols == U{0, 2, 2});
        CHECK(coded_arrange(symbols({1, 2, 3}, 2), 1.0 / 3.0).symbols == U{3, 2, 1, 3});

        SymbolKey masked = symbols({2, 3}, 2);
        masked.mask[0] = 0;
        const SymbolKey cm = coded_arrange(masked, 2.0 / 9.0);
        CHECK(cm.symbols == U{2, 2, 2});
        CHECK(cm.mask == std::vector<std::uint8_t>{0, 1, 1});

        SUBCASE("amplitude scaling changes the key")
        {
            const Spectrum s = real_spectrum({0.05, 0.1, 0.2, 0.4});
            const Spectrum s2(s.grid(), s.values() * 2.0);
            const SymbolKey q1 = quantize_levels(s, 3), q2 = quantize_levels(s2, 3);
            CHECK(q1 == q2);
            const SymbolKey c1 = coded_arrange(q1, lsb_value(s, 3));
            const SymbolKey c2 = coded_arrange(q2, lsb_value(s2, 3));
            CHECK(c1.symbols.back() == 3);
            CHECK(c2.symbols.back() == 6);
            CHECK_FALSE(c1 == c2);
        }
    }
}
