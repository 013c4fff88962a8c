// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "gvdlink/qam.hpp"
#include "gvdlink/rng.hpp"

using namespace gvdlink;

TEST_CASE("4-QAM maps 00 to exp(j pi/4)")
{
    const auto c = Constellation::square(4);
    const auto s = c.modulate({0, 0});
    REQUIRE(s.size() == 1);
    CHECK(s[0].real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(s[0].imag() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("4-QAM quadrant cycle 00 01 11 10")
{
    const auto c = Constellation::square(4);
    const auto s = c.modulate({0, 0, 0, 1, 1, 1, 1, 0});
    REQUIRE(s.size() == 4);
    CHECK((s[0].real() > 0 && s[0].imag() > 0)); // Q1
    CHECK((s[1].real() < 0 && s[1].imag() > 0)); // Q2
    CHECK((s[2].real() < 0 && s[2].imag() < 0)); // Q3
    CHECK((s[3].real() > 0 && s[3].imag() < 0)); // Q4
}

TEST_CASE("4-QAM symbols are unit modulus")
{
    const auto c = Constellation::square(4);
    CounterRng rng(31);
    std::vector<std::uint8_t> bits;
    for (int i = 0; i < 8; ++i)
        bits.push_back(static_cast<std::uint8_t>(rng.next_bit()));
    const auto s = c.modulate(bits);
    REQUIRE(s.size() == 4);
    for (const auto& v : s)
        CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("modulate-decide round trip over all 16-bit patterns")
{
    const auto c = Constellation::square(4);
    for (unsigned pattern = 0; pattern < (1u << 16); ++pattern) {
        std::vector<std::uint8_t> bits(16);
        for (int b = 0; b < 16; ++b)
            bits[static_cast<std::size_t>(b)] =
                static_cast<std::uint8_t>((pattern >> (15 - b)) & 1u);
        const auto symbols = c.modulate(bits);
        std::vector<std::uint8_t> decoded;
        for (const auto& s : symbols)
            c.append_bits(c.decide(s), decoded);
        REQUIRE(decoded == bits);
    }
}

TEST_CASE("decision regions")
{
    const auto c = Constellation::square(4);
    const auto q1 = c.decide(cplx{0.3, 0.9});
    CHECK(c.point(q1).real() > 0);
    CHECK(c.point(q1).imag() > 0);

    const auto q3 = c.decide(cplx{-1e-12, -1e-12});
    CHECK(c.point(q3).real() < 0);
    CHECK(c.point(q3).imag() < 0);

    // exact boundary resolves toward the positive half-plane
    const auto tie = c.decide(cplx{0.0, 0.0});
    CHECK(c.point(tie).real() > 0);
    CHECK(c.point(tie).imag() > 0);
}

TEST_CASE("bit count must fit the symbol size")
{
    const auto c = Constellation::square(4);
    CHECK_THROWS_AS((void)c.modulate({1, 0, 1}), DomainError);
}

TEST_CASE("16-QAM energy normalization and gray adjacency")
{
    const auto c = Constellation::square(16);
    double energy = 0.0;
    for (const auto& p : c.points())
        energy += std::norm(p);
    CHECK(energy / 16.0 == doctest::Approx(1.0).epsilon(1e-14));

    // round trip through the decision slicer
    for (unsigned i = 0; i < 16; ++i)
        CHECK(c.decide(c.point(i)) == i);

    // horizontally adjacent points differ in exactly one bit
    const double step = 2.0 / std::sqrt(10.0);
    int checked = 0;
    for (unsigned i = 0; i < 16; ++i)
        for (unsigned j = 0; j < 16; ++j) {
            const cplx d = c.point(i) - c.point(j);
            if (std::abs(d.imag()) < 1e-12 && std::abs(std::abs(d.real()) - step) < 1e-12) {
                const unsigned x = i ^ j;
                CHECK(__builtin_popcount(x) == 1);
                ++checked;
            }
        }
    CHECK(checked > 0);
}
