// SPDX-License-Identifier: Apache-2.0

#include "gvdlink/qam.hpp"

#include <algorithm>
#include <cmath>

namespace gvdlink {

namespace {

unsigned gray_encode(unsigned b) noexcept { return b ^ (b >> 1); }

unsigned gray_decode(unsigned g) noexcept {
    unsigned b = 0;
    for (; g; g >>= 1)
        b ^= g;
    return b;
}

bool is_power_of_four(unsigned m) noexcept {
    if (m < 4)
        return false;
    while (m > 1) {
        if (m % 4 != 0)
            return false;
        m /= 4;
    }
    return true;
}

} // namespace

Constellation Constellation::square(unsigned order)
{
    if (!is_power_of_four(order) || order > (1u << 20))
        throw DomainError("constellation order must be a power of 4 in [4, 2^20]");

    Constellation c;
    c.order_ = order;
    c.bits_per_symbol_ = 0;
    for (unsigned m = order; m > 1; m >>= 1)
        ++c.bits_per_symbol_;
    c.levels_per_axis_ = 1u << (c.bits_per_symbol_ / 2);
    c.points_.resize(order);

    if (order == 4) {
        // 00->Q1, 01->Q2, 11->Q3, 10->Q4; all points unit modulus.
        const double s = std::sqrt(0.5);
        c.axis_scale_ = s;
        c.points_[0] = {+s, +s};
        c.points_[1] = {-s, +s};
        c.points_[2] = {+s, -s};
        c.points_[3] = {-s, -s};
        return c;
    }

    const unsigned levels = c.levels_per_axis_;
    const double mean_energy = 2.0 * (static_cast<double>(levels) * levels - 1.0) / 3.0;
    const double scale = 1.0 / std::sqrt(mean_energy);
    c.axis_scale_ = scale;
    const unsigned axis_bits = c.bits_per_symbol_ / 2;
    for (unsigned idx = 0; idx < order; ++idx) {
        const unsigned vi = idx >> axis_bits;
        const unsigned vq = idx & (levels - 1);
        const double ai = 2.0 * gray_decode(vi) - (levels - 1.0);
        const double aq = 2.0 * gray_decode(vq) - (levels - 1.0);
        c.points_[idx] = {scale * ai, scale * aq};
    }
    return c;
}

std::vector<cplx> Constellation::modulate(const std::vector<std::uint8_t>& bits) const
{
    if (bits.size() % bits_per_symbol_ != 0)
        throw DomainError("bit count must be a multiple of bits per symbol");
    std::vector<cplx> symbols;
    symbols.reserve(bits.size() / bits_per_symbol_);
    for (std::size_t i = 0; i < bits.size(); i += bits_per_symbol_) {
        unsigned v = 0;
        for (unsigned b = 0; b < bits_per_symbol_; ++b)
            v = (v << 1) | (bits[i + b] & 1u);
        symbols.push_back(points_[v]);
    }
    return symbols;
}

unsigned Constellation::decide(cplx y) const
{
    if (order_ == 4) {
        const unsigned b_im = y.imag() >= 0.0 ? 0u : 1u; // first bit: sign of Im
        const unsigned b_re = y.real() >= 0.0 ? 0u : 1u; // second bit: sign of Re
        return (b_im << 1) | b_re;
    }
    const unsigned levels = levels_per_axis_;
    const unsigned axis_bits = bits_per_symbol_ / 2;
    auto slice = [&](double u) -> unsigned {
        // nearest odd-integer level; exact midpoints resolve upward
        const double pos = std::floor((u / axis_scale_ + (levels - 1.0)) / 2.0 + 0.5);
        const long p = std::clamp(static_cast<long>(pos), 0L, static_cast<long>(levels) - 1L);
        return static_cast<unsigned>(p);
    };
    const unsigned vi = gray_encode(slice(y.real()));
    const unsigned vq = gray_encode(slice(y.imag()));
    return (vi << axis_bits) | vq;
}

void Constellation::append_bits(unsigned index, std::vector<std::uint8_t>& out) const
{
    for (unsigned b = bits_per_symbol_; b-- > 0;)
        out.push_back(static_cast<std::uint8_t>((index >> b) & 1u));
}

} // namespace gvdlink
