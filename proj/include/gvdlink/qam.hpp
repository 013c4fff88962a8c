// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "gvdlink/errors.hpp"

namespace gvdlink {

using cplx = std::complex<double>;

/// Square m-QAM alphabet, unit mean symbol energy, Gray-coded.
///
/// 4-QAM uses the fixed bit-to-quadrant map 00->Q1, 01->Q2, 11->Q3, 10->Q4
/// with points exp(j*pi/4) etc., so the first bit of a pair selects the
/// sign of Im and the second the sign of Re. Higher orders use per-axis
/// Gray-coded PAM levels.
class Constellation {
public:
    static Constellation square(unsigned order);

    unsigned order() const noexcept { return order_; }
    unsigned bits_per_symbol() const noexcept { return bits_per_symbol_; }
    const std::vector<cplx>& points() const noexcept { return points_; }
    const cplx& point(unsigned index) const { return points_.at(index); }

    /// Gray-map a bit sequence (values 0/1) onto symbols.
    /// Throws DomainError unless bits.size() is a multiple of bits_per_symbol.
    std::vector<cplx> modulate(const std::vector<std::uint8_t>& bits) const;

    /// Nearest-region decision. Exact boundary values resolve toward the
    /// positive half-plane. Returns the symbol index.
    unsigned decide(cplx y) const;

    /// Bits (MSB first) for a symbol index, appended to `out`.
    void append_bits(unsigned index, std::vector<std::uint8_t>& out) const;

private:
    Constellation() = default;

    unsigned order_ = 0;
    unsigned bits_per_symbol_ = 0;
    unsigned levels_per_axis_ = 0;
    double axis_scale_ = 1.0;
    std::vector<cplx> points_;
};

} // namespace gvdlink
