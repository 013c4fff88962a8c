// SPDX-License-Identifier: Apache-2.0

#include "gvdlink/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gvdlink {

namespace {

std::vector<std::size_t> make_bitrev(std::size_t n)
{
    std::vector<std::size_t> rev(n, 0);
    for (std::size_t i = 1; i < n; ++i)
        rev[i] = (rev[i >> 1] >> 1) | ((i & 1) ? n >> 1 : 0);
    return rev;
}

std::vector<cplx> make_twiddle(std::size_t n)
{
    // exp(-2 pi i k / n) for k = 0..n/2-1
    std::vector<cplx> tw(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        tw[k] = {std::cos(a), std::sin(a)};
    }
    return tw;
}

} // namespace

std::size_t Fft::next_power_of_two(std::size_t n) noexcept
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

Fft::Fft(std::size_t n) : n_(n)
{
    if (n == 0)
        throw std::invalid_argument("Fft: length must be positive");
    if (is_power_of_two(n)) {
        twiddle_ = make_twiddle(n);
        bitrev_ = make_bitrev(n);
        return;
    }
    // Bluestein: convolve with a chirp on a power-of-two length m >= 2n-1.
    m_ = next_power_of_two(2 * n - 1);
    twiddle_ = make_twiddle(m_);
    bitrev_ = make_bitrev(m_);
    chirp_.resize(n);
    const std::size_t mod = 2 * n; // j^2 mod 2n keeps the angle argument small
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t q = (j * j) % mod;
        const double a = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
        chirp_[j] = {std::cos(a), std::sin(a)};
    }
    std::vector<cplx> b(m_, cplx{0.0, 0.0});
    b[0] = std::conj(chirp_[0]);
    for (std::size_t j = 1; j < n; ++j) {
        b[j] = std::conj(chirp_[j]);
        b[m_ - j] = std::conj(chirp_[j]);
    }
    radix2(b.data(), m_, twiddle_, bitrev_);
    chirp_fft_ = std::move(b);
}

void Fft::radix2(cplx* data, std::size_t n, const std::vector<cplx>& twiddle,
                 const std::vector<std::size_t>& bitrev) const
{
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = bitrev[i];
        if (i < j)
            std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        const std::size_t half = len / 2;
        for (std::size_t blk = 0; blk < n; blk += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx w = twiddle[k * stride];
                const cplx u = data[blk + k];
                const cplx t = w * data[blk + k + half];
                data[blk + k] = u + t;
                data[blk + k + half] = u - t;
            }
        }
    }
}

void Fft::forward(cplx* data) const
{
    if (m_ == 0) {
        radix2(data, n_, twiddle_, bitrev_);
        return;
    }
    std::vector<cplx> a(m_, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < n_; ++j)
        a[j] = data[j] * chirp_[j];
    radix2(a.data(), m_, twiddle_, bitrev_);
    for (std::size_t j = 0; j < m_; ++j)
        a[j] *= chirp_fft_[j];
    // inverse transform of length m: conjugate trick
    for (auto& v : a)
        v = std::conj(v);
    radix2(a.data(), m_, twiddle_, bitrev_);
    const double inv_m = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k)
        data[k] = std::conj(a[k]) * inv_m * chirp_[k];
}

void Fft::inverse(cplx* data) const
{
    for (std::size_t i = 0; i < n_; ++i)
        data[i] = std::conj(data[i]);
    forward(data);
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i)
        data[i] = std::conj(data[i]) * inv_n;
}

} // namespace gvdlink
