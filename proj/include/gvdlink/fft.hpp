// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gvdlink {

using cplx = std::complex<double>;

/// Complex FFT of fixed length. Power-of-two lengths run an iterative
/// radix-2 kernel; other lengths go through Bluestein's chirp-z embedding.
/// All arithmetic is fixed-order, so transforms are reproducible bit for
/// bit across runs and thread counts. A const plan is safe to share
/// between threads.
class Fft {
public:
    explicit Fft(std::size_t n);

    std::size_t size() const noexcept { return n_; }

    void forward(cplx* data) const;
    /// Inverse transform, scaled by 1/n.
    void inverse(cplx* data) const;

    static bool is_power_of_two(std::size_t n) noexcept {
        return n != 0 && (n & (n - 1)) == 0;
    }
    static std::size_t next_power_of_two(std::size_t n) noexcept;

private:
    void radix2(cplx* data, std::size_t n, const std::vector<cplx>& twiddle,
                const std::vector<std::size_t>& bitrev) const;

    std::size_t n_;
    // radix-2 tables for n_ (when pow2) and for the Bluestein length m_
    std::vector<cplx> twiddle_;
    std::vector<std::size_t> bitrev_;
    // Bluestein state (empty when n_ is a power of two)
    std::size_t m_ = 0;
    std::vector<cplx> chirp_;     // exp(-i pi j^2 / n), j = 0..n-1
    std::vector<cplx> chirp_fft_; // FFT of the embedded conjugate chirp
};

} // namespace gvdlink
