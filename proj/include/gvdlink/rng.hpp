// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gvdlink {

/// Counter-based pseudo-random generator: the i-th output is the SplitMix64
/// finalizer applied to key + i * golden-gamma. Streams are fully defined by
/// a 64-bit key, so parallel consumers derive independent substreams with
/// `substream_key` and reproduce runs bit for bit regardless of scheduling.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t finalize(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Key for a named substream of `key`. Documented mixing: finalize the
    /// parent key xored with the tag times golden-gamma.
    static std::uint64_t substream_key(std::uint64_t key, std::uint64_t tag) noexcept {
        return finalize(key ^ ((tag + 1) * golden));
    }

    std::uint64_t next_u64() noexcept { return finalize(key_ + (++counter_) * golden); }

    /// Uniform double in (0, 1]; never returns 0, so log() is safe.
    double next_uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// One data bit. Consumes one 64-bit word per 64 bits.
    unsigned next_bit() noexcept {
        if (bit_fill_ == 0) {
            bit_buffer_ = next_u64();
            bit_fill_ = 64;
        }
        const unsigned b = static_cast<unsigned>(bit_buffer_ & 1u);
        bit_buffer_ >>= 1;
        --bit_fill_;
        return b;
    }

    /// Standard normal via Box-Muller; fixed consumption of two uniforms
    /// per pair keeps streams reproducible.
    double next_normal() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::uint64_t bit_buffer_ = 0;
    unsigned bit_fill_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace gvdlink
