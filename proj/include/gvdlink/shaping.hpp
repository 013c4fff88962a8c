// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <ostream>
#include <vector>

#include "gvdlink/channel.hpp"

namespace gvdlink {

enum class FilterSplit {
    matched_root_pair,     // root raised cosine at both ends (composite RC)
    single_raised_cosine,  // full raised cosine at one end only
};

struct PulseShapeSpec {
    double symbol_rate_bd = 0.0;
    double rolloff = 0.0;
    FilterSplit split = FilterSplit::matched_root_pair;

    double symbol_period_s() const { return 1.0 / symbol_rate_bd; }
    double occupied_bandwidth_hz() const { return (1.0 + rolloff) * symbol_rate_bd; }
    void validate() const;
};

/// Complex baseband impulse response on a uniform time lattice;
/// samples[i] is h((i - center_index) * time_step).
struct BasebandImpulseResponse {
    double time_step_s = 0.0;
    std::vector<cplx> samples;
    std::size_t center_index = 0;
};

/// The 2p complex symbol weights. Index 0..p-1 hold the weights of the
/// p preceding symbols (time offsets -p..-1 symbol periods), p..2p-1 the
/// following ones (+1..+p). The center tap is excluded and the weights are
/// normalized by it.
struct WeightVector {
    int span_p = 0;
    std::vector<cplx> weights;

    int offset_of(std::size_t index) const {
        const int i = static_cast<int>(index);
        return i < span_p ? i - span_p : i - span_p + 1;
    }
    double max_magnitude() const;
};

/// Raised-cosine magnitude response (zero phase) centered at `center_hz`.
/// matched_root_pair returns the root response for one side of the link.
ChannelTransferFunction raised_cosine_response(const PulseShapeSpec& spec,
                                               const FrequencyGrid& grid, double center_hz);

/// Inverse transform of atmosphere*tx*rx, frequency shifted so the carrier
/// maps to 0 Hz. All three must share one grid, and the carrier must
/// coincide with a grid bin. time_step = 1 / grid span.
BasebandImpulseResponse composite_impulse_response(const ChannelTransferFunction& atmosphere,
                                                   const ChannelTransferFunction& tx_filter,
                                                   const ChannelTransferFunction& rx_filter,
                                                   double carrier_hz);

/// Sample h at symbol-period multiples around the |h| peak (parabolic-
/// refinement sub-sample alignment, band-limited interpolation) and
/// normalize by the center tap.
WeightVector extract_weights(const BasebandImpulseResponse& h, const PulseShapeSpec& spec, int p);

/// CSV export `time_s,real,imag`; when normalize is set the samples are
/// divided by the complex peak sample.
void export_impulse_response(const BasebandImpulseResponse& h, std::ostream& out,
                             bool normalize = true);

// ---------------------------------------------------------------------------
// Band-limited evaluation machinery, shared with the Monte Carlo receiver so
// both paths align symbol timing identically.
// ---------------------------------------------------------------------------

/// Evaluates e(t) = sum_k c_k exp(j 2 pi f_k t) from a sparse list of
/// spectral bins (near-zero bins dropped).
class SpectralInterpolator {
public:
    SpectralInterpolator(std::vector<double> freqs_hz, std::vector<cplx> coefficients);

    /// Build from a baseband impulse response (FFT of the samples).
    static SpectralInterpolator from_impulse_response(const BasebandImpulseResponse& h);

    cplx at(double t_s) const;
    /// Value and first two time derivatives at t.
    void derivatives(double t_s, cplx& value, cplx& d1, cplx& d2) const;
    std::size_t active_bins() const noexcept { return freqs_.size(); }

private:
    std::vector<double> freqs_;
    std::vector<cplx> coeffs_;
};

struct Alignment {
    double t_peak_s = 0.0;
    cplx peak_value{0.0, 0.0};
};

/// Locate the |e(t)| maximum near t0 by iterated parabolic interpolation
/// (golden-section safeguarded) within t0 +/- dt.
Alignment refine_peak(const SpectralInterpolator& e, double t0_s, double dt_s);

/// Coarse argmax over the sample lattice followed by refine_peak.
Alignment find_alignment(const BasebandImpulseResponse& h, const SpectralInterpolator& e);

} // namespace gvdlink
