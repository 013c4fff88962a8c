// SPDX-License-Identifier: Apache-2.0

#include "gvdlink/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "gvdlink/fft.hpp"

namespace gvdlink {

void PulseShapeSpec::validate() const
{
    if (symbol_rate_bd <= 0.0)
        throw DomainError("symbol rate must be positive");
    if (rolloff < 0.0 || rolloff > 1.0)
        throw DomainError("rolloff must lie in [0, 1]");
}

double WeightVector::max_magnitude() const
{
    double m = 0.0;
    for (const auto& w : weights)
        m = std::max(m, std::abs(w));
    return m;
}

ChannelTransferFunction raised_cosine_response(const PulseShapeSpec& spec,
                                               const FrequencyGrid& grid, double center_hz)
{
    spec.validate();
    grid.validate();
    const double rate = spec.symbol_rate_bd;
    const double inner = (1.0 - spec.rolloff) * rate / 2.0;
    const double outer = (1.0 + spec.rolloff) * rate / 2.0;
    if (grid.start_hz > center_hz - outer || grid.end_hz() < center_hz + outer)
        throw DomainError("grid span does not cover the occupied band");

    ChannelTransferFunction tf;
    tf.grid = grid;
    tf.values.resize(grid.count);
    const bool root = spec.split == FilterSplit::matched_root_pair;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double x = std::abs(grid.frequency(i) - center_hz);
        double v;
        if (x <= inner) {
            v = 1.0;
        } else if (x < outer && spec.rolloff > 0.0) {
            v = 0.5 * (1.0 + std::cos(std::numbers::pi / (spec.rolloff * rate) * (x - inner)));
        } else {
            v = 0.0;
        }
        tf.values[i] = root ? std::sqrt(v) : v;
    }
    return tf;
}

BasebandImpulseResponse composite_impulse_response(const ChannelTransferFunction& atmosphere,
                                                   const ChannelTransferFunction& tx_filter,
                                                   const ChannelTransferFunction& rx_filter,
                                                   double carrier_hz)
{
    const FrequencyGrid& g = atmosphere.grid;
    g.validate();
    if (tx_filter.grid != g || rx_filter.grid != g)
        throw DomainError("transfer functions are not on one common grid");

    const double bins = (carrier_hz - g.start_hz) / g.step_hz;
    const auto b = static_cast<std::ptrdiff_t>(std::llround(bins));
    if (std::abs(bins - static_cast<double>(b)) > 1e-6 || b < 0 ||
        b >= static_cast<std::ptrdiff_t>(g.count))
        throw DomainError("carrier must coincide with a grid bin");

    const std::size_t n = g.count;
    std::vector<cplx> spectrum(n);
    for (std::size_t j = 0; j < n; ++j) {
        // FFT bin j holds baseband frequency (j < n/2 ? j : j - n) * step
        const std::ptrdiff_t offset =
            j < n / 2 ? static_cast<std::ptrdiff_t>(j)
                      : static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(n);
        const std::size_t rf = static_cast<std::size_t>(
            ((b + offset) % static_cast<std::ptrdiff_t>(n) + static_cast<std::ptrdiff_t>(n)) %
            static_cast<std::ptrdiff_t>(n));
        spectrum[j] = atmosphere.values[rf] * tx_filter.values[rf] * rx_filter.values[rf];
    }
    Fft fft(n);
    fft.inverse(spectrum.data());

    BasebandImpulseResponse h;
    h.time_step_s = 1.0 / g.span_hz();
    h.center_index = n / 2;
    h.samples.resize(n);
    for (std::size_t m = 0; m < n; ++m)
        h.samples[m] = spectrum[(m + h.center_index) % n];
    return h;
}

// ---------------------------------------------------------------------------
// Band-limited evaluation
// ---------------------------------------------------------------------------

SpectralInterpolator::SpectralInterpolator(std::vector<double> freqs_hz,
                                           std::vector<cplx> coefficients)
    : freqs_(std::move(freqs_hz)), coeffs_(std::move(coefficients))
{
    if (freqs_.size() != coeffs_.size() || freqs_.empty())
        throw DomainError("interpolator needs matching, nonempty bins");
}

SpectralInterpolator SpectralInterpolator::from_impulse_response(const BasebandImpulseResponse& h)
{
    const std::size_t n = h.samples.size();
    if (n < 2 || h.time_step_s <= 0.0 || h.center_index >= n)
        throw DomainError("malformed impulse response");
    std::vector<cplx> x(n);
    for (std::size_t m = 0; m < n; ++m)
        x[m] = h.samples[(m + n - h.center_index % n) % n]; // t = 0 back to slot 0
    Fft fft(n);
    fft.forward(x.data());

    double peak = 0.0;
    for (const auto& v : x)
        peak = std::max(peak, std::abs(v));
    const double df = 1.0 / (h.time_step_s * static_cast<double>(n));
    std::vector<double> freqs;
    std::vector<cplx> coeffs;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(x[k]) <= 1e-12 * peak)
            continue;
        const std::ptrdiff_t signed_k =
            k < n / 2 ? static_cast<std::ptrdiff_t>(k)
                      : static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(n);
        freqs.push_back(df * static_cast<double>(signed_k));
        coeffs.push_back(x[k] / static_cast<double>(n));
    }
    return SpectralInterpolator(std::move(freqs), std::move(coeffs));
}

cplx SpectralInterpolator::at(double t_s) const
{
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < freqs_.size(); ++k) {
        const double a = 2.0 * std::numbers::pi * freqs_[k] * t_s;
        acc += coeffs_[k] * cplx{std::cos(a), std::sin(a)};
    }
    return acc;
}

void SpectralInterpolator::derivatives(double t_s, cplx& value, cplx& d1, cplx& d2) const
{
    value = d1 = d2 = cplx{0.0, 0.0};
    for (std::size_t k = 0; k < freqs_.size(); ++k) {
        const double w = 2.0 * std::numbers::pi * freqs_[k];
        const double a = w * t_s;
        const cplx term = coeffs_[k] * cplx{std::cos(a), std::sin(a)};
        value += term;
        d1 += cplx{0.0, w} * term;
        d2 += -w * w * term;
    }
}

Alignment refine_peak(const SpectralInterpolator& e, double t0_s, double dt_s)
{
    auto mag2 = [&](double t) {
        const cplx v = e.at(t);
        return v.real() * v.real() + v.imag() * v.imag();
    };
    // Brent-style maximizer: successive parabolic interpolation with a
    // golden-section safeguard on [t0 - dt, t0 + dt].
    const double gold = 0.3819660112501051;
    double a = t0_s - dt_s, b = t0_s + dt_s;
    double x = t0_s, w = t0_s, v = t0_s;
    double fx = mag2(x), fw = fx, fv = fx;
    double d = 0.0, prev_d = 0.0;
    const double tol = 1e-9 * dt_s;
    for (int iter = 0; iter < 120 && (b - a) > tol; ++iter) {
        const double mid = 0.5 * (a + b);
        double step;
        bool parabola_ok = false;
        if (x != w && x != v && w != v) {
            const double r = (x - w) * (fx - fv);
            const double q0 = (x - v) * (fx - fw);
            double p = (x - v) * q0 - (x - w) * r;
            double q = 2.0 * (q0 - r);
            if (q > 0.0)
                p = -p;
            q = std::abs(q);
            if (q != 0.0) {
                const double cand = p / q;
                if (std::abs(cand) < 0.5 * std::abs(prev_d) && x + cand > a && x + cand < b) {
                    step = cand;
                    parabola_ok = true;
                }
            }
        }
        if (!parabola_ok)
            step = (x < mid ? b - x : a - x) * gold;
        prev_d = d;
        d = step;
        const double u = x + (std::abs(step) > tol ? step : (step > 0 ? tol : -tol));
        const double fu = mag2(u);
        if (fu >= fx) {
            if (u < x)
                b = x;
            else
                a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu >= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu >= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    // Value comparisons cannot place a flat maximum closer than ~sqrt(eps)
    // of its width, which leaves attosecond-scale timing error; the Nyquist
    // zero crossings downstream need far better. Polish the stationary
    // point of |e(t)|^2 with Newton on g(t) = Re(e'(t) conj(e(t))).
    double tn = x;
    for (int iter = 0; iter < 40; ++iter) {
        cplx v0, v1, v2;
        e.derivatives(tn, v0, v1, v2);
        const double g = v1.real() * v0.real() + v1.imag() * v0.imag();
        const double gp = v2.real() * v0.real() + v2.imag() * v0.imag() +
                          v1.real() * v1.real() + v1.imag() * v1.imag();
        if (gp >= 0.0)
            break; // not a local maximum; keep the bracketed estimate
        const double step = g / gp;
        if (!std::isfinite(step) || std::abs(step) > dt_s)
            break;
        tn -= step;
        if (std::abs(step) < 1e-30 + 1e-16 * std::abs(tn))
            break;
    }
    if (std::abs(e.at(tn)) >= std::abs(e.at(x)) * (1.0 - 1e-12))
        x = tn;
    return Alignment{x, e.at(x)};
}

Alignment find_alignment(const BasebandImpulseResponse& h, const SpectralInterpolator& e)
{
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < h.samples.size(); ++i) {
        const double m = std::abs(h.samples[i]);
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    const double t0 = (static_cast<double>(best) - static_cast<double>(h.center_index)) *
                      h.time_step_s;
    return refine_peak(e, t0, h.time_step_s);
}

WeightVector extract_weights(const BasebandImpulseResponse& h, const PulseShapeSpec& spec, int p)
{
    spec.validate();
    if (p < 1)
        throw DomainError("symbol span p must be >= 1");
    const double ts = spec.symbol_period_s();
    const double window = h.time_step_s * static_cast<double>(h.samples.size());
    if (window < (4.0 * p + 8.0) * ts)
        throw DomainError("impulse response window too short for span p");

    const auto e = SpectralInterpolator::from_impulse_response(h);
    const Alignment align = find_alignment(h, e);
    if (std::abs(align.peak_value) == 0.0)
        throw NumericError("impulse response peak is zero");

    WeightVector wv;
    wv.span_p = p;
    wv.weights.resize(2 * static_cast<std::size_t>(p));
    for (std::size_t i = 0; i < wv.weights.size(); ++i) {
        const int offset = wv.offset_of(i);
        wv.weights[i] = e.at(align.t_peak_s + offset * ts) / align.peak_value;
    }
    return wv;
}

void export_impulse_response(const BasebandImpulseResponse& h, std::ostream& out, bool normalize)
{
    cplx scale{1.0, 0.0};
    if (normalize) {
        std::size_t best = 0;
        double best_mag = -1.0;
        for (std::size_t i = 0; i < h.samples.size(); ++i)
            if (std::abs(h.samples[i]) > best_mag) {
                best_mag = std::abs(h.samples[i]);
                best = i;
            }
        if (best_mag > 0.0)
            scale = h.samples[best];
    }
    out << "time_s,real,imag\n";
    char buf[96];
    for (std::size_t i = 0; i < h.samples.size(); ++i) {
        const double t = (static_cast<double>(i) - static_cast<double>(h.center_index)) *
                         h.time_step_s;
        const cplx v = h.samples[i] / scale;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, v.real(), v.imag());
        out << buf;
    }
}

} // namespace gvdlink
