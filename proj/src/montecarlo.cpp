// SPDX-License-Identifier: Apache-2.0

#include "gvdlink/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gvdlink/fft.hpp"
#include "gvdlink/rng.hpp"

namespace gvdlink {

namespace {

constexpr std::uint64_t kCalibrationTag = 0xca11bull;
constexpr std::uint64_t kBitStreamTag = 1;
constexpr std::uint64_t kNoiseStreamTag = 2;
constexpr std::uint64_t kCalibrationNoiseDraws = 100000;
constexpr std::uint64_t kCalibrationSymbols = 10000;

// Composite link magnitude response at baseband offset nu. The tx/rx split
// does not change the product: root^2 in matched mode, full RC otherwise.
double composite_filter(const PulseShapeSpec& pulse, double nu)
{
    const double rate = pulse.symbol_rate_bd;
    const double inner = (1.0 - pulse.rolloff) * rate / 2.0;
    const double outer = (1.0 + pulse.rolloff) * rate / 2.0;
    const double x = std::abs(nu);
    if (x <= inner)
        return 1.0;
    if (x < outer && pulse.rolloff > 0.0)
        return 0.5 * (1.0 + std::cos(std::numbers::pi / (pulse.rolloff * rate) * (x - inner)));
    return 0.0;
}

struct LinkLattice {
    std::size_t n_fft = 0;
    double dt_s = 0.0;
    int n_data = 0;
    int n_total = 0;
    // normalized, timing-advanced composite response on the occupied bins
    std::vector<std::size_t> occupied_bins;
    std::vector<cplx> gain; // per occupied bin
};

// Build the receive lattice for one channel realization: composite response,
// peak alignment, timing advance and center-tap normalization folded into
// the per-bin gain.
LinkLattice prepare_lattice(const SimulationConfig& cfg, const ChannelSpec& channel,
                            double path_length_m, Exec exec)
{
    const auto& pulse = cfg.pulse;
    const unsigned bps = Constellation::square(cfg.modulation_order).bits_per_symbol();
    LinkLattice lat;
    lat.n_data = cfg.frame_bits / static_cast<int>(bps);
    lat.n_total = lat.n_data + 2 * cfg.guard_symbols();
    const std::size_t frame_samples =
        static_cast<std::size_t>(lat.n_total) * static_cast<std::size_t>(cfg.samples_per_symbol);
    lat.n_fft = Fft::next_power_of_two(2 * frame_samples);
    lat.dt_s = pulse.symbol_period_s() / static_cast<double>(cfg.samples_per_symbol);
    const double df = 1.0 / (lat.dt_s * static_cast<double>(lat.n_fft));

    // occupied bins and their baseband frequencies
    std::vector<double> nu, rf;
    for (std::size_t j = 0; j < lat.n_fft; ++j) {
        const auto signed_j =
            j < lat.n_fft / 2 ? static_cast<std::ptrdiff_t>(j)
                              : static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(lat.n_fft);
        const double f = df * static_cast<double>(signed_j);
        if (composite_filter(pulse, f) > 0.0) {
            lat.occupied_bins.push_back(j);
            nu.push_back(f);
            rf.push_back(cfg.carrier_hz + f);
        }
    }

    PreparedChannel prepared(channel, std::move(rf), exec);
    std::vector<cplx> atm(lat.occupied_bins.size());
    prepared.transfer(path_length_m, atm);

    std::vector<cplx> g0(lat.occupied_bins.size());
    for (std::size_t k = 0; k < g0.size(); ++k)
        g0[k] = composite_filter(pulse, nu[k]) * atm[k];

    // peak alignment on this lattice, shared procedure with extract_weights
    std::vector<cplx> coeffs(g0.size());
    for (std::size_t k = 0; k < g0.size(); ++k)
        coeffs[k] = g0[k] / static_cast<double>(lat.n_fft);
    SpectralInterpolator interp(nu, coeffs);

    std::vector<cplx> h(lat.n_fft, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < g0.size(); ++k)
        h[lat.occupied_bins[k]] = g0[k];
    Fft fft(lat.n_fft);
    fft.inverse(h.data());
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (std::abs(h[i]) > best_mag) {
            best_mag = std::abs(h[i]);
            best = i;
        }
    const double t0 =
        (best < lat.n_fft / 2 ? static_cast<double>(best)
                              : static_cast<double>(best) - static_cast<double>(lat.n_fft)) *
        lat.dt_s;
    const Alignment align = refine_peak(interp, t0, lat.dt_s);
    if (std::abs(align.peak_value) == 0.0)
        throw NumericError("composite channel response has no energy at the receiver");

    lat.gain.resize(g0.size());
    for (std::size_t k = 0; k < g0.size(); ++k) {
        const double a = 2.0 * std::numbers::pi * nu[k] * align.t_peak_s;
        lat.gain[k] = g0[k] * cplx{std::cos(a), std::sin(a)} / align.peak_value;
    }
    return lat;
}

struct FrameWorkspace {
    std::vector<cplx> spectrum;
    std::vector<unsigned> sent;
    std::vector<std::uint8_t> bits;
};

// Simulate one frame; returns the data-symbol error count. Decision samples
// may be recorded for calibration.
std::uint32_t simulate_frame(const LinkLattice& lat, const SimulationConfig& cfg,
                             const Constellation& constellation, const Fft& fft,
                             std::uint64_t frame_seed, double noise_sigma,
                             FrameWorkspace& ws, std::vector<cplx>* decision_samples)
{
    const int sps = cfg.samples_per_symbol;
    const int guards = cfg.guard_symbols();
    const unsigned bps = constellation.bits_per_symbol();

    CounterRng bit_rng(CounterRng::substream_key(frame_seed, kBitStreamTag));
    ws.bits.clear();
    for (int k = 0; k < lat.n_total; ++k)
        for (unsigned b = 0; b < bps; ++b)
            ws.bits.push_back(static_cast<std::uint8_t>(bit_rng.next_bit()));
    const auto symbols = constellation.modulate(ws.bits);

    ws.sent.clear();
    for (int k = 0; k < lat.n_total; ++k)
        ws.sent.push_back(constellation.decide(symbols[static_cast<std::size_t>(k)]));

    auto& x = ws.spectrum;
    x.assign(lat.n_fft, cplx{0.0, 0.0});
    for (int k = 0; k < lat.n_total; ++k)
        x[static_cast<std::size_t>(k) * sps] = symbols[static_cast<std::size_t>(k)];
    fft.forward(x.data());
    // zero everything the composite filter does not pass, apply the gain
    std::vector<cplx> shaped(lat.n_fft, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < lat.occupied_bins.size(); ++k) {
        const std::size_t j = lat.occupied_bins[k];
        shaped[j] = x[j] * lat.gain[k];
    }
    x.swap(shaped);
    fft.inverse(x.data());

    CounterRng noise_rng(CounterRng::substream_key(frame_seed, kNoiseStreamTag));
    std::uint32_t errors = 0;
    for (int k = guards; k < guards + lat.n_data; ++k) {
        cplx y = x[static_cast<std::size_t>(k) * sps];
        if (noise_sigma > 0.0) {
            const double ni = noise_rng.next_normal();
            const double nq = noise_rng.next_normal();
            y += noise_sigma * cplx{ni, nq};
        }
        if (decision_samples)
            decision_samples->push_back(y);
        if (constellation.decide(y) != ws.sent[static_cast<std::size_t>(k)])
            ++errors;
    }
    return errors;
}

} // namespace

void SimulationConfig::validate() const
{
    pulse.validate();
    const unsigned bps = Constellation::square(modulation_order).bits_per_symbol();
    if (frame_bits <= 0 || frame_bits % static_cast<int>(bps) != 0)
        throw DomainError("frame_bits must be a positive multiple of bits per symbol");
    if (samples_per_symbol < 4)
        throw DomainError("samples_per_symbol must be >= 4");
    if (frame_count < 1)
        throw DomainError("frame_count must be >= 1");
    if (symbol_span_p < 1)
        throw DomainError("symbol_span_p must be >= 1");
    if (path_length_m < 0.0)
        throw DomainError("path length must be nonnegative");
    if (carrier_hz <= pulse.occupied_bandwidth_hz() / 2.0)
        throw DomainError("occupied band extends to nonpositive frequencies");
    if (!snr.is_infinite && !(snr.linear > 0.0))
        throw DomainError("finite SNR must be positive");
}

double binomial_sigma(double p, std::uint64_t trials)
{
    if (trials == 0)
        return 0.0;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(trials));
}

BinomialInterval wilson_interval_95(std::uint64_t successes, std::uint64_t trials)
{
    if (trials == 0)
        return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    BinomialInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0)
        ci.low = 0.0;
    if (successes == trials)
        ci.high = 1.0;
    return ci;
}

SimulationResult run_simulation(const SimulationConfig& cfg, Exec exec)
{
    cfg.validate();
    const auto constellation = Constellation::square(cfg.modulation_order);
    const LinkLattice lattice = prepare_lattice(cfg, cfg.channel, cfg.path_length_m, exec);
    const Fft fft(lattice.n_fft);

    SimulationResult result;
    result.config = cfg;

    double noise_sigma = 0.0;
    if (!cfg.snr.is_infinite) {
        // Noiseless 0 km reference run: measure decision-point signal power.
        const LinkLattice ref = prepare_lattice(cfg, IdentityChannelSpec{}, 0.0, exec);
        const std::uint64_t cal_key = CounterRng::substream_key(cfg.rng_seed, kCalibrationTag);
        const auto cal_frames = static_cast<int>(
            (kCalibrationSymbols + lattice.n_data - 1) / static_cast<std::uint64_t>(lattice.n_data));
        std::vector<cplx> samples;
        samples.reserve(static_cast<std::size_t>(cal_frames) * ref.n_data);
        FrameWorkspace ws;
        for (int f = 0; f < cal_frames; ++f)
            simulate_frame(ref, cfg, constellation, fft,
                           CounterRng::substream_key(cal_key, static_cast<std::uint64_t>(f)), 0.0,
                           ws, &samples);
        double power = 0.0;
        for (const auto& s : samples)
            power += std::norm(s);
        power /= static_cast<double>(samples.size());
        result.reference_signal_power = power;

        noise_sigma = std::sqrt(power / (2.0 * cfg.snr.linear));

        // Verify the injected noise realizes the target SNR.
        CounterRng verify(CounterRng::substream_key(cal_key, kNoiseStreamTag));
        double noise_power = 0.0;
        for (std::uint64_t i = 0; i < kCalibrationNoiseDraws; ++i) {
            const double ni = noise_sigma * verify.next_normal();
            const double nq = noise_sigma * verify.next_normal();
            noise_power += ni * ni + nq * nq;
        }
        noise_power /= static_cast<double>(kCalibrationNoiseDraws);
        result.measured_snr_db = 10.0 * std::log10(power / noise_power);
        if (std::abs(result.measured_snr_db - cfg.snr.db()) > 0.1)
            throw NumericError("noise calibration failed: measured SNR " +
                               std::to_string(result.measured_snr_db) + " dB vs target " +
                               std::to_string(cfg.snr.db()) + " dB");
        result.noise_sigma_per_axis = noise_sigma;
    }

    result.per_frame_errors.assign(static_cast<std::size_t>(cfg.frame_count), 0);
    const auto frames = static_cast<std::ptrdiff_t>(cfg.frame_count);

    if (exec == Exec::parallel) {
#pragma omp parallel
        {
            FrameWorkspace ws;
#pragma omp for schedule(static)
            for (std::ptrdiff_t f = 0; f < frames; ++f) {
                const std::uint64_t seed =
                    CounterRng::substream_key(cfg.rng_seed, static_cast<std::uint64_t>(f));
                result.per_frame_errors[static_cast<std::size_t>(f)] = simulate_frame(
                    lattice, cfg, constellation, fft, seed, noise_sigma, ws, nullptr);
            }
        }
    } else {
        FrameWorkspace ws;
        for (std::ptrdiff_t f = 0; f < frames; ++f) {
            const std::uint64_t seed =
                CounterRng::substream_key(cfg.rng_seed, static_cast<std::uint64_t>(f));
            result.per_frame_errors[static_cast<std::size_t>(f)] =
                simulate_frame(lattice, cfg, constellation, fft, seed, noise_sigma, ws, nullptr);
        }
    }

    result.symbols_sent =
        static_cast<std::uint64_t>(lattice.n_data) * static_cast<std::uint64_t>(cfg.frame_count);
    for (auto e : result.per_frame_errors)
        result.symbol_errors += e;
    result.ser_estimate =
        static_cast<double>(result.symbol_errors) / static_cast<double>(result.symbols_sent);
    result.binomial_95ci = wilson_interval_95(result.symbol_errors, result.symbols_sent);
    return result;
}

SerCurve run_waterfall(const SimulationConfig& cfg, std::span<const SnrPoint> snrs, Exec exec)
{
    SerCurve curve;
    curve.x_name = "snr_db";
    curve.x_unit = "dB";
    for (std::size_t i = 0; i < snrs.size(); ++i) {
        SimulationConfig point_cfg = cfg;
        point_cfg.snr = snrs[i];
        point_cfg.rng_seed = CounterRng::substream_key(cfg.rng_seed, i);
        const auto r = run_simulation(point_cfg, exec);
        SerPoint p;
        p.x = snrs[i].db();
        p.ser = r.ser_estimate;
        p.ci_low = r.binomial_95ci.low;
        p.ci_high = r.binomial_95ci.high;
        curve.points.push_back(p);
    }
    return curve;
}

} // namespace gvdlink
