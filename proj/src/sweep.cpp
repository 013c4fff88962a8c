// SPDX-License-Identifier: Apache-2.0

#include "gvdlink/sweep.hpp"

#include <cmath>

#include "gvdlink/rng.hpp"

namespace gvdlink {

namespace {

std::vector<double> grid_frequencies(const FrequencyGrid& g)
{
    std::vector<double> freqs(g.count);
    for (std::size_t i = 0; i < g.count; ++i)
        freqs[i] = g.frequency(i);
    return freqs;
}

ChannelTransferFunction ones_response(const FrequencyGrid& grid)
{
    ChannelTransferFunction tf;
    tf.grid = grid;
    tf.values.assign(grid.count, cplx{1.0, 0.0});
    return tf;
}

} // namespace

AnalyticalLinkModel::AnalyticalLinkModel(const SimulationConfig& base, Exec exec,
                                         std::size_t grid_count)
    : base_(base), exec_(exec),
      grid_(FrequencyGrid::around_carrier(base.carrier_hz, base.pulse.occupied_bandwidth_hz(),
                                          grid_count)),
      prepared_(base.channel, grid_frequencies(grid_), exec)
{
    base_.validate();
    if (base_.pulse.split == FilterSplit::matched_root_pair) {
        tx_ = raised_cosine_response(base_.pulse, grid_, base_.carrier_hz);
        rx_ = tx_;
    } else {
        PulseShapeSpec full = base_.pulse;
        full.split = FilterSplit::single_raised_cosine;
        // full raised cosine at the transmitter, flat receiver
        ChannelTransferFunction tf;
        tf.grid = grid_;
        tf.values.resize(grid_.count);
        const auto rc = raised_cosine_response(full, grid_, base_.carrier_hz);
        tx_ = rc;
        rx_ = ones_response(grid_);
    }
}

WeightVector AnalyticalLinkModel::weights_at(double path_length_m) const
{
    ChannelTransferFunction atm;
    atm.grid = grid_;
    atm.values = prepared_.transfer(path_length_m);
    if (prepared_.distance_scalable())
        atm.path_length_m = path_length_m;
    const auto h = composite_impulse_response(atm, tx_, rx_, base_.carrier_hz);
    return extract_weights(h, base_.pulse, base_.symbol_span_p);
}

DispersionDisplacementSet AnalyticalLinkModel::displacements_at(double path_length_m) const
{
    return enumerate_displacements(weights_at(path_length_m),
                                   Constellation::square(base_.modulation_order), exec_);
}

double AnalyticalLinkModel::floor_at(double path_length_m) const
{
    return deterministic_error_floor(displacements_at(path_length_m));
}

double AnalyticalLinkModel::ser_at(double path_length_m, const SnrPoint& snr) const
{
    return model_ser(displacements_at(path_length_m), snr, exec_);
}

double AnalyticalLinkModel::ser_of(const DispersionDisplacementSet& dset, const SnrPoint& snr) const
{
    return model_ser(dset, snr, exec_);
}

void SweepSpec::validate() const
{
    if (!(step > 0.0))
        throw DomainError("sweep step must be positive");
    if (stop < start)
        throw DomainError("sweep range is empty");
}

std::vector<double> SweepSpec::grid_values() const
{
    validate();
    std::vector<double> xs;
    for (double x = start; x <= stop + 0.5 * step; x += step)
        xs.push_back(x);
    return xs;
}

SweepResult run_sweep(const SweepSpec& spec, Exec exec)
{
    spec.validate();
    const auto xs = spec.grid_values();
    const bool want_model =
        spec.engine == SweepEngine::model || spec.engine == SweepEngine::both;
    const bool want_mc =
        spec.engine == SweepEngine::montecarlo || spec.engine == SweepEngine::both;

    SweepResult result;
    const char* x_name = spec.variable == SweepVariable::distance     ? "distance_m"
                         : spec.variable == SweepVariable::snr        ? "snr_db"
                                                                      : "symbol_rate_bd";
    const char* x_unit = spec.variable == SweepVariable::distance     ? "m"
                         : spec.variable == SweepVariable::snr        ? "dB"
                                                                      : "Bd";

    if (want_model) {
        SerCurve curve;
        curve.x_name = x_name;
        curve.x_unit = x_unit;
        if (spec.variable == SweepVariable::distance) {
            AnalyticalLinkModel model(spec.base, exec, spec.grid_count);
            for (double x : xs)
                curve.points.push_back({.x = x, .ser = model.ser_at(x, spec.base.snr)});
        } else if (spec.variable == SweepVariable::snr) {
            AnalyticalLinkModel model(spec.base, exec, spec.grid_count);
            const auto dset = model.displacements_at(spec.base.path_length_m);
            for (double x : xs)
                curve.points.push_back({.x = x, .ser = model.ser_of(dset, SnrPoint::from_db(x))});
        } else {
            for (double x : xs) {
                SimulationConfig cfg = spec.base;
                cfg.pulse.symbol_rate_bd = x;
                AnalyticalLinkModel model(cfg, exec, spec.grid_count);
                curve.points.push_back({.x = x, .ser = model.ser_at(cfg.path_length_m, cfg.snr)});
            }
        }
        result.model = std::move(curve);
    }

    if (want_mc) {
        SerCurve curve;
        curve.x_name = x_name;
        curve.x_unit = x_unit;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            SimulationConfig cfg = spec.base;
            cfg.rng_seed = CounterRng::substream_key(spec.base.rng_seed, i);
            if (spec.variable == SweepVariable::distance)
                cfg.path_length_m = xs[i];
            else if (spec.variable == SweepVariable::snr)
                cfg.snr = SnrPoint::from_db(xs[i]);
            else
                cfg.pulse.symbol_rate_bd = xs[i];
            const auto r = run_simulation(cfg, exec);
            curve.points.push_back(
                {xs[i], r.ser_estimate, r.binomial_95ci.low, r.binomial_95ci.high});
        }
        result.montecarlo = std::move(curve);
    }
    return result;
}

DispersionLimitResult find_dispersion_limit(const SimulationConfig& base, double threshold_ser,
                                            double range_start_m, double range_stop_m, Exec exec,
                                            int coarse_points, double bracket_width_m,
                                            std::size_t grid_count)
{
    if (!(threshold_ser > 0.0 && threshold_ser < 1.0))
        throw DomainError("threshold SER must lie in (0, 1)");
    if (!(range_stop_m > range_start_m) || range_start_m < 0.0)
        throw DomainError("invalid distance range");
    if (coarse_points < 2)
        throw DomainError("need at least 2 coarse points");

    AnalyticalLinkModel model(base, exec, grid_count);

    DispersionLimitResult result;
    result.threshold_ser = threshold_ser;
    result.curve.x_name = "distance_m";
    result.curve.x_unit = "m";

    std::vector<double> xs(static_cast<std::size_t>(coarse_points));
    std::vector<double> floors(xs.size());
    const double span = range_stop_m - range_start_m;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = range_start_m + span * static_cast<double>(i) / (xs.size() - 1.0);
        floors[i] = model.floor_at(xs[i]);
        result.curve.points.push_back({.x = xs[i], .ser = floors[i]});
    }
    if (floors.front() > threshold_ser)
        throw DomainError("floor already exceeds the threshold at the range start");
    std::size_t cell = xs.size();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (floors[i] <= threshold_ser && floors[i + 1] > threshold_ser) {
            cell = i;
            break;
        }
    }
    if (cell == xs.size())
        throw DomainError("floor does not cross the threshold within the range");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (floors[i + 1] >= floors[i] - 1e-15)
            continue;
        const std::string what = "non-monotone floor between " + std::to_string(xs[i]) +
                                 " m and " + std::to_string(xs[i + 1]) + " m (" +
                                 std::to_string(floors[i]) + " -> " +
                                 std::to_string(floors[i + 1]) + ")";
        // Violations at or before the bracketing cell invalidate the search;
        // later ones are saturation wiggle and are surfaced, not fatal.
        if (i <= cell)
            throw NumericError(what + " on the coarse grid");
        if (floors[i + 1] <= threshold_ser)
            throw NumericError(what + ": floor re-crosses the threshold");
        result.warnings.push_back(what);
    }

    double lo = xs[cell], hi = xs[cell + 1];
    while (hi - lo > bracket_width_m) {
        const double mid = 0.5 * (lo + hi);
        if (model.floor_at(mid) > threshold_ser)
            hi = mid;
        else
            lo = mid;
    }
    result.bracket_low_m = lo;
    result.bracket_high_m = hi;
    result.limit_distance_m = 0.5 * (lo + hi);
    return result;
}

} // namespace gvdlink
