// SPDX-License-Identifier: Apache-2.0
//
// gvdlink command line: channel synthesis, weight inspection, analytical SER
// prediction, Monte Carlo simulation, sweeps and dispersion-limit search.
// All commands read one JSON config file and write CSV/JSON artifacts plus a
// reproducibility manifest.

#include <CLI11.hpp>

#include <filesystem>
#include <numbers>
#include <sstream>

#include "gvdlink/config.hpp"
#include "gvdlink/io.hpp"
#include "gvdlink/rng.hpp"
#include "gvdlink/sweep.hpp"

namespace fs = std::filesystem;
using namespace gvdlink;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string engine;
    bool dump_frames = false;
};

RunConfig load_with_overrides(const CommonArgs& args)
{
    const fs::path config_path(args.config_path);
    const std::string content = read_text_file(config_path);
    ordered_json j;
    try {
        j = ordered_json::parse(content);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse '" + config_path.string() + "': " + e.what());
    }
    if (args.seed_set)
        j["montecarlo"]["seed"] = args.seed;
    if (!args.engine.empty())
        j["sweep"]["engine"] = args.engine;
    auto rc = parse_run_config(j, fs::absolute(config_path).parent_path());
    rc.input_digests[fs::absolute(config_path).string()] =
        fnv1a64(content.data(), content.size());
    return rc;
}

void write_manifest(const std::string& command, const RunConfig& rc, const fs::path& out_dir,
                    std::vector<std::string> outputs, ordered_json extras = {})
{
    RunManifest manifest;
    manifest.command = command;
    manifest.rng_seed = rc.sim.rng_seed;
    manifest.resolved_config = rc.materialized;
    manifest.input_digests = rc.input_digests;
    manifest.outputs = std::move(outputs);
    ordered_json j = manifest.to_json();
    if (!extras.is_null() && !extras.empty())
        j["results"] = std::move(extras);
    write_text_file(out_dir / (command + ".manifest.json"), j.dump(2) + "\n");
}

FrequencyGrid grid_for(const RunConfig& rc)
{
    return FrequencyGrid::around_carrier(rc.sim.carrier_hz,
                                         rc.sim.pulse.occupied_bandwidth_hz(), rc.grid_count);
}

double fit_window_rad_s(const RunConfig& rc)
{
    const double hz = rc.fit.window_halfwidth_hz > 0.0
                          ? rc.fit.window_halfwidth_hz
                          : 1.5 * rc.sim.pulse.occupied_bandwidth_hz();
    return kTwoPi * hz;
}

// "_6km" style suffix; empty for single-distance runs
std::string distance_suffix(const RunConfig& rc, std::size_t index)
{
    if (rc.distances_m.size() < 2)
        return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%gkm", rc.distances_m[index] / 1000.0);
    return buf;
}

int cmd_channel(const CommonArgs& args)
{
    const auto rc = load_with_overrides(args);
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    const auto grid = grid_for(rc);
    const auto tf = make_transfer_function(rc.sim.channel, grid, rc.sim.path_length_m);
    std::ostringstream csv;
    export_transfer_function(tf, csv);
    write_text_file(out_dir / "channel_transfer_function.csv", csv.str());

    const auto coeffs =
        fit_taylor_coefficients(tf, kTwoPi * rc.sim.carrier_hz, rc.fit.order,
                                {.window_halfwidth_rad_s = fit_window_rad_s(rc)});
    ordered_json report;
    report["expansion_frequency_ghz"] = rc.sim.carrier_hz / 1e9;
    report["fit_order"] = rc.fit.order;
    report["fit_window_ghz"] = fit_window_rad_s(rc) / kTwoPi / 1e9;
    report["coefficients_rad_sn"] = coeffs.coefficients;
    report["phi2_s2"] = coeffs.phi2();
    report["path_length_m"] = rc.sim.path_length_m;
    write_text_file(out_dir / "channel_taylor.json", report.dump(2) + "\n");

    write_manifest("channel", rc, out_dir,
                   {"channel_transfer_function.csv", "channel_taylor.json"}, report);
    return 0;
}

int cmd_weights(const CommonArgs& args)
{
    const auto rc = load_with_overrides(args);
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    AnalyticalLinkModel model(rc.sim, Exec::parallel, rc.grid_count);
    const auto weights = model.weights_at(rc.sim.path_length_m);

    std::ostringstream csv;
    csv << "index,offset_symbols,real,imag,magnitude\n";
    for (std::size_t i = 0; i < weights.weights.size(); ++i) {
        const auto& w = weights.weights[i];
        csv << (i + 1) << "," << weights.offset_of(i) << "," << format_double(w.real()) << ","
            << format_double(w.imag()) << "," << format_double(std::abs(w)) << "\n";
    }
    write_text_file(out_dir / "weights.csv", csv.str());

    const auto grid = grid_for(rc);
    const auto atm = make_transfer_function(rc.sim.channel, grid, rc.sim.path_length_m);
    const auto tx = raised_cosine_response(rc.sim.pulse, grid, rc.sim.carrier_hz);
    const auto h = composite_impulse_response(atm, tx, tx, rc.sim.carrier_hz);
    std::ostringstream impulse_csv;
    export_impulse_response(h, impulse_csv);
    write_text_file(out_dir / "impulse_response.csv", impulse_csv.str());

    ordered_json extras;
    extras["symbol_span_p"] = weights.span_p;
    extras["max_weight_magnitude"] = weights.max_magnitude();
    write_manifest("weights", rc, out_dir, {"weights.csv", "impulse_response.csv"}, extras);
    return 0;
}

int cmd_predict(const CommonArgs& args)
{
    const auto rc = load_with_overrides(args);
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    AnalyticalLinkModel model(rc.sim, Exec::parallel, rc.grid_count);
    std::vector<std::string> outputs;
    ordered_json extras = ordered_json::array();
    for (std::size_t d = 0; d < rc.distances_m.size(); ++d) {
        const auto dset = model.displacements_at(rc.distances_m[d]);
        SerCurve curve;
        curve.x_name = "snr_db";
        curve.x_unit = "dB";
        for (const auto& snr : rc.snr_points)
            curve.points.push_back({.x = snr.db(), .ser = model_ser(dset, snr)});
        const std::string name = "predict_model" + distance_suffix(rc, d) + ".csv";
        write_text_file(out_dir / name, ser_curve_csv(curve));
        outputs.push_back(name);

        ordered_json entry;
        entry["distance_km"] = rc.distances_m[d] / 1000.0;
        entry["deterministic_error_floor"] = deterministic_error_floor(dset);
        entry["displacement_count"] = dset.displacements.size();
        extras.push_back(std::move(entry));
    }
    write_manifest("predict", rc, out_dir, outputs, extras);
    return 0;
}

int cmd_simulate(const CommonArgs& args)
{
    const auto rc = load_with_overrides(args);
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    std::vector<std::string> outputs;
    ordered_json results = ordered_json::array();
    for (std::size_t d = 0; d < rc.distances_m.size(); ++d) {
        SerCurve curve;
        curve.x_name = "snr_db";
        curve.x_unit = "dB";
        const std::uint64_t distance_seed =
            rc.distances_m.size() < 2 ? rc.sim.rng_seed
                                      : CounterRng::substream_key(rc.sim.rng_seed, 0x5eed + d);
        for (std::size_t i = 0; i < rc.snr_points.size(); ++i) {
            SimulationConfig cfg = rc.sim;
            cfg.path_length_m = rc.distances_m[d];
            cfg.snr = rc.snr_points[i];
            cfg.rng_seed = CounterRng::substream_key(distance_seed, i);
            const auto r = run_simulation(cfg);
            curve.points.push_back({.x = cfg.snr.db(),
                                    .ser = r.ser_estimate,
                                    .ci_low = r.binomial_95ci.low,
                                    .ci_high = r.binomial_95ci.high});
            ordered_json point;
            point["distance_km"] = cfg.path_length_m / 1000.0;
            if (cfg.snr.is_infinite)
                point["snr_db"] = "inf";
            else
                point["snr_db"] = cfg.snr.db();
            point["point_seed"] = cfg.rng_seed;
            point["symbols_sent"] = r.symbols_sent;
            point["symbol_errors"] = r.symbol_errors;
            point["ser_estimate"] = r.ser_estimate;
            point["ci95_low"] = r.binomial_95ci.low;
            point["ci95_high"] = r.binomial_95ci.high;
            point["reference_signal_power"] = r.reference_signal_power;
            point["noise_sigma_per_axis"] = r.noise_sigma_per_axis;
            point["measured_snr_db"] = r.measured_snr_db;
            if (args.dump_frames)
                point["per_frame_errors"] = r.per_frame_errors;
            results.push_back(std::move(point));
        }
        const std::string name = "simulate_mc" + distance_suffix(rc, d) + ".csv";
        write_text_file(out_dir / name, ser_curve_csv(curve));
        outputs.push_back(name);
    }
    outputs.push_back("simulate_results.json");
    write_text_file(out_dir / "simulate_results.json", results.dump(2) + "\n");
    write_manifest("simulate", rc, out_dir, outputs);
    return 0;
}

int cmd_sweep(const CommonArgs& args)
{
    const auto rc = load_with_overrides(args);
    if (!rc.sweep.has_value())
        throw ConfigError("config key 'sweep': missing");
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    std::vector<double> rates = rc.sweep->symbol_rates_bd;
    const bool bundle = !rates.empty() && rc.sweep->variable == SweepVariable::distance;
    if (!bundle)
        rates = {rc.sim.pulse.symbol_rate_bd};

    std::vector<std::string> outputs;
    for (double rate : rates) {
        SweepSpec spec;
        spec.variable = rc.sweep->variable;
        spec.start = rc.sweep->start;
        spec.stop = rc.sweep->stop;
        spec.step = rc.sweep->step;
        spec.engine = rc.sweep->engine;
        spec.base = rc.sim;
        spec.base.pulse.symbol_rate_bd = rate;
        spec.grid_count = rc.grid_count;
        const auto result = run_sweep(spec);

        std::string suffix;
        if (bundle) {
            std::ostringstream tag;
            tag << "_" << rate / 1e9 << "gbd";
            suffix = tag.str();
        }
        if (result.model) {
            const std::string name = "sweep_model" + suffix + ".csv";
            write_text_file(out_dir / name, ser_curve_csv(*result.model));
            outputs.push_back(name);
        }
        if (result.montecarlo) {
            const std::string name = "sweep_mc" + suffix + ".csv";
            write_text_file(out_dir / name, ser_curve_csv(*result.montecarlo));
            outputs.push_back(name);
        }
    }
    write_manifest("sweep", rc, out_dir, outputs);
    return 0;
}

int cmd_limit(const CommonArgs& args)
{
    const auto rc = load_with_overrides(args);
    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    SimulationConfig cfg = rc.sim;
    cfg.snr = SnrPoint::infinite();
    const auto lim = find_dispersion_limit(cfg, rc.limit.threshold_ser, rc.limit.range_start_m,
                                           rc.limit.range_stop_m, Exec::parallel, 33, 50.0,
                                           rc.grid_count);

    ordered_json j;
    j["limit_distance_m"] = lim.limit_distance_m;
    j["limit_distance_km"] = lim.limit_distance_m / 1000.0;
    j["threshold_ser"] = lim.threshold_ser;
    j["bracket_low_m"] = lim.bracket_low_m;
    j["bracket_high_m"] = lim.bracket_high_m;
    j["warnings"] = lim.warnings;
    write_text_file(out_dir / "limit.json", j.dump(2) + "\n");
    write_text_file(out_dir / "limit_floor_curve.csv", ser_curve_csv(lim.curve));
    write_manifest("limit", rc, out_dir, {"limit.json", "limit_floor_curve.csv"}, j);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SER analysis of broadband THz links under atmospheric group "
                 "velocity dispersion"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CommonArgs args;
    int (*handler)(const CommonArgs&) = nullptr;

    auto add_common = [&](CLI::App* sub, bool with_engine = false, bool with_frames = false) {
        sub->add_option("--config", args.config_path, "JSON configuration file")->required();
        sub->add_option("--out", args.out_dir, "output directory (default: .)");
        sub->add_option("--seed", args.seed, "override montecarlo.seed")
            ->each([&](const std::string&) { args.seed_set = true; });
        if (with_engine)
            sub->add_option("--engine", args.engine, "override sweep.engine (model|mc|both)")
                ->check(CLI::IsMember({"model", "mc", "both"}));
        if (with_frames)
            sub->add_flag("--dump-frames", args.dump_frames,
                          "include per-frame error counts in the JSON results");
    };

    auto* channel = app.add_subcommand("channel", "synthesize H(f) and report the phase Taylor fit");
    add_common(channel);
    channel->callback([&] { handler = cmd_channel; });

    auto* weights = app.add_subcommand("weights", "extract the symbol weight vector");
    add_common(weights);
    weights->callback([&] { handler = cmd_weights; });

    auto* predict = app.add_subcommand("predict", "analytical SER vs SNR");
    add_common(predict);
    predict->callback([&] { handler = cmd_predict; });

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo SER vs SNR");
    add_common(simulate, false, true);
    simulate->callback([&] { handler = cmd_simulate; });

    auto* sweep = app.add_subcommand("sweep", "sweep distance, SNR or symbol rate");
    add_common(sweep, true);
    sweep->callback([&] { handler = cmd_sweep; });

    auto* limit = app.add_subcommand("limit", "bisect the dispersion-limit distance");
    add_common(limit);
    limit->callback([&] { handler = cmd_limit; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return handler(args);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
