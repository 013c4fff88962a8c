// SPDX-License-Identifier: Apache-2.0

#include "gvdlink/config.hpp"

#include <fstream>
#include <sstream>

namespace gvdlink {

namespace {

[[noreturn]] void bad_key(const std::string& path, const std::string& why)
{
    throw ConfigError("config key '" + path + "': " + why);
}

const ordered_json* find(const ordered_json& obj, const std::string& key)
{
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double require_number(const ordered_json& obj, const std::string& section, const std::string& key)
{
    const auto* v = find(obj, key);
    if (!v)
        bad_key(section + "." + key, "missing");
    if (!v->is_number())
        bad_key(section + "." + key, "must be a number");
    return v->get<double>();
}

double opt_number(const ordered_json& obj, const std::string& section, const std::string& key,
                  double fallback)
{
    const auto* v = find(obj, key);
    if (!v)
        return fallback;
    if (!v->is_number())
        bad_key(section + "." + key, "must be a number");
    return v->get<double>();
}

std::int64_t opt_integer(const ordered_json& obj, const std::string& section,
                         const std::string& key, std::int64_t fallback)
{
    const auto* v = find(obj, key);
    if (!v)
        return fallback;
    if (!v->is_number_integer() && !v->is_number_unsigned())
        bad_key(section + "." + key, "must be an integer");
    return v->get<std::int64_t>();
}

std::string opt_string(const ordered_json& obj, const std::string& section,
                       const std::string& key, const std::string& fallback)
{
    const auto* v = find(obj, key);
    if (!v)
        return fallback;
    if (!v->is_string())
        bad_key(section + "." + key, "must be a string");
    return v->get<std::string>();
}

std::filesystem::path resolve_path(const std::string& raw, const std::filesystem::path& base_dir)
{
    std::filesystem::path p(raw);
    return p.is_absolute() ? p : base_dir / p;
}

} // namespace

RunConfig parse_run_config(const ordered_json& config, const std::filesystem::path& base_dir)
{
    if (!config.is_object())
        throw ConfigError("config root must be a JSON object");
    RunConfig rc;
    ordered_json out;

    // ---- link ----
    const auto* link = find(config, "link");
    if (!link || !link->is_object())
        throw ConfigError("config key 'link': missing or not an object");
    const double carrier_ghz = require_number(*link, "link", "carrier_ghz");
    const double rate_gbd = require_number(*link, "link", "symbol_rate_gbd");
    const double rolloff = opt_number(*link, "link", "rolloff", 0.5);
    std::vector<double> distances_km{0.0};
    if (const auto* d = find(*link, "distance_km")) {
        if (d->is_number()) {
            distances_km = {d->get<double>()};
        } else if (d->is_array() && !d->empty()) {
            distances_km.clear();
            for (const auto& v : *d) {
                if (!v.is_number())
                    bad_key("link.distance_km", "entries must be numbers");
                distances_km.push_back(v.get<double>());
            }
        } else {
            bad_key("link.distance_km", "must be a number or a nonempty array");
        }
        for (double km : distances_km)
            if (km < 0.0)
                bad_key("link.distance_km", "must be nonnegative");
    }
    const auto span_p = opt_integer(*link, "link", "symbol_span_p", 3);
    const auto mod_order = opt_integer(*link, "link", "modulation_order", 4);
    const std::string split = opt_string(*link, "link", "filter_split", "matched-root-pair");
    if (split != "matched-root-pair" && split != "single-raised-cosine")
        bad_key("link.filter_split", "must be 'matched-root-pair' or 'single-raised-cosine'");
    if (carrier_ghz <= 0.0)
        bad_key("link.carrier_ghz", "must be positive");
    if (rate_gbd <= 0.0)
        bad_key("link.symbol_rate_gbd", "must be positive");
    if (span_p < 1)
        bad_key("link.symbol_span_p", "must be >= 1");

    rc.sim.carrier_hz = carrier_ghz * 1e9;
    rc.sim.pulse.symbol_rate_bd = rate_gbd * 1e9;
    rc.sim.pulse.rolloff = rolloff;
    rc.sim.pulse.split = split == "matched-root-pair" ? FilterSplit::matched_root_pair
                                                      : FilterSplit::single_raised_cosine;
    rc.distances_m.clear();
    for (double km : distances_km)
        rc.distances_m.push_back(km * 1000.0);
    rc.sim.path_length_m = rc.distances_m.front();
    rc.sim.symbol_span_p = static_cast<int>(span_p);
    rc.sim.modulation_order = static_cast<unsigned>(mod_order);

    out["link"] = {{"carrier_ghz", carrier_ghz},
                   {"symbol_rate_gbd", rate_gbd},
                   {"rolloff", rolloff},
                   {"filter_split", split},
                   {"symbol_span_p", span_p},
                   {"modulation_order", mod_order}};
    if (distances_km.size() == 1)
        out["link"]["distance_km"] = distances_km.front();
    else
        out["link"]["distance_km"] = distances_km;

    // ---- channel ----
    const auto* channel = find(config, "channel");
    if (!channel || !channel->is_object())
        throw ConfigError("config key 'channel': missing or not an object");
    const std::string kind = opt_string(*channel, "channel", "kind", "identity");
    ordered_json chan_out;
    chan_out["kind"] = kind;
    if (kind == "identity") {
        rc.sim.channel = IdentityChannelSpec{};
    } else if (kind == "catalog") {
        const std::string raw_path = opt_string(*channel, "channel", "catalog_path", "");
        if (raw_path.empty())
            bad_key("channel.catalog_path", "missing");
        const auto path = resolve_path(raw_path, base_dir);
        const double cutoff_thz = opt_number(*channel, "channel", "cutoff_thz", 5.0);
        const double temp_c = opt_number(*channel, "channel", "temperature_c", 20.0);
        const double pressure_hpa = opt_number(*channel, "channel", "pressure_hpa", 1013.25);

        AtmosphereState atm;
        atm.temperature_k = temp_c + 273.15;
        atm.pressure_pa = pressure_hpa * 100.0;
        const auto* rho = find(*channel, "water_vapor_density_g_m3");
        const auto* rh = find(*channel, "relative_humidity_percent");
        if (rho && rh)
            bad_key("channel.relative_humidity_percent",
                    "mutually exclusive with water_vapor_density_g_m3");
        if (rho) {
            atm.water_vapor_density_g_m3 =
                require_number(*channel, "channel", "water_vapor_density_g_m3");
        } else if (rh) {
            const double percent = require_number(*channel, "channel", "relative_humidity_percent");
            if (percent < 0.0 || percent > 100.0)
                bad_key("channel.relative_humidity_percent", "must lie in [0, 100]");
            atm.water_vapor_density_g_m3 =
                water_vapor_density_from_rh(percent / 100.0, atm.temperature_k);
        } else {
            bad_key("channel.water_vapor_density_g_m3",
                    "missing (or give relative_humidity_percent)");
        }

        const std::string content = read_text_file(path);
        rc.input_digests[path.string()] = fnv1a64(content.data(), content.size());
        std::istringstream stream(content);
        CatalogOptions opts;
        opts.cutoff_hz = cutoff_thz * 1e12;
        CatalogChannelSpec spec;
        spec.lines = load_line_catalog(stream, opts);
        spec.atmosphere = atm;
        rc.sim.channel = std::move(spec);

        chan_out["catalog_path"] = path.string();
        chan_out["cutoff_thz"] = cutoff_thz;
        chan_out["temperature_c"] = temp_c;
        chan_out["pressure_hpa"] = pressure_hpa;
        chan_out["water_vapor_density_g_m3"] = atm.water_vapor_density_g_m3;
    } else if (kind == "polynomial") {
        const auto* coeffs = find(*channel, "phase_coefficients_rad_sn");
        if (!coeffs || !coeffs->is_array())
            bad_key("channel.phase_coefficients_rad_sn", "missing or not an array");
        PolynomialChannelSpec spec;
        for (const auto& v : *coeffs) {
            if (!v.is_number())
                bad_key("channel.phase_coefficients_rad_sn", "entries must be numbers");
            spec.coefficients.coefficients.push_back(v.get<double>());
        }
        while (spec.coefficients.coefficients.size() < 3)
            spec.coefficients.coefficients.push_back(0.0);
        const double f0_ghz =
            opt_number(*channel, "channel", "expansion_frequency_ghz", carrier_ghz);
        spec.coefficients.omega0_rad_s = 2.0 * std::numbers::pi * f0_ghz * 1e9;
        spec.attenuation_db = opt_number(*channel, "channel", "attenuation_db", 0.0);
        const auto* per_km = find(*channel, "per_km");
        spec.per_km = per_km && per_km->is_boolean() ? per_km->get<bool>() : false;

        chan_out["phase_coefficients_rad_sn"] = spec.coefficients.coefficients;
        chan_out["expansion_frequency_ghz"] = f0_ghz;
        chan_out["attenuation_db"] = spec.attenuation_db;
        chan_out["per_km"] = spec.per_km;
        rc.sim.channel = std::move(spec);
    } else if (kind == "import") {
        const std::string raw_path = opt_string(*channel, "channel", "import_path", "");
        if (raw_path.empty())
            bad_key("channel.import_path", "missing");
        const auto path = resolve_path(raw_path, base_dir);
        const std::string content = read_text_file(path);
        rc.input_digests[path.string()] = fnv1a64(content.data(), content.size());
        std::istringstream stream(content);
        ImportedChannelSpec spec;
        spec.table = import_transfer_function(stream);
        rc.sim.channel = std::move(spec);
        chan_out["import_path"] = path.string();
    } else {
        bad_key("channel.kind", "must be identity|catalog|polynomial|import");
    }
    out["channel"] = chan_out;

    // ---- snr ----
    rc.snr_points.clear();
    ordered_json snr_out;
    if (const auto* snr = find(config, "snr"); snr && snr->is_object()) {
        const auto* infinite = find(*snr, "infinite");
        if (infinite && infinite->is_boolean() && infinite->get<bool>()) {
            rc.snr_points.push_back(SnrPoint::infinite());
            snr_out["infinite"] = true;
        } else if (const auto* db = find(*snr, "db")) {
            if (db->is_number()) {
                rc.snr_points.push_back(SnrPoint::from_db(db->get<double>()));
            } else if (db->is_array()) {
                for (const auto& v : *db) {
                    if (!v.is_number())
                        bad_key("snr.db", "entries must be numbers");
                    rc.snr_points.push_back(SnrPoint::from_db(v.get<double>()));
                }
            } else {
                bad_key("snr.db", "must be a number or an array");
            }
            if (rc.snr_points.empty())
                bad_key("snr.db", "must not be empty");
        } else {
            bad_key("snr", "needs 'db' or 'infinite'");
        }
    } else {
        rc.snr_points.push_back(SnrPoint::from_db(10.0));
    }
    if (!snr_out.contains("infinite")) {
        std::vector<double> dbs;
        for (const auto& s : rc.snr_points)
            dbs.push_back(s.db());
        snr_out["db"] = dbs;
    }
    out["snr"] = snr_out;
    rc.sim.snr = rc.snr_points.front();

    // ---- montecarlo ----
    ordered_json mc_out;
    {
        static const ordered_json empty = ordered_json::object();
        const auto* mc = find(config, "montecarlo");
        const ordered_json& m = mc && mc->is_object() ? *mc : empty;
        rc.sim.frame_bits = static_cast<int>(opt_integer(m, "montecarlo", "frame_bits", 4000));
        rc.sim.frame_count = static_cast<int>(opt_integer(m, "montecarlo", "frame_count", 2000));
        rc.sim.samples_per_symbol =
            static_cast<int>(opt_integer(m, "montecarlo", "samples_per_symbol", 8));
        rc.sim.rng_seed = static_cast<std::uint64_t>(opt_integer(m, "montecarlo", "seed", 1));
        mc_out["frame_bits"] = rc.sim.frame_bits;
        mc_out["frame_count"] = rc.sim.frame_count;
        mc_out["samples_per_symbol"] = rc.sim.samples_per_symbol;
        mc_out["seed"] = rc.sim.rng_seed;
    }
    out["montecarlo"] = mc_out;

    // ---- grid ----
    {
        static const ordered_json empty = ordered_json::object();
        const auto* grid = find(config, "grid");
        const ordered_json& g = grid && grid->is_object() ? *grid : empty;
        const auto count = opt_integer(g, "grid", "count", 32768);
        if (count < 16)
            bad_key("grid.count", "must be >= 16");
        rc.grid_count = static_cast<std::size_t>(count);
        out["grid"] = {{"count", count}};
    }

    // ---- fit ----
    {
        static const ordered_json empty = ordered_json::object();
        const auto* fit = find(config, "fit");
        const ordered_json& f = fit && fit->is_object() ? *fit : empty;
        rc.fit.order = static_cast<int>(opt_integer(f, "fit", "order", 4));
        if (rc.fit.order < 2)
            bad_key("fit.order", "must be >= 2");
        rc.fit.window_halfwidth_hz = opt_number(f, "fit", "window_ghz", 0.0) * 1e9;
        out["fit"] = {{"order", rc.fit.order},
                      {"window_ghz", rc.fit.window_halfwidth_hz / 1e9}};
    }

    // ---- sweep ----
    if (const auto* sweep = find(config, "sweep"); sweep && sweep->is_object()) {
        SweepSection s;
        const std::string variable = opt_string(*sweep, "sweep", "variable", "distance");
        std::string suffix;
        double to_si = 1.0;
        if (variable == "distance") {
            s.variable = SweepVariable::distance;
            suffix = "_km";
            to_si = 1000.0;
        } else if (variable == "snr") {
            s.variable = SweepVariable::snr;
            suffix = "_db";
        } else if (variable == "symbol_rate") {
            s.variable = SweepVariable::symbol_rate;
            suffix = "_gbd";
            to_si = 1e9;
        } else {
            bad_key("sweep.variable", "must be distance|snr|symbol_rate");
        }
        s.start = require_number(*sweep, "sweep", "start" + suffix) * to_si;
        s.stop = require_number(*sweep, "sweep", "stop" + suffix) * to_si;
        s.step = require_number(*sweep, "sweep", "step" + suffix) * to_si;
        const std::string engine = opt_string(*sweep, "sweep", "engine", "both");
        if (engine == "model")
            s.engine = SweepEngine::model;
        else if (engine == "mc")
            s.engine = SweepEngine::montecarlo;
        else if (engine == "both")
            s.engine = SweepEngine::both;
        else
            bad_key("sweep.engine", "must be model|mc|both");
        ordered_json sweep_out;
        sweep_out["variable"] = variable;
        sweep_out["start" + suffix] = s.start / to_si;
        sweep_out["stop" + suffix] = s.stop / to_si;
        sweep_out["step" + suffix] = s.step / to_si;
        sweep_out["engine"] = engine;
        if (const auto* rates = find(*sweep, "symbol_rates_gbd")) {
            if (!rates->is_array())
                bad_key("sweep.symbol_rates_gbd", "must be an array");
            std::vector<double> out_rates;
            for (const auto& v : *rates) {
                if (!v.is_number())
                    bad_key("sweep.symbol_rates_gbd", "entries must be numbers");
                s.symbol_rates_bd.push_back(v.get<double>() * 1e9);
                out_rates.push_back(v.get<double>());
            }
            sweep_out["symbol_rates_gbd"] = out_rates;
        }
        out["sweep"] = sweep_out;
        rc.sweep = std::move(s);
    }

    // ---- limit ----
    {
        static const ordered_json empty = ordered_json::object();
        const auto* limit = find(config, "limit");
        const ordered_json& l = limit && limit->is_object() ? *limit : empty;
        rc.limit.threshold_ser = opt_number(l, "limit", "threshold_ser", 1e-6);
        rc.limit.range_start_m = opt_number(l, "limit", "range_start_km", 0.1) * 1000.0;
        rc.limit.range_stop_m = opt_number(l, "limit", "range_stop_km", 40.0) * 1000.0;
        out["limit"] = {{"threshold_ser", rc.limit.threshold_ser},
                        {"range_start_km", rc.limit.range_start_m / 1000.0},
                        {"range_stop_km", rc.limit.range_stop_m / 1000.0}};
    }

    rc.sim.validate();
    rc.materialized = std::move(out);
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& config_path)
{
    const std::string content = read_text_file(config_path);
    ordered_json j;
    try {
        j = ordered_json::parse(content);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse '" + config_path.string() + "': " + e.what());
    }
    auto rc = parse_run_config(j, std::filesystem::absolute(config_path).parent_path());
    rc.input_digests[std::filesystem::absolute(config_path).string()] =
        fnv1a64(content.data(), content.size());
    return rc;
}

} // namespace gvdlink
