// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include "gvdlink/io.hpp"
#include "gvdlink/sweep.hpp"

namespace gvdlink {

/// Taylor-report settings for the `channel` command.
struct FitConfig {
    int order = 4;
    /// 0 means the default window of 1.5x the occupied signal bandwidth.
    double window_halfwidth_hz = 0.0;
};

struct LimitConfig {
    double threshold_ser = 1e-6;
    double range_start_m = 100.0;
    double range_stop_m = 40000.0;
};

struct SweepSection {
    SweepVariable variable = SweepVariable::distance;
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
    SweepEngine engine = SweepEngine::both;
    /// Optional multi-curve bundle: one distance sweep per symbol rate.
    std::vector<double> symbol_rates_bd;
};

/// Everything a CLI command needs, resolved from one JSON config file.
/// Physical quantities carry explicit unit suffixes in their key names
/// (carrier_ghz, distance_km, ...); this struct is SI.
struct RunConfig {
    SimulationConfig sim;
    /// link.distance_km may be a single number or a list; sim.path_length_m
    /// holds the first entry.
    std::vector<double> distances_m{0.0};
    std::vector<SnrPoint> snr_points{SnrPoint::from_db(10.0)};
    std::size_t grid_count = 32768;
    FitConfig fit;
    std::optional<SweepSection> sweep;
    LimitConfig limit;

    std::map<std::string, std::uint64_t> input_digests;
    ordered_json materialized;
};

RunConfig parse_run_config(const ordered_json& config, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& config_path);

} // namespace gvdlink
