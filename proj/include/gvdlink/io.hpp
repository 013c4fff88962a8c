// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gvdlink/sermodel.hpp"

namespace gvdlink {

inline constexpr const char* kToolName = "gvdlink";
inline constexpr const char* kToolVersion = "1.0.0";

using ordered_json = nlohmann::ordered_json;

/// FNV-1a 64-bit content digest (manifest bookkeeping, not security).
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t file_digest(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// "%.17g" formatting; round-trips doubles exactly.
std::string format_double(double v);

/// CSV for a SER curve: `<x_name>,ser` plus ci_low/ci_high columns when the
/// curve carries confidence intervals.
std::string ser_curve_csv(const SerCurve& curve);

/// Reproducibility record paired with every output file set. The timestamp
/// honors SOURCE_DATE_EPOCH so archived runs compare byte for byte.
struct RunManifest {
    std::string command;
    std::uint64_t rng_seed = 0;
    ordered_json resolved_config;
    std::map<std::string, std::uint64_t> input_digests;
    std::vector<std::string> outputs;

    ordered_json to_json() const;
};

std::string current_timestamp_utc();

} // namespace gvdlink
