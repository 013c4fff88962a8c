// SPDX-License-Identifier: Apache-2.0

#include "gvdlink/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "gvdlink/errors.hpp"

namespace gvdlink {

std::uint64_t fnv1a64(const void* data, std::size_t size)
{
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t file_digest(const std::filesystem::path& path)
{
    const std::string content = read_text_file(path);
    return fnv1a64(content.data(), content.size());
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
        throw IoError("read failure on '" + path.string() + "'");
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out)
        throw IoError("write failure on '" + path.string() + "'");
}

std::string format_double(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string ser_curve_csv(const SerCurve& curve)
{
    bool with_ci = false;
    for (const auto& p : curve.points)
        if (std::isfinite(p.ci_low) || std::isfinite(p.ci_high))
            with_ci = true;

    std::ostringstream out;
    out << (curve.x_name.empty() ? "x" : curve.x_name) << ",ser";
    if (with_ci)
        out << ",ci_low,ci_high";
    out << "\n";
    for (const auto& p : curve.points) {
        out << format_double(p.x) << "," << format_double(p.ser);
        if (with_ci)
            out << "," << format_double(p.ci_low) << "," << format_double(p.ci_high);
        out << "\n";
    }
    return out.str();
}

std::string current_timestamp_utc()
{
    std::time_t t;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env)
        t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
    else
        t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ordered_json RunManifest::to_json() const
{
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    j["timestamp_utc"] = current_timestamp_utc();
    j["rng_seed"] = rng_seed;
    j["config"] = resolved_config;
    ordered_json inputs = ordered_json::object();
    for (const auto& [path, digest] : input_digests) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(digest));
        inputs[path] = buf;
    }
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    return j;
}

} // namespace gvdlink
