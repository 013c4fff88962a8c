// SPDX-License-Identifier: Apache-2.0

#include "gvdlink/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gvdlink {

namespace {

constexpr double kSpeedOfLight = 299792458.0; // m/s
constexpr double kReferenceTemperatureK = 300.0;
constexpr double kO2DryAirFraction = 0.20946;
constexpr double kGasConstantWaterVapor = 461.522; // J/(kg K)

// Per-line state realized for one atmosphere.
struct RealizedLine {
    double nu0_ghz;
    double strength_khz;
    double width_ghz;
};

std::vector<RealizedLine> realize_lines(std::span<const SpectralLine> lines,
                                        const AtmosphereState& atm)
{
    if (atm.temperature_k <= 0.0 || atm.pressure_pa <= 0.0 || atm.water_vapor_density_g_m3 < 0.0)
        throw DomainError("atmosphere state out of range");

    const double theta = kReferenceTemperatureK / atm.temperature_k;
    const double e_wv_hpa = water_vapor_partial_pressure_pa(atm) / 100.0;
    const double p_total_hpa = atm.pressure_pa / 100.0;
    if (e_wv_hpa > p_total_hpa)
        throw DomainError("water vapor partial pressure exceeds total pressure");
    const double p_dry_hpa = p_total_hpa - e_wv_hpa;

    std::vector<RealizedLine> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        const bool water = line.species == Species::h2o;
        const double p_self = water ? e_wv_hpa : kO2DryAirFraction * p_dry_hpa;
        const double p_foreign = p_total_hpa - p_self;
        const double kappa = water ? 3.5 : 3.0;
        RealizedLine r;
        r.nu0_ghz = line.center_frequency_hz * 1e-9;
        r.strength_khz = line.intensity * p_self * std::pow(theta, kappa) *
                         std::exp(line.lower_state_energy * (1.0 - theta));
        r.width_ghz = 1e-3 * std::pow(theta, line.temperature_exponent) *
                      (line.air_broadening_mhz_per_hpa * p_foreign +
                       line.self_broadening_mhz_per_hpa * p_self);
        out.push_back(r);
    }
    return out;
}

// van Vleck-Weisskopf complex refractivity (ppm) at nu_ghz, fixed order.
cplx refractivity_at(const std::vector<RealizedLine>& lines, double nu_ghz)
{
    cplx n{0.0, 0.0};
    for (const auto& l : lines) {
        const cplx lo{l.nu0_ghz - nu_ghz, -l.width_ghz};
        const cplx hi{l.nu0_ghz + nu_ghz, l.width_ghz};
        n += l.strength_khz * (nu_ghz / l.nu0_ghz) * (1.0 / lo - 1.0 / hi);
    }
    return n;
}

cplx exponent_from_refractivity(cplx n_ppm, double freq_hz)
{
    const double k0 = 2.0 * std::numbers::pi * freq_hz / kSpeedOfLight;
    return {k0 * 1e-6 * n_ppm.imag(), k0 * 1e-6 * n_ppm.real()};
}

// Small dense solver (partial pivoting) for the Taylor fit normal equations.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                piv = r;
        if (a[piv][col] == 0.0)
            throw NumericError("singular system in Taylor fit");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c)
            s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

} // namespace

// ---------------------------------------------------------------------------
// FrequencyGrid
// ---------------------------------------------------------------------------

void FrequencyGrid::validate() const
{
    if (step_hz <= 0.0 || count < 2)
        throw DomainError("frequency grid needs step > 0 and count >= 2");
}

FrequencyGrid FrequencyGrid::around_carrier(double carrier_hz, double occupied_bandwidth_hz,
                                            std::size_t count)
{
    if (carrier_hz <= 0.0 || occupied_bandwidth_hz <= 0.0 || count < 2)
        throw DomainError("carrier, bandwidth and count must be positive");
    if (carrier_hz <= occupied_bandwidth_hz / 2.0)
        throw DomainError("occupied band extends to nonpositive frequencies");
    double span = 8.0 * occupied_bandwidth_hz;
    span = std::min(span, 1.96 * carrier_hz); // keep the grid strictly positive
    FrequencyGrid g;
    g.count = count;
    g.step_hz = span / static_cast<double>(count);
    g.start_hz = carrier_hz - g.step_hz * static_cast<double>(count / 2);
    g.validate();
    if (g.start_hz <= 0.0)
        throw DomainError("grid extends to nonpositive frequencies");
    return g;
}

double PhaseTaylorCoefficients::phase_at(double omega_rad_s) const
{
    const double x = omega_rad_s - omega0_rad_s;
    double phi = 0.0;
    double factorial = 1.0;
    double power = 1.0;
    for (std::size_t n = 0; n < coefficients.size(); ++n) {
        if (n > 0) {
            factorial *= static_cast<double>(n);
            power *= x;
        }
        phi += coefficients[n] * power / factorial;
    }
    return phi;
}

// ---------------------------------------------------------------------------
// Catalog ingestion
// ---------------------------------------------------------------------------

std::vector<SpectralLine> load_line_catalog(std::istream& source, const CatalogOptions& options)
{
    std::vector<SpectralLine> lines;
    std::string text;
    long row = 0;
    bool header_seen = false;
    Species current = Species::h2o;

    while (std::getline(source, text)) {
        ++row;
        // trim
        const auto begin = text.find_first_not_of(" \t\r");
        if (begin == std::string::npos)
            continue;
        const auto end = text.find_last_not_of(" \t\r");
        std::string trimmed = text.substr(begin, end - begin + 1);

        if (!header_seen) {
            if (trimmed != "#gvdlink-catalog v1")
                throw ParseError("missing '#gvdlink-catalog v1' header", row);
            header_seen = true;
            continue;
        }
        if (trimmed[0] == '#') {
            std::istringstream directive(trimmed.substr(1));
            std::string word;
            directive >> word;
            if (word == "species") {
                std::string name;
                directive >> name;
                if (name == "h2o")
                    current = Species::h2o;
                else if (name == "o2")
                    current = Species::o2;
                else
                    throw ParseError("unknown species '" + name + "'", row);
            }
            continue;
        }

        std::istringstream fields(trimmed);
        double f_ghz, intensity, air_b, self_b, n_t, e_l;
        if (!(fields >> f_ghz >> intensity >> air_b >> self_b >> n_t >> e_l))
            throw ParseError("expected 6 numeric columns", row);
        std::string extra;
        if (fields >> extra)
            throw ParseError("trailing content '" + extra + "'", row);
        if (f_ghz <= 0.0)
            throw ParseError("center frequency must be positive", row);
        if (intensity < 0.0)
            throw ParseError("line intensity must be nonnegative", row);
        if (air_b <= 0.0 || self_b <= 0.0)
            throw ParseError("broadening coefficients must be positive", row);

        SpectralLine line;
        line.center_frequency_hz = f_ghz * 1e9;
        line.intensity = intensity;
        line.air_broadening_mhz_per_hpa = air_b;
        line.self_broadening_mhz_per_hpa = self_b;
        line.temperature_exponent = n_t;
        line.lower_state_energy = e_l;
        line.species = current;
        lines.push_back(line);
    }
    if (!header_seen)
        throw ParseError("missing '#gvdlink-catalog v1' header", std::max(row, 1L));
    if (lines.empty())
        throw EmptyCatalogError();

    std::erase_if(lines, [&](const SpectralLine& l) {
        return l.center_frequency_hz > options.cutoff_hz;
    });
    return lines;
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

std::vector<cplx> propagation_exponent(std::span<const SpectralLine> lines,
                                       const AtmosphereState& atm,
                                       std::span<const double> freqs_hz, Exec exec)
{
    const auto realized = realize_lines(lines, atm);
    std::vector<cplx> gamma(freqs_hz.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(freqs_hz.size());
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            gamma[i] = exponent_from_refractivity(refractivity_at(realized, freqs_hz[i] * 1e-9),
                                                  freqs_hz[i]);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            gamma[i] = exponent_from_refractivity(refractivity_at(realized, freqs_hz[i] * 1e-9),
                                                  freqs_hz[i]);
    }
    return gamma;
}

namespace reference {

std::vector<cplx> propagation_exponent_serial(std::span<const SpectralLine> lines,
                                              const AtmosphereState& atm,
                                              std::span<const double> freqs_hz)
{
    const auto realized = realize_lines(lines, atm);
    std::vector<cplx> gamma(freqs_hz.size());
    for (std::size_t i = 0; i < freqs_hz.size(); ++i)
        gamma[i] = exponent_from_refractivity(refractivity_at(realized, freqs_hz[i] * 1e-9),
                                              freqs_hz[i]);
    return gamma;
}

} // namespace reference

ChannelTransferFunction synthesize_transfer_function(std::span<const SpectralLine> lines,
                                                     const AtmosphereState& atm,
                                                     const FrequencyGrid& grid,
                                                     double path_length_m, Exec exec)
{
    grid.validate();
    if (grid.start_hz <= 0.0)
        throw DomainError("grid extends to nonpositive frequencies");
    if (lines.empty())
        throw DomainError("line list is empty");
    if (path_length_m < 0.0)
        throw DomainError("path length must be nonnegative");

    ChannelTransferFunction tf;
    tf.grid = grid;
    tf.path_length_m = path_length_m;
    tf.values.resize(grid.count);
    if (path_length_m == 0.0) {
        std::fill(tf.values.begin(), tf.values.end(), cplx{1.0, 0.0});
        return tf;
    }
    std::vector<double> freqs(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i)
        freqs[i] = grid.frequency(i);
    const auto gamma = propagation_exponent(lines, atm, freqs, exec);
    for (std::size_t i = 0; i < grid.count; ++i)
        tf.values[i] = std::exp(-gamma[i] * path_length_m);
    return tf;
}

ChannelTransferFunction polynomial_phase_channel(const PhaseTaylorCoefficients& coeffs,
                                                 double attenuation_db, const FrequencyGrid& grid)
{
    grid.validate();
    const double f0 = coeffs.omega0_rad_s / (2.0 * std::numbers::pi);
    if (f0 < grid.start_hz || f0 > grid.end_hz())
        throw DomainError("grid does not cover the expansion frequency");
    const double amplitude = std::pow(10.0, -attenuation_db / 20.0);
    ChannelTransferFunction tf;
    tf.grid = grid;
    tf.values.resize(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double omega = 2.0 * std::numbers::pi * grid.frequency(i);
        const double phi = coeffs.phase_at(omega);
        tf.values[i] = amplitude * cplx{std::cos(phi), -std::sin(phi)};
    }
    return tf;
}

// ---------------------------------------------------------------------------
// Phase analysis
// ---------------------------------------------------------------------------

PhaseTaylorCoefficients fit_taylor_coefficients(const ChannelTransferFunction& tf,
                                                double omega0_rad_s, int order,
                                                const TaylorFitOptions& options)
{
    tf.grid.validate();
    if (order < 2)
        throw DomainError("Taylor fit order must be >= 2");
    const double f0 = omega0_rad_s / (2.0 * std::numbers::pi);
    if (f0 < tf.grid.start_hz || f0 > tf.grid.end_hz())
        throw DomainError("expansion frequency outside the grid");

    const double halfwidth =
        options.window_halfwidth_rad_s > 0.0 ? options.window_halfwidth_rad_s
                                             : std::numeric_limits<double>::infinity();
    std::size_t lo = tf.grid.count, hi = 0;
    for (std::size_t i = 0; i < tf.grid.count; ++i) {
        const double omega = 2.0 * std::numbers::pi * tf.grid.frequency(i);
        if (std::abs(omega - omega0_rad_s) <= halfwidth) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    if (lo > hi || hi - lo + 1 < static_cast<std::size_t>(order) + 2)
        throw DomainError("fit window holds too few grid points for the requested order");

    // unwrap phi = -arg(H) across the window
    const std::size_t n = hi - lo + 1;
    std::vector<double> phi(n), omega(n);
    double prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        omega[k] = 2.0 * std::numbers::pi * tf.grid.frequency(lo + k);
        double p = -std::arg(tf.values[lo + k]);
        if (k > 0) {
            p -= 2.0 * std::numbers::pi * std::round((p - prev) / (2.0 * std::numbers::pi));
            const double step = std::abs(p - prev);
            if (step > std::numbers::pi * options.unwrap_margin)
                throw NumericError("phase unwrap failed: step of " + std::to_string(step) +
                                   " rad between adjacent grid points; use a finer grid");
        }
        phi[k] = p;
        prev = p;
    }

    // least squares on the scaled offset u = (omega - omega0) / scale
    double scale = 0.0;
    for (double w : omega)
        scale = std::max(scale, std::abs(w - omega0_rad_s));
    if (scale == 0.0)
        throw DomainError("degenerate fit window");
    const std::size_t terms = static_cast<std::size_t>(order) + 1;
    std::vector<double> pow_sums(2 * terms - 1, 0.0);
    std::vector<double> rhs(terms, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = (omega[k] - omega0_rad_s) / scale;
        double up = 1.0;
        for (std::size_t d = 0; d < pow_sums.size(); ++d) {
            pow_sums[d] += up;
            if (d < terms)
                rhs[d] += up * phi[k];
            up *= u;
        }
    }
    std::vector<std::vector<double>> gram(terms, std::vector<double>(terms));
    for (std::size_t a = 0; a < terms; ++a)
        for (std::size_t b = 0; b < terms; ++b)
            gram[a][b] = pow_sums[a + b];
    const auto c = solve_linear(std::move(gram), std::move(rhs));

    PhaseTaylorCoefficients result;
    result.omega0_rad_s = omega0_rad_s;
    result.coefficients.resize(terms);
    double factorial = 1.0;
    double scale_pow = 1.0;
    for (std::size_t k = 0; k < terms; ++k) {
        if (k > 0) {
            factorial *= static_cast<double>(k);
            scale_pow *= scale;
        }
        result.coefficients[k] = c[k] * factorial / scale_pow;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Import / export
// ---------------------------------------------------------------------------

ChannelTransferFunction import_transfer_function(std::istream& source)
{
    std::vector<double> freqs;
    std::vector<cplx> values;
    std::string text;
    long row = 0;
    while (std::getline(source, text)) {
        ++row;
        if (text.empty() || text == "\r")
            continue;
        if (row == 1 && text.find("frequency") != std::string::npos)
            continue; // optional header
        std::istringstream fields(text);
        std::string cell;
        double v[3];
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(fields, cell, i < 2 ? ',' : '\n'))
                throw ParseError("expected 'frequency_hz,real,imag'", row);
            try {
                v[i] = std::stod(cell);
            } catch (const std::exception&) {
                throw ParseError("bad numeric value '" + cell + "'", row);
            }
        }
        freqs.push_back(v[0]);
        values.emplace_back(v[1], v[2]);
    }
    if (freqs.size() < 2)
        throw ParseError("transfer function table needs at least 2 rows");

    const double step = (freqs.back() - freqs.front()) / static_cast<double>(freqs.size() - 1);
    if (step <= 0.0)
        throw ParseError("frequencies must increase");
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const double expected = freqs.front() + step * static_cast<double>(i);
        if (std::abs(freqs[i] - expected) > 1e-6 * step)
            throw ParseError("non-uniform grid spacing at row " + std::to_string(i + 1) +
                             " exceeds 1 ppm of the step");
    }
    ChannelTransferFunction tf;
    tf.grid = {freqs.front(), step, freqs.size()};
    tf.values = std::move(values);
    return tf;
}

void export_transfer_function(const ChannelTransferFunction& tf, std::ostream& out)
{
    out << "frequency_hz,real,imag\n";
    char buf[96];
    for (std::size_t i = 0; i < tf.grid.count; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", tf.grid.frequency(i),
                      tf.values[i].real(), tf.values[i].imag());
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// PreparedChannel
// ---------------------------------------------------------------------------

namespace {

cplx catmull_rom(const std::vector<cplx>& v, double x)
{
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    const std::ptrdiff_t i = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(std::floor(x)), 0, n - 2);
    const double t = x - static_cast<double>(i);
    const cplx p0 = v[std::max<std::ptrdiff_t>(i - 1, 0)];
    const cplx p1 = v[i];
    const cplx p2 = v[i + 1];
    const cplx p3 = v[std::min<std::ptrdiff_t>(i + 2, n - 1)];
    const cplx a = 2.0 * p1;
    const cplx b = p2 - p0;
    const cplx c = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
    const cplx d = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
    return 0.5 * (a + b * t + c * t * t + d * t * t * t);
}

} // namespace

PreparedChannel::PreparedChannel(const ChannelSpec& spec, std::vector<double> freqs_hz, Exec exec)
    : freqs_(std::move(freqs_hz))
{
    base_.resize(freqs_.size());
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, IdentityChannelSpec>) {
                std::fill(base_.begin(), base_.end(), cplx{1.0, 0.0});
                scalable_ = false;
            } else if constexpr (std::is_same_v<T, CatalogChannelSpec>) {
                if (s.lines.empty())
                    throw DomainError("line list is empty");
                for (double f : freqs_)
                    if (f <= 0.0)
                        throw DomainError("catalog channel evaluated at nonpositive frequency");
                base_ = propagation_exponent(s.lines, s.atmosphere, freqs_, exec);
                scalable_ = true;
            } else if constexpr (std::is_same_v<T, PolynomialChannelSpec>) {
                const double alpha_np =
                    std::log(10.0) * s.attenuation_db / 20.0; // field nepers
                for (std::size_t i = 0; i < freqs_.size(); ++i) {
                    const double omega = 2.0 * std::numbers::pi * freqs_[i];
                    const double phi = s.coefficients.phase_at(omega);
                    if (s.per_km) {
                        base_[i] = cplx{alpha_np, phi} / 1000.0; // per meter
                    } else {
                        base_[i] = std::exp(cplx{-alpha_np, -phi});
                    }
                }
                scalable_ = s.per_km;
            } else if constexpr (std::is_same_v<T, ImportedChannelSpec>) {
                const auto& g = s.table.grid;
                g.validate();
                for (std::size_t i = 0; i < freqs_.size(); ++i) {
                    const double x = (freqs_[i] - g.start_hz) / g.step_hz;
                    if (x < -1e-9 || x > static_cast<double>(g.count - 1) + 1e-9)
                        throw DomainError("requested frequency outside the imported table");
                    base_[i] = catmull_rom(s.table.values, x);
                }
                scalable_ = false;
            }
        },
        spec);
}

void PreparedChannel::transfer(double path_length_m, std::span<cplx> out) const
{
    if (out.size() != base_.size())
        throw DomainError("output span size mismatch");
    if (path_length_m < 0.0)
        throw DomainError("path length must be nonnegative");
    if (!scalable_) {
        std::copy(base_.begin(), base_.end(), out.begin());
        return;
    }
    if (path_length_m == 0.0) {
        std::fill(out.begin(), out.end(), cplx{1.0, 0.0});
        return;
    }
    for (std::size_t i = 0; i < base_.size(); ++i)
        out[i] = std::exp(-base_[i] * path_length_m);
}

std::vector<cplx> PreparedChannel::transfer(double path_length_m) const
{
    std::vector<cplx> out(base_.size());
    transfer(path_length_m, out);
    return out;
}

ChannelTransferFunction make_transfer_function(const ChannelSpec& spec, const FrequencyGrid& grid,
                                               double path_length_m, Exec exec)
{
    grid.validate();
    std::vector<double> freqs(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i)
        freqs[i] = grid.frequency(i);
    PreparedChannel prepared(spec, std::move(freqs), exec);
    ChannelTransferFunction tf;
    tf.grid = grid;
    tf.values = prepared.transfer(path_length_m);
    if (prepared.distance_scalable())
        tf.path_length_m = path_length_m;
    return tf;
}

// ---------------------------------------------------------------------------
// Moist-air helpers
// ---------------------------------------------------------------------------

double saturation_vapor_pressure_pa(double temperature_k)
{
    if (temperature_k <= 0.0)
        throw DomainError("temperature must be positive");
    const double t = temperature_k - 273.15; // Buck 1981, over liquid water
    return 611.21 * std::exp((18.678 - t / 234.5) * (t / (257.14 + t)));
}

double water_vapor_density_from_rh(double relative_humidity, double temperature_k)
{
    if (relative_humidity < 0.0 || relative_humidity > 1.0)
        throw DomainError("relative humidity must be within [0, 1]");
    const double e = relative_humidity * saturation_vapor_pressure_pa(temperature_k);
    return 1000.0 * e / (kGasConstantWaterVapor * temperature_k);
}

double water_vapor_partial_pressure_pa(const AtmosphereState& atm)
{
    return atm.water_vapor_density_g_m3 * 1e-3 * kGasConstantWaterVapor * atm.temperature_k;
}

} // namespace gvdlink
