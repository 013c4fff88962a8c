// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gvdlink/errors.hpp"
#include "gvdlink/exec.hpp"

namespace gvdlink {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class Species { h2o, o2 };

/// One molecular resonance from the line catalog.
struct SpectralLine {
    double center_frequency_hz = 0.0;
    /// Line strength coefficient, catalog-native units: kHz of complex
    /// refractivity (in ppm/GHz shape units) per hPa of species partial
    /// pressure at the 300 K reference temperature.
    double intensity = 0.0;
    double air_broadening_mhz_per_hpa = 0.0;
    double self_broadening_mhz_per_hpa = 0.0;
    /// Temperature exponent of the pressure-broadened width.
    double temperature_exponent = 0.0;
    /// Temperature coefficient of the line strength, catalog-native
    /// (dimensionless factor in exp(E_l * (1 - 300/T))).
    double lower_state_energy = 0.0;
    Species species = Species::h2o;
};

struct AtmosphereState {
    double temperature_k = 293.15;
    double pressure_pa = 101325.0;
    double water_vapor_density_g_m3 = 0.0;
};

/// Uniform frequency grid. `span()` is step * count (the FFT aperture), so
/// the impulse-response time step downstream is 1 / span().
struct FrequencyGrid {
    double start_hz = 0.0;
    double step_hz = 0.0;
    std::size_t count = 0;

    double frequency(std::size_t i) const { return start_hz + step_hz * static_cast<double>(i); }
    double span_hz() const { return step_hz * static_cast<double>(count); }
    double end_hz() const { return frequency(count - 1); }

    bool operator==(const FrequencyGrid&) const = default;

    void validate() const;

    /// Grid centered on `carrier_hz` so that the carrier coincides with bin
    /// count/2 exactly. The span targets 8x the occupied bandwidth but is
    /// clamped to keep all frequencies positive.
    static FrequencyGrid around_carrier(double carrier_hz, double occupied_bandwidth_hz,
                                        std::size_t count = 32768);
};

/// Complex channel transfer function H(f) = alpha(f) * exp(-j phi(f)) on a
/// uniform grid. alpha is field (not power) attenuation. Catalog-derived
/// functions carry their path length; synthetic/imported ones do not.
struct ChannelTransferFunction {
    FrequencyGrid grid;
    std::vector<cplx> values;
    std::optional<double> path_length_m;

    double attenuation(std::size_t i) const { return std::abs(values[i]); }
    double phase(std::size_t i) const { return -std::arg(values[i]); }
};

/// Taylor coefficients of the channel phase about omega0:
/// phi(omega) = sum_n phi_n (omega - omega0)^n / n!, phi_n in rad*s^n.
/// phi2 is the group delay dispersion.
struct PhaseTaylorCoefficients {
    double omega0_rad_s = 0.0;
    std::vector<double> coefficients; // phi_0, phi_1, phi_2, ...

    double phi2() const { return coefficients.size() > 2 ? coefficients[2] : 0.0; }
    double phase_at(double omega_rad_s) const;
};

// ---------------------------------------------------------------------------
// Catalog ingestion
// ---------------------------------------------------------------------------

struct CatalogOptions {
    /// Resonances above the cutoff are dropped on load.
    double cutoff_hz = 5e12;
};

/// Parse the `#gvdlink-catalog v1` columnar format:
///   center_frequency_GHz intensity air_broadening_MHz_per_hPa
///   self_broadening_MHz_per_hPa temperature_exponent lower_state_energy
/// `#` starts a comment; the directive comment `#species h2o|o2` switches the
/// species attributed to subsequent rows (default h2o).
std::vector<SpectralLine> load_line_catalog(std::istream& source,
                                            const CatalogOptions& options = {});

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------
//
// Atmospheric response per line: a van Vleck-Weisskopf collision-broadened
// lineshape with pressure/temperature scaling,
//
//   theta   = 300 K / T
//   p_self  = species partial pressure [hPa]  (h2o: vapor pressure,
//             o2: 0.20946 * dry-air pressure)
//   S       = intensity * p_self * theta^kappa * exp(E_l * (1 - theta)),
//             kappa = 3.5 (h2o) or 3.0 (o2)                       [kHz]
//   gamma_w = 1e-3 * theta^n_w * (air_b * p_foreign + self_b * p_self) [GHz]
//   F(nu)   = (nu/nu0) * [ 1/(nu0 - nu - j gamma_w)
//                        - 1/(nu0 + nu + j gamma_w) ]             [1/GHz]
//
// Complex refractivity N(nu) = sum S * F(nu) (ppm; Im N >= 0 absorbs), and
// the per-meter propagation exponent is
//
//   gamma(nu) = (omega/c) * 1e-6 * (Im N + j Re N),   H = exp(-gamma * L).
//
// The vacuum delay term omega*L/c is omitted: it is a pure delay (phi_0 and
// phi_1 only) with no effect on signal reshaping, and keeping it would put
// astronomically steep linear phase on the grid.

/// Per-meter propagation exponent for a line catalog at a frequency list.
/// H(f; L) = exp(-gamma(f) * L). Fixed-order line summation per frequency;
/// parallel execution is bitwise-identical to serial.
std::vector<cplx> propagation_exponent(std::span<const SpectralLine> lines,
                                       const AtmosphereState& atm,
                                       std::span<const double> freqs_hz,
                                       Exec exec = Exec::parallel);

/// H(f) on `grid` for a catalog atmosphere over `path_length_m` meters.
ChannelTransferFunction synthesize_transfer_function(std::span<const SpectralLine> lines,
                                                     const AtmosphereState& atm,
                                                     const FrequencyGrid& grid,
                                                     double path_length_m,
                                                     Exec exec = Exec::parallel);

/// Synthetic channel H(f) = 10^(-attenuation_db/20) * exp(-j phi(omega))
/// with polynomial phase from `coeffs`.
ChannelTransferFunction polynomial_phase_channel(const PhaseTaylorCoefficients& coeffs,
                                                 double attenuation_db,
                                                 const FrequencyGrid& grid);

// ---------------------------------------------------------------------------
// Phase analysis
// ---------------------------------------------------------------------------

struct TaylorFitOptions {
    /// Half-width of the fit window around omega0, rad/s. Callers usually set
    /// 1.5x the occupied signal bandwidth; 0 means the whole grid.
    double window_halfwidth_rad_s = 0.0;
    /// Unwrap is rejected when an unwrapped step exceeds this fraction of pi;
    /// steps that large mean the grid undersamples the phase.
    double unwrap_margin = 0.95;
};

/// Least-squares polynomial fit of the unwrapped phase around omega0.
/// `order` >= 2; returns coefficients phi_0..phi_order.
PhaseTaylorCoefficients fit_taylor_coefficients(const ChannelTransferFunction& tf,
                                                double omega0_rad_s, int order,
                                                const TaylorFitOptions& options = {});

// ---------------------------------------------------------------------------
// Tabulated import / export (CSV: frequency_hz,real,imag)
// ---------------------------------------------------------------------------

ChannelTransferFunction import_transfer_function(std::istream& source);
void export_transfer_function(const ChannelTransferFunction& tf, std::ostream& out);

// ---------------------------------------------------------------------------
// Channel handle: one object naming any of the supported channel kinds,
// evaluable at arbitrary frequencies and path lengths. Used by the Monte
// Carlo engine (exact evaluation on its own FFT lattice) and by sweeps
// (per-distance scaling without re-summing the catalog).
// ---------------------------------------------------------------------------

struct IdentityChannelSpec {};

struct CatalogChannelSpec {
    std::vector<SpectralLine> lines;
    AtmosphereState atmosphere;
};

struct PolynomialChannelSpec {
    PhaseTaylorCoefficients coefficients;
    double attenuation_db = 0.0;
    /// When true, coefficients and attenuation are per kilometre and scale
    /// with the path length; otherwise the channel ignores the path length.
    bool per_km = false;
};

struct ImportedChannelSpec {
    ChannelTransferFunction table;
};

using ChannelSpec =
    std::variant<IdentityChannelSpec, CatalogChannelSpec, PolynomialChannelSpec, ImportedChannelSpec>;

/// Channel evaluated once on a fixed frequency list; transfer values for any
/// path length come from the cached per-meter exponent (catalog, per-km
/// polynomial) or the fixed table (identity, absolute polynomial, import).
class PreparedChannel {
public:
    PreparedChannel(const ChannelSpec& spec, std::vector<double> freqs_hz, Exec exec);

    std::size_t size() const noexcept { return freqs_.size(); }
    const std::vector<double>& frequencies() const noexcept { return freqs_; }
    bool distance_scalable() const noexcept { return scalable_; }

    /// H at every prepared frequency for the given path length.
    void transfer(double path_length_m, std::span<cplx> out) const;
    std::vector<cplx> transfer(double path_length_m) const;

private:
    std::vector<double> freqs_;
    std::vector<cplx> base_;  // gamma per meter when scalable, else H directly
    bool scalable_ = false;
};

/// Convenience: synthesize any ChannelSpec on a uniform grid.
ChannelTransferFunction make_transfer_function(const ChannelSpec& spec, const FrequencyGrid& grid,
                                               double path_length_m, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Moist-air helpers
// ---------------------------------------------------------------------------

/// Saturation water vapor pressure over liquid water (Buck 1981), Pa.
double saturation_vapor_pressure_pa(double temperature_k);

/// Water vapor density for a relative humidity (0..1) at temperature, g/m^3.
double water_vapor_density_from_rh(double relative_humidity, double temperature_k);

/// Partial pressure of water vapor for the given state, Pa.
double water_vapor_partial_pressure_pa(const AtmosphereState& atm);

namespace reference {
/// Plain double-loop line summation; the independent serial implementation
/// kept for testing the kernel above.
std::vector<cplx> propagation_exponent_serial(std::span<const SpectralLine> lines,
                                              const AtmosphereState& atm,
                                              std::span<const double> freqs_hz);
} // namespace reference

} // namespace gvdlink
