// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gvdlink/channel.hpp"
#include "test_helpers.hpp"

using namespace gvdlink;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

FrequencyGrid window_grid()
{
    return FrequencyGrid::around_carrier(250e9, 45e9, 8192);
}

PhaseTaylorCoefficients quadratic(double phi2, double f0_hz = 250e9)
{
    PhaseTaylorCoefficients c;
    c.omega0_rad_s = kTwoPi * f0_hz;
    c.coefficients = {0.0, 0.0, phi2};
    return c;
}

// independent oracle: centered finite difference of the unwrapped phase
double fd_phi2(const ChannelTransferFunction& tf, double f0_hz)
{
    const auto i0 = static_cast<std::size_t>(
        std::llround((f0_hz - tf.grid.start_hz) / tf.grid.step_hz));
    auto phase = [&](std::size_t i) { return -std::arg(tf.values[i]); };
    // local unwrap around i0
    double pm = phase(i0 - 1), p0 = phase(i0), pp = phase(i0 + 1);
    pm -= kTwoPi * std::round((pm - p0) / kTwoPi);
    pp -= kTwoPi * std::round((pp - p0) / kTwoPi);
    const double dw = kTwoPi * tf.grid.step_hz;
    return (pp - 2.0 * p0 + pm) / (dw * dw);
}

} // namespace

TEST_CASE("catalog: parses rows and species sections")
{
    const auto lines = testutil::tiny_catalog();
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].center_frequency_hz == doctest::Approx(183.31e9));
    CHECK(lines[0].species == Species::h2o);
    CHECK(lines[1].species == Species::o2);
    CHECK(lines[2].species == Species::h2o);
    CHECK(lines[0].air_broadening_mhz_per_hpa == doctest::Approx(2.86));
}

TEST_CASE("catalog: cutoff excludes high lines")
{
    std::istringstream in("#gvdlink-catalog v1\n"
                          "183.31 0.23 2.86 13.73 0.77 0.668\n"
                          "6000.0 1.00 3.00 14.00 0.75 1.0\n");
    const auto lines = load_line_catalog(in); // default cutoff 5 THz
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].center_frequency_hz < 5e12);
}

TEST_CASE("catalog: malformed rows carry the row number")
{
    std::istringstream bad_broadening("#gvdlink-catalog v1\n"
                                      "# comment\n"
                                      "183.31 0.23 -2.86 13.73 0.77 0.668\n");
    CHECK_THROWS_WITH_AS((void)load_line_catalog(bad_broadening),
                         doctest::Contains("row 3"), ParseError);

    std::istringstream short_row("#gvdlink-catalog v1\n183.31 0.23\n");
    CHECK_THROWS_AS((void)load_line_catalog(short_row), ParseError);

    std::istringstream no_header("183.31 0.23 2.86 13.73 0.77 0.668\n");
    CHECK_THROWS_AS((void)load_line_catalog(no_header), ParseError);

    std::istringstream empty("#gvdlink-catalog v1\n# nothing\n");
    CHECK_THROWS_AS((void)load_line_catalog(empty), EmptyCatalogError);
}

TEST_CASE("synthesize: zero path is the exact identity")
{
    const auto tf = synthesize_transfer_function(testutil::tiny_catalog(),
                                                 testutil::paper_atmosphere(), window_grid(), 0.0);
    for (const auto& v : tf.values) {
        CHECK(v.real() == 1.0);
        CHECK(v.imag() == 0.0);
    }
}

TEST_CASE("synthesize: attenuation and phase are linear in path length")
{
    const auto grid = window_grid();
    const auto lines = testutil::tiny_catalog();
    const auto atm = testutil::paper_atmosphere();
    const auto t1 = synthesize_transfer_function(lines, atm, grid, 1000.0);
    const auto t2 = synthesize_transfer_function(lines, atm, grid, 2000.0);
    for (std::size_t i = 0; i < grid.count; i += 97) {
        const double db1 = -20.0 * std::log10(std::abs(t1.values[i]));
        const double db2 = -20.0 * std::log10(std::abs(t2.values[i]));
        CHECK(db2 == doctest::Approx(2.0 * db1).epsilon(1e-9));
        // doubled phase, free of arg() wrapping: H(2L) == H(L)^2
        const cplx sq = t1.values[i] * t1.values[i];
        CHECK(std::abs(t2.values[i] - sq) <= 1e-10 * std::abs(sq));
    }
}

TEST_CASE("synthesize: path-length composability")
{
    const auto grid = window_grid();
    const auto lines = testutil::bundled_catalog();
    const auto atm = testutil::paper_atmosphere();
    const auto a = synthesize_transfer_function(lines, atm, grid, 3000.0);
    const auto b = synthesize_transfer_function(lines, atm, grid, 5000.0);
    const auto ab = synthesize_transfer_function(lines, atm, grid, 8000.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const cplx prod = a.values[i] * b.values[i];
        worst = std::max(worst, std::abs(prod - ab.values[i]) / std::abs(ab.values[i]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("synthesize: bundled catalog has a window minimum and is passive")
{
    // attenuation across 200..300 GHz at 60% RH, 20 C
    FrequencyGrid grid{190e9, 0.25e9, 441}; // 190..300 GHz
    const auto tf = synthesize_transfer_function(testutil::bundled_catalog(),
                                                 testutil::paper_atmosphere(), grid, 1000.0);
    std::size_t argmin = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < grid.count; ++i) {
        CHECK(std::abs(tf.values[i]) <= 1.0); // passivity
        const double a = -20.0 * std::log10(std::abs(tf.values[i]));
        if (a < best) {
            best = a;
            argmin = i;
        }
    }
    const double fmin = grid.frequency(argmin);
    // local minimum strictly inside the window that contains 250 GHz
    CHECK(fmin > 200e9);
    CHECK(fmin < 300e9);
    const auto i250 = static_cast<std::size_t>(std::llround((250e9 - grid.start_hz) / grid.step_hz));
    const double a250 = -20.0 * std::log10(std::abs(tf.values[i250]));
    CHECK(a250 < 3.0);  // deep window
    CHECK(a250 > 0.1);  // but not free space
}

TEST_CASE("synthesize: rejects nonpositive grid frequencies and empty input")
{
    FrequencyGrid bad{-1e9, 1e9, 16};
    CHECK_THROWS_AS((void)synthesize_transfer_function(testutil::tiny_catalog(),
                                                       testutil::paper_atmosphere(), bad, 1.0),
                    DomainError);
    std::vector<SpectralLine> none;
    CHECK_THROWS_AS((void)synthesize_transfer_function(none, testutil::paper_atmosphere(),
                                                       window_grid(), 1.0),
                    DomainError);
}

TEST_CASE("polynomial channel: identity when all terms vanish")
{
    const auto tf = polynomial_phase_channel(quadratic(0.0), 0.0, window_grid());
    for (std::size_t i = 0; i < tf.grid.count; i += 131) {
        CHECK(tf.values[i].real() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(tf.values[i].imag() == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("taylor fit: round trip recovers the coefficients")
{
    const auto grid = window_grid();
    PhaseTaylorCoefficients in;
    in.omega0_rad_s = kTwoPi * 250e9;
    in.coefficients = {0.4, 3e-12, 1e-21, 2e-33};
    const auto tf = polynomial_phase_channel(in, 0.0, grid);
    TaylorFitOptions opts;
    opts.window_halfwidth_rad_s = kTwoPi * 67.5e9;
    const auto out = fit_taylor_coefficients(tf, in.omega0_rad_s, 3, opts);
    REQUIRE(out.coefficients.size() == 4);
    CHECK(out.coefficients[2] == doctest::Approx(1e-21).epsilon(1e-8));
    CHECK(out.coefficients[3] == doctest::Approx(2e-33).epsilon(1e-6));
    CHECK(out.coefficients[1] == doctest::Approx(3e-12).epsilon(1e-8));
}

TEST_CASE("taylor fit: identity channel gives zero coefficients")
{
    const auto tf = polynomial_phase_channel(quadratic(0.0), 0.0, window_grid());
    const auto out = fit_taylor_coefficients(tf, kTwoPi * 250e9, 4);
    for (double c : out.coefficients)
        CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("taylor fit: catalog channel at 250 GHz has nonzero GDD matching finite differences")
{
    const auto grid = window_grid();
    const auto atm = testutil::paper_atmosphere();
    const auto tf =
        synthesize_transfer_function(testutil::bundled_catalog(), atm, grid, 1000.0);
    TaylorFitOptions opts;
    opts.window_halfwidth_rad_s = kTwoPi * 67.5e9;
    const auto fit = fit_taylor_coefficients(tf, kTwoPi * 250e9, 4, opts);
    CHECK(std::abs(fit.phi2()) > 1e-25);
    const double fd = fd_phi2(tf, 250e9);
    CHECK(fit.phi2() == doctest::Approx(fd).epsilon(0.05));
}

TEST_CASE("taylor fit: grid refinement moves phi2 by less than 0.1%")
{
    const auto atm = testutil::paper_atmosphere();
    const auto lines = testutil::bundled_catalog();
    TaylorFitOptions opts;
    opts.window_halfwidth_rad_s = kTwoPi * 67.5e9;
    // the default grid density and its double
    const auto coarse = fit_taylor_coefficients(
        synthesize_transfer_function(lines, atm, FrequencyGrid::around_carrier(250e9, 45e9, 32768),
                                     1000.0),
        kTwoPi * 250e9, 4, opts);
    const auto fine = fit_taylor_coefficients(
        synthesize_transfer_function(lines, atm, FrequencyGrid::around_carrier(250e9, 45e9, 65536),
                                     1000.0),
        kTwoPi * 250e9, 4, opts);
    CHECK(std::abs(fine.phi2() - coarse.phi2()) < 1e-3 * std::abs(coarse.phi2()));
}

TEST_CASE("taylor fit: undersampled phase fails loudly")
{
    // linear phase of ~0.97 pi per grid step
    FrequencyGrid grid{245e9, 0.5e9, 41};
    PhaseTaylorCoefficients steep;
    steep.omega0_rad_s = kTwoPi * 250e9;
    steep.coefficients = {0.0, 0.97 * std::numbers::pi / (kTwoPi * 0.5e9), 0.0};
    const auto tf = polynomial_phase_channel(steep, 0.0, grid);
    CHECK_THROWS_AS((void)fit_taylor_coefficients(tf, kTwoPi * 250e9, 2), NumericError);
}

TEST_CASE("taylor fit: domain checks")
{
    const auto tf = polynomial_phase_channel(quadratic(0.0), 0.0, window_grid());
    CHECK_THROWS_AS((void)fit_taylor_coefficients(tf, kTwoPi * 250e9, 1), DomainError);
    CHECK_THROWS_AS((void)fit_taylor_coefficients(tf, kTwoPi * 900e9, 2), DomainError);
}

TEST_CASE("transfer function export-import round trip")
{
    const auto tf = synthesize_transfer_function(testutil::tiny_catalog(),
                                                 testutil::paper_atmosphere(),
                                                 FrequencyGrid{240e9, 0.5e9, 64}, 2000.0);
    std::ostringstream out;
    export_transfer_function(tf, out);
    std::istringstream in(out.str());
    const auto back = import_transfer_function(in);
    REQUIRE(back.grid.count == tf.grid.count);
    CHECK(back.grid.start_hz == doctest::Approx(tf.grid.start_hz));
    CHECK(back.grid.step_hz == doctest::Approx(tf.grid.step_hz));
    for (std::size_t i = 0; i < tf.grid.count; ++i)
        CHECK(std::abs(back.values[i] - tf.values[i]) < 1e-15);
}

TEST_CASE("import rejects non-uniform spacing beyond 1 ppm")
{
    std::ostringstream src;
    src << "frequency_hz,real,imag\n";
    src << "1e9,1,0\n";
    src << "2e9,1,0\n";
    src << "3.1e9,1,0\n"; // 10% off
    std::istringstream in(src.str());
    CHECK_THROWS_AS((void)import_transfer_function(in), ParseError);
}

TEST_CASE("humidity helper reproduces 10.37 g/m^3 at 60% RH, 20 C")
{
    const double rho = water_vapor_density_from_rh(0.60, 293.15);
    CHECK(rho == doctest::Approx(10.37).epsilon(2e-3));
}

TEST_CASE("prepared channel: per-km polynomial scales with distance")
{
    std::vector<double> freqs{249e9, 250e9, 251e9};
    PolynomialChannelSpec spec;
    spec.coefficients = quadratic(1e-24);
    spec.attenuation_db = 1.0;
    spec.per_km = true;
    PreparedChannel prepared(spec, freqs, Exec::serial);
    const auto h1 = prepared.transfer(1000.0);
    const auto h2 = prepared.transfer(2000.0);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        CHECK(std::abs(h1[i] * h1[i] - h2[i]) < 1e-12);
    }
    CHECK(std::abs(h1[1]) == doctest::Approx(std::pow(10.0, -1.0 / 20.0)).epsilon(1e-12));
}

TEST_CASE("prepared channel: imported table interpolates and checks range")
{
    ChannelTransferFunction table;
    table.grid = {200e9, 1e9, 101};
    table.values.resize(101);
    for (std::size_t i = 0; i < 101; ++i) {
        const double f = table.grid.frequency(i);
        table.values[i] = std::exp(cplx{0.0, -1e-22 * std::pow(kTwoPi * (f - 250e9), 2)});
    }
    ImportedChannelSpec spec{table};
    std::vector<double> freqs{250.5e9};
    PreparedChannel prepared(spec, freqs, Exec::serial);
    const auto h = prepared.transfer(0.0);
    const cplx expected = std::exp(cplx{0.0, -1e-22 * std::pow(kTwoPi * 0.5e9, 2)});
    CHECK(std::abs(h[0] - expected) < 1e-5); // cubic interpolation on a 1 GHz table

    std::vector<double> outside{150e9};
    CHECK_THROWS_AS(PreparedChannel(spec, outside, Exec::serial), DomainError);
}
