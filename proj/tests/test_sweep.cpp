// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gvdlink/sweep.hpp"
#include "test_helpers.hpp"

using namespace gvdlink;

namespace {

SimulationConfig catalog_config(double rate_bd)
{
    SimulationConfig cfg;
    cfg.carrier_hz = 250e9;
    cfg.pulse = {rate_bd, 0.5, FilterSplit::matched_root_pair};
    cfg.channel = CatalogChannelSpec{testutil::bundled_catalog(), testutil::paper_atmosphere()};
    cfg.snr = SnrPoint::infinite();
    cfg.rng_seed = 11;
    return cfg;
}

SimulationConfig per_km_quadratic(double phi2_per_km)
{
    SimulationConfig cfg;
    cfg.carrier_hz = 250e9;
    cfg.pulse = {30e9, 0.5, FilterSplit::matched_root_pair};
    PolynomialChannelSpec spec;
    spec.coefficients.omega0_rad_s = 2.0 * std::numbers::pi * 250e9;
    spec.coefficients.coefficients = {0.0, 0.0, phi2_per_km};
    spec.per_km = true;
    cfg.channel = spec;
    cfg.snr = SnrPoint::infinite();
    return cfg;
}

} // namespace

TEST_CASE("snr sweep at 0 km reproduces the classical curve")
{
    SweepSpec spec;
    spec.variable = SweepVariable::snr;
    spec.start = 4.0;
    spec.stop = 14.0;
    spec.step = 2.0;
    spec.engine = SweepEngine::model;
    spec.base = catalog_config(30e9);
    spec.base.path_length_m = 0.0;
    spec.base.snr = SnrPoint::from_db(10.0);

    const auto result = run_sweep(spec);
    REQUIRE(result.model.has_value());
    REQUIRE(!result.montecarlo.has_value());
    REQUIRE(result.model->points.size() == 6);
    for (const auto& p : result.model->points)
        CHECK(std::abs(p.ser - classical_ser(SnrPoint::from_db(p.x))) < 1e-12);
}

TEST_CASE("10 GBd distance sweep to 2 km is error free at infinite snr")
{
    SweepSpec spec;
    spec.variable = SweepVariable::distance;
    spec.start = 0.0;
    spec.stop = 2000.0;
    spec.step = 500.0;
    spec.engine = SweepEngine::model;
    spec.base = catalog_config(10e9);

    const auto result = run_sweep(spec);
    REQUIRE(result.model.has_value());
    for (const auto& p : result.model->points)
        CHECK(p.ser == 0.0);
}

TEST_CASE("30 GBd noiseless floor jumps from zero to above 1e-2 within 2 km")
{
    AnalyticalLinkModel model(catalog_config(30e9));
    // bracket the onset on a 0.5 km grid
    double onset = -1.0, high = -1.0;
    double prev = 0.0;
    for (double km = 8.0; km <= 13.0; km += 0.5) {
        const double f = model.floor_at(km * 1000.0);
        CHECK(f >= prev - 1e-15); // monotone rise
        if (onset < 0.0 && f > 0.0)
            onset = km;
        if (high < 0.0 && f > 1e-2)
            high = km;
        prev = f;
    }
    REQUIRE(onset > 0.0);
    REQUIRE(high > 0.0);
    CHECK(high - onset <= 2.0);
}

TEST_CASE("engine cross-check on a short distance sweep")
{
    SweepSpec spec;
    spec.variable = SweepVariable::distance;
    spec.start = 0.0;
    spec.stop = 10000.0;
    spec.step = 5000.0;
    spec.engine = SweepEngine::both;
    spec.base = catalog_config(30e9);
    spec.base.snr = SnrPoint::from_db(12.0);
    spec.base.frame_count = 120;

    const auto result = run_sweep(spec);
    REQUIRE(result.model.has_value());
    REQUIRE(result.montecarlo.has_value());
    REQUIRE(result.model->points.size() == result.montecarlo->points.size());
    for (std::size_t i = 0; i < result.model->points.size(); ++i) {
        const double m = result.model->points[i].ser;
        const double s = binomial_sigma(m, 120u * 2000u);
        CHECK(std::abs(result.montecarlo->points[i].ser - m) <= 3.0 * s);
    }
}

TEST_CASE("noisy sweep dominates the noiseless one")
{
    AnalyticalLinkModel model(catalog_config(30e9));
    for (double km : {6.0, 9.0, 10.5, 12.0}) {
        const auto dset = model.displacements_at(km * 1000.0);
        const double noiseless = deterministic_error_floor(dset);
        const double noisy = model_ser(dset, SnrPoint::from_db(20.0));
        CHECK(noisy >= noiseless - 1e-12);
    }
}

TEST_CASE("bandwidth ordering of the noiseless floor")
{
    for (double km : {5.0, 11.0, 16.0}) {
        double prev = -1.0;
        for (double gbd : {10.0, 20.0, 30.0, 50.0}) {
            AnalyticalLinkModel model(catalog_config(gbd * 1e9));
            const double f = model.floor_at(km * 1000.0);
            CHECK(f >= prev - 1e-15);
            prev = f;
        }
    }
}

TEST_CASE("dispersion limit scales inversely with the per-km gdd coefficient")
{
    const double k1 = 4e-23;
    const auto lim1 = find_dispersion_limit(per_km_quadratic(k1), 1e-6, 100.0, 25000.0);
    const auto lim2 = find_dispersion_limit(per_km_quadratic(k1 / 2.0), 1e-6, 100.0, 25000.0);
    const double width =
        (lim1.bracket_high_m - lim1.bracket_low_m) + (lim2.bracket_high_m - lim2.bracket_low_m);
    CHECK(std::abs(lim2.limit_distance_m - 2.0 * lim1.limit_distance_m) <=
          2.0 * width + 2.0 * 50.0);
    CHECK(lim1.bracket_high_m - lim1.bracket_low_m <= 50.0);
}

TEST_CASE("limit bracket pins the first floor crossing")
{
    const auto cfg = per_km_quadratic(2.5e-23);
    AnalyticalLinkModel model(cfg);
    // threshold below the smallest possible nonzero floor (1/4096)
    const auto lim = find_dispersion_limit(cfg, 1.0 / 8192.0, 100.0, 20000.0);
    CHECK(model.floor_at(lim.bracket_low_m) <= 1.0 / 8192.0);
    CHECK(model.floor_at(lim.bracket_high_m) > 1.0 / 8192.0);
    // scan for the onset independently at 10 m resolution
    double onset = 0.0;
    for (double d = lim.bracket_low_m - 200.0; d <= lim.bracket_high_m + 200.0; d += 10.0) {
        if (model.floor_at(d) > 1.0 / 8192.0) {
            onset = d;
            break;
        }
    }
    REQUIRE(onset > 0.0);
    CHECK(onset >= lim.bracket_low_m - 10.0);
    CHECK(onset <= lim.bracket_high_m + 10.0);
}

TEST_CASE("limit search error paths")
{
    // floor already above threshold at the range start
    CHECK_THROWS_AS(
        (void)find_dispersion_limit(per_km_quadratic(2.5e-23), 1e-6, 15000.0, 30000.0),
        DomainError);
    // no crossing within range: identity channel never floors
    SimulationConfig cfg;
    cfg.carrier_hz = 250e9;
    cfg.pulse = {30e9, 0.5, FilterSplit::matched_root_pair};
    cfg.channel = IdentityChannelSpec{};
    cfg.snr = SnrPoint::infinite();
    CHECK_THROWS_AS((void)find_dispersion_limit(cfg, 1e-6, 0.0, 5000.0), DomainError);
    // bad threshold
    CHECK_THROWS_AS((void)find_dispersion_limit(cfg, 0.0, 0.0, 5000.0), DomainError);
}

TEST_CASE("symbol rate sweep orders ser by bandwidth")
{
    SweepSpec spec;
    spec.variable = SweepVariable::symbol_rate;
    spec.start = 10e9;
    spec.stop = 50e9;
    spec.step = 20e9;
    spec.engine = SweepEngine::model;
    spec.base = catalog_config(30e9);
    spec.base.path_length_m = 12000.0;

    const auto result = run_sweep(spec);
    REQUIRE(result.model.has_value());
    REQUIRE(result.model->points.size() == 3);
    CHECK(result.model->points[0].ser <= result.model->points[1].ser + 1e-15);
    CHECK(result.model->points[1].ser <= result.model->points[2].ser + 1e-15);
}
