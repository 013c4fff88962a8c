// SPDX-License-Identifier: Apache-2.0
//
// The OpenMP kernels must match their serial references: bitwise where the
// arithmetic order is identical, and to accumulation roundoff for the
// blocked reduction. Results must not depend on the thread count.

#include <doctest.h>

#include <cmath>
#include <omp.h>

#include "gvdlink/montecarlo.hpp"
#include "gvdlink/sweep.hpp"
#include "test_helpers.hpp"

using namespace gvdlink;

namespace {

struct ThreadCountGuard {
    int saved = omp_get_max_threads();
    ~ThreadCountGuard() { omp_set_num_threads(saved); }
};

WeightVector test_weights()
{
    WeightVector w;
    w.span_p = 3;
    w.weights = {{0.21, 0.08}, {-0.13, 0.04}, {0.33, -0.12},
                 {-0.1, -0.22}, {0.05, 0.02}, {0.01, -0.04}};
    return w;
}

} // namespace

TEST_CASE("line summation: parallel kernel equals the serial reference bitwise")
{
    const auto lines = testutil::bundled_catalog();
    const auto atm = testutil::paper_atmosphere();
    std::vector<double> freqs;
    for (double f = 150e9; f < 400e9; f += 0.37e9)
        freqs.push_back(f);

    const auto serial = reference::propagation_exponent_serial(lines, atm, freqs);
    const auto parallel = propagation_exponent(lines, atm, freqs, Exec::parallel);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i)
        CHECK(serial[i] == parallel[i]);
}

TEST_CASE("displacement enumeration: kernel equals the serial reference bitwise")
{
    const auto c = Constellation::square(4);
    const auto w = test_weights();
    const auto serial = reference::enumerate_displacements_serial(w, c);
    const auto parallel = enumerate_displacements(w, c, Exec::parallel);
    REQUIRE(serial.displacements.size() == parallel.displacements.size());
    for (std::size_t i = 0; i < serial.displacements.size(); ++i)
        CHECK(serial.displacements[i] == parallel.displacements[i]);
}

TEST_CASE("model ser: blocked reduction is thread-count invariant")
{
    ThreadCountGuard guard;
    const auto c = Constellation::square(4);
    const auto set = enumerate_displacements(test_weights(), c);
    const auto snr = SnrPoint::from_db(18.0);

    omp_set_num_threads(1);
    const double one = model_ser(set, snr, Exec::parallel);
    omp_set_num_threads(guard.saved);
    const double many = model_ser(set, snr, Exec::parallel);
    const double serial_blocked = model_ser(set, snr, Exec::serial);
    CHECK(one == many);
    CHECK(serial_blocked == many);

    // plain-loop reference agrees to accumulation roundoff
    const double reference = reference::model_ser_serial(set, snr);
    CHECK(std::abs(reference - many) <= 1e-13 * std::max(reference, 1e-300));
}

TEST_CASE("channel synthesis is thread-count invariant")
{
    ThreadCountGuard guard;
    const auto lines = testutil::bundled_catalog();
    const auto atm = testutil::paper_atmosphere();
    const auto grid = FrequencyGrid::around_carrier(250e9, 45e9, 4096);

    omp_set_num_threads(1);
    const auto a = synthesize_transfer_function(lines, atm, grid, 8000.0, Exec::parallel);
    omp_set_num_threads(guard.saved);
    const auto b = synthesize_transfer_function(lines, atm, grid, 8000.0, Exec::parallel);
    for (std::size_t i = 0; i < grid.count; ++i)
        CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("frame-parallel simulation equals the serial run bit for bit")
{
    SimulationConfig cfg;
    cfg.carrier_hz = 250e9;
    cfg.pulse = {30e9, 0.5, FilterSplit::matched_root_pair};
    PolynomialChannelSpec spec;
    spec.coefficients.omega0_rad_s = 2.0 * std::numbers::pi * 250e9;
    spec.coefficients.coefficients = {0.0, 0.0, 2e-22};
    cfg.channel = spec;
    cfg.frame_count = 60;
    cfg.snr = SnrPoint::from_db(12.0);
    cfg.rng_seed = 99;

    const auto serial = run_simulation(cfg, Exec::serial);
    const auto parallel = run_simulation(cfg, Exec::parallel);
    CHECK(serial.symbol_errors == parallel.symbol_errors);
    CHECK(serial.per_frame_errors == parallel.per_frame_errors);
    CHECK(serial.ser_estimate == parallel.ser_estimate);

    ThreadCountGuard guard;
    omp_set_num_threads(1);
    const auto one_thread = run_simulation(cfg, Exec::parallel);
    CHECK(one_thread.per_frame_errors == parallel.per_frame_errors);
}
