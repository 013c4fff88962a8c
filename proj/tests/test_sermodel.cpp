// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "gvdlink/sermodel.hpp"
#include "gvdlink/sweep.hpp"

using namespace gvdlink;

namespace {

WeightVector make_weights(int p, std::vector<cplx> w)
{
    WeightVector wv;
    wv.span_p = p;
    wv.weights = std::move(w);
    return wv;
}

// independent nested-loop oracle for p = 1: plain double loop over the two
// neighbor symbols, no odometer arithmetic
std::vector<cplx> oracle_p1(const Constellation& c, const WeightVector& w)
{
    std::vector<cplx> out;
    for (unsigned a = 0; a < c.order(); ++a)
        for (unsigned b = 0; b < c.order(); ++b)
            out.push_back(c.point(a) * w.weights[0] + c.point(b) * w.weights[1]);
    return out;
}

// p = 2: four explicit nested loops
std::vector<cplx> oracle_p2(const Constellation& c, const WeightVector& w)
{
    std::vector<cplx> out;
    for (unsigned a = 0; a < c.order(); ++a)
        for (unsigned b = 0; b < c.order(); ++b)
            for (unsigned d = 0; d < c.order(); ++d)
                for (unsigned e = 0; e < c.order(); ++e)
                    out.push_back(c.point(a) * w.weights[0] + c.point(b) * w.weights[1] +
                                  c.point(d) * w.weights[2] + c.point(e) * w.weights[3]);
    return out;
}

const cplx kX{std::sqrt(0.5), std::sqrt(0.5)};

} // namespace

TEST_CASE("snr points convert between db and linear")
{
    const auto s = SnrPoint::from_db(10.0);
    CHECK(s.linear == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(s.db() == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(SnrPoint::infinite().is_infinite);
    CHECK_THROWS_AS((void)SnrPoint::from_linear(-1.0), DomainError);
}

TEST_CASE("enumeration matches the nested-loop oracle bitwise for p <= 2")
{
    const auto c = Constellation::square(4);
    const auto w1 = make_weights(1, {{0.03, -0.01}, {-0.02, 0.04}});
    const auto set1 = enumerate_displacements(w1, c);
    const auto expect1 = oracle_p1(c, w1);
    REQUIRE(set1.displacements.size() == 16);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(set1.displacements[i] == expect1[i]); // bitwise

    const auto w2 =
        make_weights(2, {{0.03, -0.01}, {-0.02, 0.04}, {0.011, 0.007}, {-0.005, -0.019}});
    const auto set2 = enumerate_displacements(w2, c);
    const auto expect2 = oracle_p2(c, w2);
    REQUIRE(set2.displacements.size() == 256);
    for (std::size_t i = 0; i < 256; ++i)
        CHECK(set2.displacements[i] == expect2[i]); // bitwise
}

TEST_CASE("zero weights give 4096 exactly-zero displacements")
{
    const auto c = Constellation::square(4);
    const auto set = enumerate_displacements(
        make_weights(3, std::vector<cplx>(6, cplx{0.0, 0.0})), c);
    REQUIRE(set.displacements.size() == 4096);
    for (const auto& d : set.displacements)
        CHECK(d == cplx{0.0, 0.0});
}

TEST_CASE("single nonzero weight yields the scaled constellation, each m^(2p-1) times")
{
    const auto c = Constellation::square(4);
    const cplx w{0.05, -0.02};
    auto weights = std::vector<cplx>(6, cplx{0.0, 0.0});
    weights[0] = w;
    const auto set = enumerate_displacements(make_weights(3, std::move(weights)), c);

    std::map<std::pair<double, double>, std::size_t> counts;
    for (const auto& d : set.displacements)
        ++counts[{d.real(), d.imag()}];
    REQUIRE(counts.size() == 4);
    for (unsigned i = 0; i < 4; ++i) {
        const cplx expected = c.point(i) * w;
        const auto it = counts.find({expected.real(), expected.imag()});
        REQUIRE(it != counts.end());
        CHECK(it->second == 1024); // 4^5
    }
}

TEST_CASE("enumeration budget is enforced and the sampled fallback works")
{
    const auto c = Constellation::square(4);
    const auto w5 = make_weights(5, std::vector<cplx>(10, cplx{0.02, 0.0}));
    CHECK_THROWS_AS((void)enumerate_displacements(w5, c), NumericError);

    // sampled subsets approximate the full-set SER
    const auto w3 = make_weights(3, {{0.12, 0.0},
                                     {0.0, -0.09},
                                     {0.2, 0.05},
                                     {-0.15, 0.08},
                                     {0.03, 0.0},
                                     {0.0, 0.02}});
    const auto full = enumerate_displacements(w3, c);
    const auto sampled = enumerate_displacements_sampled(w3, c, 20000, 7);
    CHECK(sampled.subsampled);
    CHECK(sampled.displacements.size() == 20000);
    const auto snr = SnrPoint::from_db(14.0);
    const double ser_full = model_ser(full, snr);
    const double ser_sampled = model_ser(sampled, snr);
    CHECK(ser_sampled == doctest::Approx(ser_full).epsilon(0.1));
}

TEST_CASE("conditional error probability limits")
{
    CHECK(conditional_error_probability(kX, cplx{0.0, 0.0}, SnrPoint::infinite()) == 0.0);
    CHECK(conditional_error_probability(kX, -2.0 * kX, SnrPoint::infinite()) == 1.0);
    // boundary displacement counts as a half factor
    CHECK(conditional_error_probability(kX, cplx{-kX.real(), 0.0}, SnrPoint::infinite()) == 0.5);

    const auto snr = SnrPoint::from_db(10.0);
    const double p = conditional_error_probability(kX, cplx{0.0, 0.0}, snr);
    CHECK(std::abs(p - classical_ser(snr)) < 1e-12);
}

TEST_CASE("classical ser endpoints")
{
    CHECK(classical_ser(SnrPoint::infinite()) == 0.0);
    CHECK(classical_ser(SnrPoint::from_linear(1e-12)) == doctest::Approx(0.75).epsilon(1e-5));
    CHECK(classical_ser(SnrPoint::from_db(40.0)) < 1e-300);
    // monotone decreasing
    double prev = 1.0;
    for (double db = 0.0; db <= 20.0; db += 0.5) {
        const double s = classical_ser(SnrPoint::from_db(db));
        CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("model ser of an all-zero set equals the classical curve to 1e-12")
{
    const auto c = Constellation::square(4);
    const auto set = enumerate_displacements(
        make_weights(3, std::vector<cplx>(6, cplx{0.0, 0.0})), c);
    for (double db = 0.0; db <= 40.0; db += 2.5) {
        const auto snr = SnrPoint::from_db(db);
        CHECK(std::abs(model_ser(set, snr) - classical_ser(snr)) < 1e-12);
    }
}

namespace {

// displacement set of a quadratic-phase channel, via the shaping pipeline
DispersionDisplacementSet quadratic_channel_set(double phi2)
{
    const PulseShapeSpec pulse{30e9, 0.5, FilterSplit::matched_root_pair};
    const auto grid = FrequencyGrid::around_carrier(250e9, 45e9, 32768);
    PhaseTaylorCoefficients c;
    c.omega0_rad_s = 2.0 * std::numbers::pi * 250e9;
    c.coefficients = {0.0, 0.0, phi2};
    const auto atm = polynomial_phase_channel(c, 0.0, grid);
    const auto tx = raised_cosine_response(pulse, grid, 250e9);
    const auto h = composite_impulse_response(atm, tx, tx, 250e9);
    return enumerate_displacements(extract_weights(h, pulse, 3), Constellation::square(4));
}

} // namespace

TEST_CASE("below the floor onset, model ser is monotone and converges to zero")
{
    const auto set = quadratic_channel_set(1.2e-22);
    REQUIRE(deterministic_error_floor(set) == 0.0);
    double prev = 1.0;
    for (double db = 0.0; db <= 45.0; db += 1.5) {
        const double s = model_ser(set, SnrPoint::from_db(db));
        CHECK(s <= prev + 1e-15);
        CHECK(s >= 0.0);
        prev = s;
    }
    CHECK(model_ser(set, SnrPoint::from_db(60.0)) < 1e-12);
    CHECK(model_ser(set, SnrPoint::infinite()) == 0.0);
}

TEST_CASE("above the onset, model ser converges to the deterministic floor")
{
    const auto set = quadratic_channel_set(3.2e-22);
    const double floor = deterministic_error_floor(set);
    CHECK(floor > 1e-2);
    CHECK(model_ser(set, SnrPoint::from_db(80.0)) == doctest::Approx(floor).epsilon(1e-9));
    CHECK(model_ser(set, SnrPoint::infinite()) == doctest::Approx(floor).epsilon(1e-12));

    // Mid-SNR the modeled SER dips slightly below the floor: noise sometimes
    // pushes a deterministically-wrong symbol back across the boundary. The
    // limit is still approached from below monotonically after the dip.
    double dip = floor;
    for (double db = 15.0; db <= 40.0; db += 1.0)
        dip = std::min(dip, model_ser(set, SnrPoint::from_db(db)));
    CHECK(dip < floor);
    CHECK(dip > 0.8 * floor);
}

TEST_CASE("quadrant rotation leaves model ser unchanged")
{
    const auto c = Constellation::square(4);
    const auto w = make_weights(2, {{0.21, 0.05}, {-0.1, 0.17}, {0.02, -0.3}, {0.07, 0.01}});
    auto set = enumerate_displacements(w, c);
    const auto snr = SnrPoint::from_db(12.0);
    const double base = model_ser(set, snr);
    for (auto& d : set.displacements)
        d = cplx{-d.imag(), d.real()}; // rotate every displacement by pi/2
    CHECK(std::abs(model_ser(set, snr) - base) < 1e-12);
}

TEST_CASE("deterministic floor counts boundary crossings")
{
    DispersionDisplacementSet set;
    set.modulation_order = 4;
    set.span_p = 3;
    set.displacements.assign(4096, cplx{0.0, 0.0});
    CHECK(deterministic_error_floor(set) == 0.0);
    set.displacements[17] = -1.01 * kX; // across the origin
    CHECK(deterministic_error_floor(set) == doctest::Approx(1.0 / 4096.0).epsilon(1e-15));
}
