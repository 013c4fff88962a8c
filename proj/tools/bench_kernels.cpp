// SPDX-License-Identifier: Apache-2.0
//
// Timings for the OpenMP kernels against their serial references:
// catalog line summation, displacement enumeration, SER reduction, and the
// frame-parallel Monte Carlo loop. Also reports the worst deviation between
// the two paths (zero where the arithmetic order is identical).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <omp.h>

#include "gvdlink/montecarlo.hpp"
#include "gvdlink/sweep.hpp"

using namespace gvdlink;

namespace {

double now_s()
{
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_of(int reps, F&& fn)
{
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        fn();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s, double max_dev)
{
    std::printf("%-28s %10.4f ms %10.4f ms %7.2fx   %.3e\n", name, serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s, max_dev);
}

} // namespace

int main(int argc, char** argv)
{
    const char* catalog_path = argc > 1 ? argv[1] : "data/atmosphere_v1.cat";
    std::ifstream cat(catalog_path);
    if (!cat) {
        std::fprintf(stderr, "cannot open catalog '%s' (pass the path as argv[1])\n",
                     catalog_path);
        return 1;
    }
    const auto lines = load_line_catalog(cat);
    const AtmosphereState atm{293.15, 101325.0, 10.37};
    std::printf("threads: %d, catalog lines: %zu\n\n", omp_get_max_threads(), lines.size());
    std::printf("%-28s %13s %13s %9s   %s\n", "kernel", "serial", "parallel", "speedup",
                "max |dev|");

    // --- line summation ---
    std::vector<double> freqs;
    for (double f = 70e9; f < 430e9; f += 5e6)
        freqs.push_back(f);
    std::vector<cplx> gamma_serial, gamma_parallel;
    const double t_lines_s =
        time_best_of(3, [&] { gamma_serial = reference::propagation_exponent_serial(lines, atm, freqs); });
    const double t_lines_p =
        time_best_of(3, [&] { gamma_parallel = propagation_exponent(lines, atm, freqs); });
    double dev = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i)
        dev = std::max(dev, std::abs(gamma_serial[i] - gamma_parallel[i]));
    report("line summation (72k pts)", t_lines_s, t_lines_p, dev);

    // --- displacement enumeration ---
    WeightVector w;
    w.span_p = 4; // 65536 rows
    w.weights.assign(8, cplx{0.05, -0.03});
    const auto constellation = Constellation::square(4);
    DispersionDisplacementSet set_serial, set_parallel;
    const double t_enum_s = time_best_of(
        5, [&] { set_serial = reference::enumerate_displacements_serial(w, constellation); });
    const double t_enum_p =
        time_best_of(5, [&] { set_parallel = enumerate_displacements(w, constellation); });
    dev = 0.0;
    for (std::size_t i = 0; i < set_serial.displacements.size(); ++i)
        dev = std::max(dev,
                       std::abs(set_serial.displacements[i] - set_parallel.displacements[i]));
    report("enumeration (4^8 rows)", t_enum_s, t_enum_p, dev);

    // --- SER reduction ---
    const auto snr = SnrPoint::from_db(18.0);
    double ser_serial = 0.0, ser_parallel = 0.0;
    const double t_ser_s =
        time_best_of(5, [&] { ser_serial = reference::model_ser_serial(set_serial, snr); });
    const double t_ser_p = time_best_of(5, [&] { ser_parallel = model_ser(set_parallel, snr); });
    report("ser reduction (4^8 rows)", t_ser_s, t_ser_p, std::abs(ser_serial - ser_parallel));

    // --- Monte Carlo frames ---
    SimulationConfig cfg;
    cfg.carrier_hz = 250e9;
    cfg.pulse = {30e9, 0.5, FilterSplit::matched_root_pair};
    cfg.channel = CatalogChannelSpec{lines, atm};
    cfg.path_length_m = 10000.0;
    cfg.frame_count = 100;
    cfg.snr = SnrPoint::from_db(12.0);
    SimulationResult mc_serial, mc_parallel;
    const double t_mc_s = time_best_of(1, [&] { mc_serial = run_simulation(cfg, Exec::serial); });
    const double t_mc_p =
        time_best_of(1, [&] { mc_parallel = run_simulation(cfg, Exec::parallel); });
    report("monte carlo (100 frames)", t_mc_s, t_mc_p,
           std::abs(static_cast<double>(mc_serial.symbol_errors) -
                    static_cast<double>(mc_parallel.symbol_errors)));
    return 0;
}
