// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "gvdlink/exec.hpp"
#include "gvdlink/qam.hpp"
#include "gvdlink/shaping.hpp"

namespace gvdlink {

/// Signal-to-noise ratio E/N0 as a linear power ratio, with an explicit
/// infinite-SNR mode (noise-free limit).
struct SnrPoint {
    double linear = 1.0;
    bool is_infinite = false;

    static SnrPoint from_db(double db);
    static SnrPoint from_linear(double linear);
    static SnrPoint infinite();

    double db() const;
};

/// All m^2p deterministic constellation displacements of one channel /
/// modulation pair, in odometer order over the neighbor symbol indices
/// (earliest preceding symbol is the most significant digit).
struct DispersionDisplacementSet {
    unsigned modulation_order = 0;
    int span_p = 0;
    std::vector<cplx> displacements;
    bool subsampled = false;
};

/// One SER curve point; confidence bounds are NaN for analytical curves.
struct SerPoint {
    double x = 0.0;
    double ser = 0.0;
    double ci_low = std::numeric_limits<double>::quiet_NaN();
    double ci_high = std::numeric_limits<double>::quiet_NaN();
};

struct SerCurve {
    std::string x_name;
    std::string x_unit;
    std::vector<SerPoint> points;
    /// Full run-configuration snapshot, serialized JSON (filled by callers).
    std::string metadata_json;
};

/// Default cap on exhaustive enumeration (4^8 rows).
inline constexpr std::uint64_t kDefaultEnumerationBudget = 65536;

/// Exhaustive S-matrix enumeration: for every combination of the 2p
/// neighbor symbols, the scalar product with the weight vector. Throws
/// NumericError when m^2p exceeds the budget (use the sampled variant).
DispersionDisplacementSet enumerate_displacements(const WeightVector& weights,
                                                  const Constellation& constellation,
                                                  Exec exec = Exec::parallel,
                                                  std::uint64_t budget = kDefaultEnumerationBudget);

/// Monte Carlo subsample of the S-matrix rows for orders whose full
/// enumeration is impractical. Reported SERs then carry sampling error of
/// order 1/sqrt(sample_count).
DispersionDisplacementSet enumerate_displacements_sampled(const WeightVector& weights,
                                                          const Constellation& constellation,
                                                          std::uint64_t sample_count,
                                                          std::uint64_t seed,
                                                          Exec exec = Exec::parallel);

/// P(symbol error | X, d_d) for the quadrant-I reference symbol
/// X = exp(j pi/4):
///   P = 1 - [1 - erfc(sqrt(SNR) Re(X+d))/2] [1 - erfc(sqrt(SNR) Im(X+d))/2]
/// evaluated in the cancellation-free expanded form. Infinite SNR is a
/// dedicated limit path: per coordinate the erfc/2 factor becomes 0 (> 0),
/// 1/2 (= 0) or 1 (< 0).
double conditional_error_probability(cplx x, cplx displacement, const SnrPoint& snr);

/// Modeled SER: mean of conditional_error_probability over all displacements,
/// averaged over the four transmitted quadrants (equal for the
/// rotation-closed sets produced by full enumeration). Fixed-block
/// reduction; bitwise independent of thread count.
double model_ser(const DispersionDisplacementSet& dset, const SnrPoint& snr,
                 Exec exec = Exec::parallel);

/// Classical dispersionless 4-QAM SER:
///   SER_c = erfc(sqrt(SNR/2)) - erfc(sqrt(SNR/2))^2 / 4.
double classical_ser(const SnrPoint& snr);

/// Fraction of displacements with Re(X+d) <= 0 or Im(X+d) <= 0 (boundary
/// counted as error); the SNR -> infinity limit of model_ser away from
/// exact-boundary displacements.
double deterministic_error_floor(const DispersionDisplacementSet& dset);

namespace reference {
/// Plain-loop implementations kept as the serial reference for the kernels.
DispersionDisplacementSet enumerate_displacements_serial(const WeightVector& weights,
                                                         const Constellation& constellation,
                                                         std::uint64_t budget = kDefaultEnumerationBudget);
double model_ser_serial(const DispersionDisplacementSet& dset, const SnrPoint& snr);
} // namespace reference

} // namespace gvdlink
