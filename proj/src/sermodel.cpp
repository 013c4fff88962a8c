// SPDX-License-Identifier: Apache-2.0

#include "gvdlink/sermodel.hpp"

#include <cmath>

#include "gvdlink/errors.hpp"
#include "gvdlink/rng.hpp"

namespace gvdlink {

namespace {

const cplx kReferenceSymbol{std::sqrt(0.5), std::sqrt(0.5)}; // exp(j pi/4)

std::uint64_t checked_row_count(unsigned order, int span_p, std::uint64_t budget)
{
    std::uint64_t rows = 1;
    for (int i = 0; i < 2 * span_p; ++i) {
        if (rows > budget / order + 1)
            throw NumericError("enumeration budget exceeded (m^2p > " + std::to_string(budget) +
                               "); use enumerate_displacements_sampled");
        rows *= order;
    }
    if (rows > budget)
        throw NumericError("enumeration budget exceeded (m^2p > " + std::to_string(budget) +
                           "); use enumerate_displacements_sampled");
    return rows;
}

// Displacement for one odometer row index; slot 0 (earliest preceding
// symbol) is the most significant digit.
cplx row_displacement(std::uint64_t row, unsigned order, const std::vector<cplx>& points,
                      const std::vector<cplx>& weights)
{
    const std::size_t slots = weights.size();
    cplx d{0.0, 0.0};
    std::uint64_t rem = row;
    std::uint64_t place = 1;
    for (std::size_t i = 1; i < slots; ++i)
        place *= order;
    for (std::size_t j = 0; j < slots; ++j) {
        const auto digit = static_cast<unsigned>(rem / place);
        rem %= place;
        if (j + 1 < slots)
            place /= order;
        d += points[digit] * weights[j];
    }
    return d;
}

// Per-coordinate erfc/2 factor in the infinite-SNR limit.
double limit_factor(double coord)
{
    if (coord > 0.0)
        return 0.0;
    if (coord < 0.0)
        return 1.0;
    return 0.5;
}

double quadrant_mean_probability(cplx d, const SnrPoint& snr)
{
    // Rotating X into quadrant q is equivalent to rotating d the other way.
    double sum = conditional_error_probability(kReferenceSymbol, d, snr);
    cplx r = d;
    for (int q = 1; q < 4; ++q) {
        r = cplx{r.imag(), -r.real()}; // multiply by -j
        sum += conditional_error_probability(kReferenceSymbol, r, snr);
    }
    return sum / 4.0;
}

constexpr std::size_t kReductionBlock = 4096;

} // namespace

SnrPoint SnrPoint::from_db(double db) { return {std::pow(10.0, db / 10.0), false}; }

SnrPoint SnrPoint::from_linear(double linear)
{
    if (!(linear > 0.0))
        throw DomainError("finite SNR must be positive");
    return {linear, false};
}

SnrPoint SnrPoint::infinite() { return {std::numeric_limits<double>::infinity(), true}; }

double SnrPoint::db() const
{
    return is_infinite ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(linear);
}

DispersionDisplacementSet enumerate_displacements(const WeightVector& weights,
                                                  const Constellation& constellation,
                                                  Exec exec, std::uint64_t budget)
{
    if (weights.span_p < 1 || weights.weights.size() != 2 * static_cast<std::size_t>(weights.span_p))
        throw DomainError("weight vector must hold exactly 2p entries");
    const unsigned m = constellation.order();
    const auto rows = checked_row_count(m, weights.span_p, budget);

    DispersionDisplacementSet set;
    set.modulation_order = m;
    set.span_p = weights.span_p;
    set.displacements.resize(rows);
    const auto& points = constellation.points();
    const auto n = static_cast<std::ptrdiff_t>(rows);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < n; ++r)
            set.displacements[r] =
                row_displacement(static_cast<std::uint64_t>(r), m, points, weights.weights);
    } else {
        for (std::ptrdiff_t r = 0; r < n; ++r)
            set.displacements[r] =
                row_displacement(static_cast<std::uint64_t>(r), m, points, weights.weights);
    }
    return set;
}

DispersionDisplacementSet enumerate_displacements_sampled(const WeightVector& weights,
                                                          const Constellation& constellation,
                                                          std::uint64_t sample_count,
                                                          std::uint64_t seed, Exec exec)
{
    if (weights.span_p < 1 || weights.weights.size() != 2 * static_cast<std::size_t>(weights.span_p))
        throw DomainError("weight vector must hold exactly 2p entries");
    if (sample_count == 0)
        throw DomainError("sample count must be positive");
    const unsigned m = constellation.order();
    // total row count, saturating; only used to scale the uniform draw
    long double total_ld = 1.0L;
    for (int i = 0; i < 2 * weights.span_p; ++i)
        total_ld *= m;

    DispersionDisplacementSet set;
    set.modulation_order = m;
    set.span_p = weights.span_p;
    set.subsampled = true;
    set.displacements.resize(sample_count);
    const auto& points = constellation.points();
    const auto n = static_cast<std::ptrdiff_t>(sample_count);

    auto draw_row = [&](std::ptrdiff_t i) {
        CounterRng rng(CounterRng::substream_key(seed, static_cast<std::uint64_t>(i)));
        // build the row digit by digit; avoids needing total row count in u64
        cplx d{0.0, 0.0};
        for (std::size_t j = 0; j < weights.weights.size(); ++j) {
            const auto digit = static_cast<unsigned>(rng.next_u64() % m);
            d += points[digit] * weights.weights[j];
        }
        set.displacements[i] = d;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            draw_row(i);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            draw_row(i);
    }
    return set;
}

double conditional_error_probability(cplx x, cplx displacement, const SnrPoint& snr)
{
    const double re = x.real() + displacement.real();
    const double im = x.imag() + displacement.imag();
    if (snr.is_infinite) {
        const double fi = limit_factor(re);
        const double fq = limit_factor(im);
        return fi + fq - fi * fq;
    }
    const double root = std::sqrt(snr.linear);
    const double ea = std::erfc(root * re);
    const double eb = std::erfc(root * im);
    return 0.5 * (ea + eb) - 0.25 * ea * eb;
}

double model_ser(const DispersionDisplacementSet& dset, const SnrPoint& snr, Exec exec)
{
    const auto& d = dset.displacements;
    if (d.empty())
        throw DomainError("empty displacement set");
    const std::size_t blocks = (d.size() + kReductionBlock - 1) / kReductionBlock;
    std::vector<double> partial(blocks, 0.0);
    const auto nb = static_cast<std::ptrdiff_t>(blocks);

    auto block_sum = [&](std::ptrdiff_t bi) {
        const std::size_t begin = static_cast<std::size_t>(bi) * kReductionBlock;
        const std::size_t end = std::min(begin + kReductionBlock, d.size());
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i)
            s += quadrant_mean_probability(d[i], snr);
        partial[bi] = s;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t bi = 0; bi < nb; ++bi)
            block_sum(bi);
    } else {
        for (std::ptrdiff_t bi = 0; bi < nb; ++bi)
            block_sum(bi);
    }
    double total = 0.0;
    for (double p : partial)
        total += p;
    return total / static_cast<double>(d.size());
}

double classical_ser(const SnrPoint& snr)
{
    if (snr.is_infinite)
        return 0.0;
    const double e = std::erfc(std::sqrt(snr.linear / 2.0));
    return e - 0.25 * e * e;
}

double deterministic_error_floor(const DispersionDisplacementSet& dset)
{
    const auto& d = dset.displacements;
    if (d.empty())
        throw DomainError("empty displacement set");
    std::uint64_t crossed = 0;
    for (const auto& v : d) {
        const double re = kReferenceSymbol.real() + v.real();
        const double im = kReferenceSymbol.imag() + v.imag();
        if (re <= 0.0 || im <= 0.0)
            ++crossed;
    }
    return static_cast<double>(crossed) / static_cast<double>(d.size());
}

namespace reference {

DispersionDisplacementSet enumerate_displacements_serial(const WeightVector& weights,
                                                         const Constellation& constellation,
                                                         std::uint64_t budget)
{
    const unsigned m = constellation.order();
    const auto rows = checked_row_count(m, weights.span_p, budget);
    DispersionDisplacementSet set;
    set.modulation_order = m;
    set.span_p = weights.span_p;
    set.displacements.resize(rows);
    const auto& points = constellation.points();
    for (std::uint64_t r = 0; r < rows; ++r)
        set.displacements[r] = row_displacement(r, m, points, weights.weights);
    return set;
}

double model_ser_serial(const DispersionDisplacementSet& dset, const SnrPoint& snr)
{
    double s = 0.0;
    for (const auto& d : dset.displacements)
        s += quadrant_mean_probability(d, snr);
    return s / static_cast<double>(dset.displacements.size());
}

} // namespace reference

} // namespace gvdlink
