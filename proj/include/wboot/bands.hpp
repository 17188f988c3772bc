#pragma once

// Bootstrap confidence bands. The sup-norm of the bootstrap process over
// replicate weight draws yields a critical radius; around the empirical CDF
// this gives a Kolmogorov-Smirnov style band, and around a kernel density
// estimate the analogous fixed-width band. A Monte Carlo harness measures
// realized coverage against a known sampling distribution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wboot/empirical.hpp"
#include "wboot/kde.hpp"
#include "wboot/parallel.hpp"
#include "wboot/rng.hpp"
#include "wboot/stats.hpp"
#include "wboot/weights.hpp"

namespace wboot {

namespace detail {

inline void validate_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie strictly between 0 and 1");
    }
}

// Zero-based index of the upper (1 - alpha) order statistic among n_boot
// sorted replicates: the smallest m with m / n_boot >= 1 - alpha, i.e. the
// ceil(n_boot * (1 - alpha))-th smallest. The defining inequality is checked
// directly so that mathematically-integer products (say 10 * 0.9) cannot be
// pushed past their ceiling by rounding. Requires alpha * (n_boot + 1) >= 1
// so that the top alpha tail holds at least one replicate.
inline std::size_t quantile_index(std::size_t n_boot, double alpha) {
    validate_alpha(alpha);
    if (n_boot == 0 || static_cast<double>(n_boot + 1) * alpha < 1.0) {
        throw std::invalid_argument(
            "n_boot is too small for alpha: need alpha * (n_boot + 1) >= 1");
    }
    const double level = 1.0 - alpha;
    const double nd = static_cast<double>(n_boot);
    auto m = static_cast<std::size_t>(std::ceil(nd * level));
    if (m < 1) m = 1;
    if (m > n_boot) m = n_boot;
    while (m > 1 && static_cast<double>(m - 1) / nd >= level) --m;
    while (m < n_boot && static_cast<double>(m) / nd < level) ++m;
    return m - 1;
}

}  // namespace detail

// Sorted bootstrap replicates of a sup statistic together with the radius
// realized as their upper (1 - alpha) order statistic.
struct BandEstimate {
    double radius = 0.0;
    double alpha = 0.0;
    std::size_t n_boot = 0;
    std::vector<double> psi;  // sorted ascending, size n_boot

    // Radius the same replicate draws would give at a different level.
    double radius_at(double other_alpha) const {
        return psi[detail::quantile_index(n_boot, other_alpha)];
    }
};

// Draw n_boot weight vectors (replicate j from stream.child(j), j = 1..n_boot),
// record psi_j = sup_t sqrt(n)|F*_n(t) - F_n(t)|, and take the upper
// (1 - alpha) order statistic as the band radius. Replicates fan out across
// workers into preallocated slots, so the result is identical for every
// worker count.
inline BandEstimate estimate_band_radius(const Sample& sample, const WeightScheme& scheme,
                                         std::size_t n_boot, double alpha,
                                         const RandomStream& stream) {
    const std::size_t order_index = detail::quantile_index(n_boot, alpha);
    BandEstimate est;
    est.alpha = alpha;
    est.n_boot = n_boot;
    est.psi.assign(n_boot, 0.0);
    parallel_for(n_boot, [&](std::size_t j) {
        RandomStream sub = stream.child(static_cast<std::uint64_t>(j) + 1);
        const WeightVector wv = draw_weight_vector(scheme, sample.n(), sub);
        est.psi[j] = sup_process_distance(sample, wv);
    });
    std::sort(est.psi.begin(), est.psi.end());
    est.radius = est.psi[order_index];
    return est;
}

// Two-sided band around the empirical CDF: F_n(t) -/+ radius / sqrt(n),
// clipped to [0, 1], represented as step functions sharing the jump points
// of F_n.
struct CdfBand {
    StepFunction lower;
    StepFunction upper;
    double radius = 0.0;
    std::size_t n = 0;
};

inline CdfBand cdf_confidence_band(const Sample& sample, double radius) {
    if (!(radius >= 0.0)) {
        throw std::invalid_argument("cdf_confidence_band: radius must be nonnegative");
    }
    const StepFunction fn = ecdf(sample);
    const double offset = radius / std::sqrt(static_cast<double>(sample.n()));
    CdfBand band;
    band.radius = radius;
    band.n = sample.n();
    band.lower = fn;
    band.upper = fn;
    band.lower.base = std::max(0.0, fn.base - offset);
    band.upper.base = std::min(1.0, fn.base + offset);
    for (std::size_t k = 0; k < fn.cum_values.size(); ++k) {
        band.lower.cum_values[k] = std::max(0.0, fn.cum_values[k] - offset);
        band.upper.cum_values[k] = std::min(1.0, fn.cum_values[k] + offset);
    }
    return band;
}

// Pointwise band around the kernel density estimate: f_{n,h}(x) -/+
// radius / sqrt(n h^2), floored at zero. The radius is the upper (1 - alpha)
// order statistic of sup_x |gamma*_n(x)| over bootstrap weight draws on the
// same evaluation grid.
struct KdeBand {
    std::vector<double> x_grid;
    std::vector<double> lower;
    std::vector<double> center;  // f_{n,h} on x_grid
    std::vector<double> upper;
    double radius = 0.0;
    double h = 0.0;
    double alpha = 0.0;
    std::size_t n_boot = 0;
    std::vector<double> psi;  // sorted sup replicates
};

inline KdeBand kde_confidence_band(const Sample& sample, const KernelSpec& kernel,
                                   const BandwidthRule& rule, const WeightScheme& scheme,
                                   std::size_t n_boot, double alpha,
                                   const std::vector<double>& x_grid,
                                   const RandomStream& stream) {
    const std::size_t order_index = detail::quantile_index(n_boot, alpha);
    const double h = rule.at(sample.n());
    KdeBand band;
    band.x_grid = x_grid;
    band.center = kde_estimate(sample, kernel, h, x_grid);
    band.h = h;
    band.alpha = alpha;
    band.n_boot = n_boot;
    band.psi.assign(n_boot, 0.0);
    parallel_for(n_boot, [&](std::size_t j) {
        RandomStream sub = stream.child(static_cast<std::uint64_t>(j) + 1);
        const WeightVector wv = draw_weight_vector(scheme, sample.n(), sub);
        const std::vector<double> g = gamma_star(sample, wv, kernel, h, x_grid);
        double sup = 0.0;
        for (double v : g) sup = std::max(sup, std::abs(v));
        band.psi[j] = sup;
    });
    std::sort(band.psi.begin(), band.psi.end());
    band.radius = band.psi[order_index];
    const double width = band.radius / (std::sqrt(static_cast<double>(sample.n())) * h);
    band.lower.resize(x_grid.size());
    band.upper.resize(x_grid.size());
    for (std::size_t g = 0; g < x_grid.size(); ++g) {
        band.lower[g] = std::max(0.0, band.center[g] - width);
        band.upper[g] = band.center[g] + width;
    }
    return band;
}

// One Monte Carlo coverage run: each repetition draws a fresh sample from the
// truth, estimates its own radius from bootstrap replicates (or uses a forced
// diagnostic radius), and counts a success when the true CDF stays inside the
// band, i.e. sup_t sqrt(n)|F_n(t) - F(t)| <= radius.
struct CoverageReport {
    double coverage = 0.0;
    std::size_t covered = 0;
    std::size_t reps = 0;
    double std_error = 0.0;  // binomial, sqrt(coverage (1 - coverage) / reps)
    double mean_radius = 0.0;
    std::size_t n = 0;
    std::size_t n_boot = 0;
    double alpha = 0.0;
    std::optional<double> forced_radius;
};

// Substream layout: repetition r uses stream.child(r); within it, child(0)
// drives the sample draws and child(1) seeds the radius estimation.
inline CoverageReport coverage_experiment(const std::function<double(double)>& true_cdf,
                                          const std::function<double(RandomStream&)>& sampler,
                                          std::size_t n, const WeightScheme& scheme,
                                          std::size_t n_boot, double alpha, std::size_t reps,
                                          const RandomStream& stream,
                                          std::optional<double> forced_radius = std::nullopt) {
    if (!true_cdf || !sampler) {
        throw std::invalid_argument("coverage_experiment: true_cdf and sampler must be callable");
    }
    if (n == 0) throw std::invalid_argument("coverage_experiment: n must be >= 1");
    if (reps < 100) {
        throw std::invalid_argument("coverage_experiment: need at least 100 repetitions");
    }
    if (forced_radius.has_value()) {
        detail::validate_alpha(alpha);
        if (!(*forced_radius >= 0.0)) {
            throw std::invalid_argument("coverage_experiment: forced radius must be nonnegative");
        }
    } else {
        (void)detail::quantile_index(n_boot, alpha);
    }

    std::vector<unsigned char> hit(reps, 0);
    std::vector<double> radii(reps, 0.0);
    parallel_for(reps, [&](std::size_t r) {
        const RandomStream rep = stream.child(static_cast<std::uint64_t>(r));
        RandomStream draw_stream = rep.child(0);
        std::vector<double> draws(n);
        for (std::size_t i = 0; i < n; ++i) draws[i] = sampler(draw_stream);
        const Sample sample = Sample::from_draws(draws);
        double radius;
        if (forced_radius.has_value()) {
            radius = *forced_radius;
        } else {
            const RandomStream boot = rep.child(1);
            radius = estimate_band_radius(sample, scheme, n_boot, alpha, boot).radius;
        }
        radii[r] = radius;
        hit[r] = classical_sup_distance(sample, true_cdf) <= radius ? 1 : 0;
    });

    CoverageReport report;
    report.reps = reps;
    report.n = n;
    report.n_boot = forced_radius.has_value() ? 0 : n_boot;
    report.alpha = alpha;
    report.forced_radius = forced_radius;
    for (unsigned char h : hit) report.covered += h;
    report.coverage = static_cast<double>(report.covered) / static_cast<double>(reps);
    report.std_error =
        std::sqrt(report.coverage * (1.0 - report.coverage) / static_cast<double>(reps));
    KahanSum radius_sum;
    for (double r : radii) radius_sum.add(r);
    report.mean_radius = radius_sum.value() / static_cast<double>(reps);
    return report;
}

}  // namespace wboot
