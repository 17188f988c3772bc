#pragma once

// Empirical and weighted-bootstrap distribution functions as exact step
// functions, plus the sup-norm statistics built on them.
//
// Everything here is exact (no grids): a difference of two right-continuous
// step functions sharing jump locations attains its sup at a jump point or
// at a left limit of one, so sup-norm statistics reduce to finite maxima
// over signed prefix sums of per-value mass.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "wboot/stats.hpp"
#include "wboot/weights.hpp"

namespace wboot {

// Observations sorted ascending, remembering where each draw landed so that
// per-draw weights can follow their observation through the sort.
struct Sample {
    std::vector<double> sorted;       // ascending, ties permitted
    std::vector<std::size_t> order;   // order[j] = draw index of sorted[j]

    std::size_t n() const { return sorted.size(); }

    static Sample from_draws(const std::vector<double>& draws) {
        if (draws.empty()) throw std::invalid_argument("Sample: empty draw sequence");
        for (double v : draws) {
            if (!std::isfinite(v)) throw std::invalid_argument("Sample: non-finite observation");
        }
        Sample s;
        s.order.resize(draws.size());
        std::iota(s.order.begin(), s.order.end(), std::size_t{0});
        std::stable_sort(s.order.begin(), s.order.end(),
                         [&](std::size_t i, std::size_t j) { return draws[i] < draws[j]; });
        s.sorted.resize(draws.size());
        for (std::size_t j = 0; j < draws.size(); ++j) s.sorted[j] = draws[s.order[j]];
        return s;
    }
};

// Right-continuous piecewise-constant function: value(t) = cum_values[k] for
// t in [jump_points[k], jump_points[k+1]), and `base` left of the first jump.
struct StepFunction {
    std::vector<double> jump_points;  // strictly increasing
    std::vector<double> cum_values;
    double base = 0.0;

    double value(double t) const {
        const auto it = std::upper_bound(jump_points.begin(), jump_points.end(), t);
        if (it == jump_points.begin()) return base;
        return cum_values[static_cast<std::size_t>(it - jump_points.begin()) - 1];
    }

    double left_limit(double t) const {
        const auto it = std::lower_bound(jump_points.begin(), jump_points.end(), t);
        if (it == jump_points.begin()) return base;
        return cum_values[static_cast<std::size_t>(it - jump_points.begin()) - 1];
    }
};

namespace detail {

// Distinct sorted values and, per distinct value, the cumulative sum of
// per-draw `mass` (given in sorted order) aggregated at ties.
inline void accumulate_distinct(const std::vector<double>& sorted,
                                const std::vector<double>& mass_sorted,
                                std::vector<double>& distinct,
                                std::vector<double>& cumulative) {
    distinct.clear();
    cumulative.clear();
    KahanSum cum;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cum.add(mass_sorted[j]);
        if (j + 1 < sorted.size() && sorted[j + 1] == sorted[j]) continue;
        distinct.push_back(sorted[j]);
        cumulative.push_back(cum.value());
    }
}

inline std::vector<double> weights_in_sorted_order(const Sample& sample, const WeightVector& wv) {
    if (wv.weights.size() != sample.n()) {
        throw std::invalid_argument("weight vector length does not match sample size");
    }
    std::vector<double> w(sample.n());
    for (std::size_t j = 0; j < sample.n(); ++j) w[j] = wv.weights[sample.order[j]];
    return w;
}

}  // namespace detail

// Empirical distribution function: jump 1/n per observation, ties aggregated.
inline StepFunction ecdf(const Sample& sample) {
    if (sample.n() == 0) throw std::invalid_argument("ecdf: empty sample");
    const std::vector<double> mass(sample.n(), 1.0 / static_cast<double>(sample.n()));
    StepFunction f;
    detail::accumulate_distinct(sample.sorted, mass, f.jump_points, f.cum_values);
    return f;
}

// Weighted bootstrap distribution function: jump weights[i] at X_i.
inline StepFunction weighted_ecdf(const Sample& sample, const WeightVector& wv) {
    const auto w = detail::weights_in_sorted_order(sample, wv);
    StepFunction f;
    detail::accumulate_distinct(sample.sorted, w, f.jump_points, f.cum_values);
    return f;
}

namespace detail {

// Cumulative signed mass (weight - 1/n) per distinct value; the bootstrap
// process divided by sqrt(n) is this step function.
inline void signed_prefix(const Sample& sample, const WeightVector& wv,
                          std::vector<double>& distinct, std::vector<double>& prefix) {
    auto mass = weights_in_sorted_order(sample, wv);
    const double uniform = 1.0 / static_cast<double>(sample.n());
    for (double& m : mass) m -= uniform;
    accumulate_distinct(sample.sorted, mass, distinct, prefix);
}

}  // namespace detail

// Exact sup over t of sqrt(n)|F*_n(t) - F_n(t)|: both step functions share
// jump locations, so it suffices to scan values and left limits there.
inline double sup_process_distance(const Sample& sample, const WeightVector& wv) {
    std::vector<double> distinct, prefix;
    detail::signed_prefix(sample, wv, distinct, prefix);
    double sup = 0.0;  // left limit at the first jump point
    for (double v : prefix) sup = std::max(sup, std::abs(v));  // values = later left limits
    return std::sqrt(static_cast<double>(sample.n())) * sup;
}

// The bootstrap empirical process alpha*_n(t) = sqrt(n)(F*_n - F_n)(t) on a
// sorted evaluation grid.
inline std::vector<double> process_on_grid(const Sample& sample, const WeightVector& wv,
                                           const std::vector<double>& grid) {
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw std::invalid_argument("process_on_grid: grid must be sorted");
    }
    std::vector<double> distinct, prefix;
    detail::signed_prefix(sample, wv, distinct, prefix);
    const double root_n = std::sqrt(static_cast<double>(sample.n()));
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto it = std::upper_bound(distinct.begin(), distinct.end(), grid[g]);
        if (it != distinct.begin()) {
            out[g] = root_n * prefix[static_cast<std::size_t>(it - distinct.begin()) - 1];
        }
    }
    return out;
}

// The classical empirical process alpha_n(t) = sqrt(n)(F_n(t) - F(t)) on a
// grid; simulation-mode plumbing for a known continuous F.
inline std::vector<double> classical_process_on_grid(const Sample& sample,
                                                     const std::function<double(double)>& true_cdf,
                                                     const std::vector<double>& grid) {
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw std::invalid_argument("classical_process_on_grid: grid must be sorted");
    }
    const double n = static_cast<double>(sample.n());
    const double root_n = std::sqrt(n);
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double f = true_cdf(grid[g]);
        if (!(f >= 0.0 && f <= 1.0)) {
            throw std::runtime_error("classical_process_on_grid: cdf output outside [0,1]");
        }
        const auto it = std::upper_bound(sample.sorted.begin(), sample.sorted.end(), grid[g]);
        const double fn = static_cast<double>(it - sample.sorted.begin()) / n;
        out[g] = root_n * (fn - f);
    }
    return out;
}

// Exact sup over t of sqrt(n)|F_n(t) - F(t)| against a continuous F: the sup
// is attained at an observation or its left limit.
inline double classical_sup_distance(const Sample& sample,
                                     const std::function<double(double)>& true_cdf) {
    const double n = static_cast<double>(sample.n());
    double sup = 0.0;
    std::size_t j = 0;
    while (j < sample.n()) {
        std::size_t k = j;
        while (k + 1 < sample.n() && sample.sorted[k + 1] == sample.sorted[j]) ++k;
        const double f = true_cdf(sample.sorted[j]);
        if (!(f >= 0.0 && f <= 1.0)) {
            throw std::runtime_error("classical_sup_distance: cdf output outside [0,1]");
        }
        sup = std::max(sup, std::abs(static_cast<double>(k + 1) / n - f));  // value there
        sup = std::max(sup, std::abs(f - static_cast<double>(j) / n));      // left limit
        j = k + 1;
    }
    return std::sqrt(n) * sup;
}

// Numerical self-check of the algebraic identity
//   sqrt(n)(F*_n - F_n)(t)
//     = (n/T_n) * n^{-1/2} * (sum_i Z_i 1{X_i<=t} - F(t) T_n + (F(t) - F_n(t)) T_n),
// which holds for every t; returns the max absolute discrepancy over the grid.
inline double decomposition_residual(const Sample& sample, const WeightVector& wv,
                                     const std::function<double(double)>& true_cdf,
                                     const std::vector<double>& grid) {
    if (!wv.raw_sum.has_value()) {
        throw std::invalid_argument(
            "decomposition_residual: weights must carry the raw sum T_n (unsupported for efron)");
    }
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw std::invalid_argument("decomposition_residual: grid must be sorted");
    }
    const double t_n = *wv.raw_sum;
    const double n = static_cast<double>(sample.n());
    const double root_n = std::sqrt(n);

    // Z_i recovered from the normalized weights, laid out in sorted order.
    auto z = detail::weights_in_sorted_order(sample, wv);
    for (double& v : z) v *= t_n;
    std::vector<double> distinct, z_prefix;
    detail::accumulate_distinct(sample.sorted, z, distinct, z_prefix);

    std::vector<double> wdistinct, wprefix;
    detail::signed_prefix(sample, wv, wdistinct, wprefix);

    // Cumulative observation counts per distinct value for F_n.
    std::vector<double> counts;
    {
        const std::vector<double> ones(sample.n(), 1.0);
        std::vector<double> tmp;
        detail::accumulate_distinct(sample.sorted, ones, tmp, counts);
    }

    double residual = 0.0;
    for (double t : grid) {
        const double f = true_cdf(t);
        if (!(f >= 0.0 && f <= 1.0)) {
            throw std::runtime_error("decomposition_residual: cdf output outside [0,1]");
        }
        const auto it = std::upper_bound(distinct.begin(), distinct.end(), t);
        const std::size_t idx = static_cast<std::size_t>(it - distinct.begin());
        const double sz = idx == 0 ? 0.0 : z_prefix[idx - 1];
        const double fn = idx == 0 ? 0.0 : counts[idx - 1] / n;
        const double lhs = idx == 0 ? 0.0 : root_n * wprefix[idx - 1];
        const double rhs = (n / t_n) * (sz - f * t_n + (f - fn) * t_n) / root_n;
        residual = std::max(residual, std::abs(lhs - rhs));
    }
    return residual;
}

namespace detail {

// Map each draw to the index of its distinct value in sorted order.
inline std::vector<std::size_t> distinct_rank_by_draw(const Sample& sample,
                                                      std::size_t& distinct_count) {
    std::vector<std::size_t> rank(sample.n());
    std::size_t d = 0;
    for (std::size_t j = 0; j < sample.n(); ++j) {
        if (j > 0 && sample.sorted[j] != sample.sorted[j - 1]) ++d;
        rank[sample.order[j]] = d;
    }
    distinct_count = sample.n() == 0 ? 0 : d + 1;
    return rank;
}

// O(n^2) rescan evaluation of max_k sup_t |sum_{i<=k} (W_i - 1/n) 1{X_i<=t}|.
inline double partial_sum_max_naive(const Sample& sample, const WeightVector& wv) {
    std::size_t d_count = 0;
    const auto rank = distinct_rank_by_draw(sample, d_count);
    const double uniform = 1.0 / static_cast<double>(sample.n());
    std::vector<double> mass(d_count, 0.0);
    double best = 0.0;
    for (std::size_t k = 0; k < sample.n(); ++k) {
        mass[rank[k]] += wv.weights[k] - uniform;
        double prefix = 0.0;
        for (std::size_t d = 0; d < d_count; ++d) {
            prefix += mass[d];
            best = std::max(best, std::abs(prefix));
        }
    }
    return best;
}

// Segment tree over distinct-value slots maintaining (sum, max prefix, min
// prefix); point updates give the incremental O(n log n) evaluation.
class PrefixExtremaTree {
  public:
    explicit PrefixExtremaTree(std::size_t leaves) {
        size_ = 1;
        while (size_ < leaves) size_ <<= 1;
        sum_.assign(2 * size_, 0.0);
        max_prefix_.assign(2 * size_, 0.0);
        min_prefix_.assign(2 * size_, 0.0);
    }

    void add(std::size_t leaf, double delta) {
        std::size_t node = size_ + leaf;
        sum_[node] += delta;
        max_prefix_[node] = std::max(0.0, sum_[node]);
        min_prefix_[node] = std::min(0.0, sum_[node]);
        for (node >>= 1; node >= 1; node >>= 1) {
            const std::size_t l = 2 * node, r = 2 * node + 1;
            sum_[node] = sum_[l] + sum_[r];
            max_prefix_[node] = std::max(max_prefix_[l], sum_[l] + max_prefix_[r]);
            min_prefix_[node] = std::min(min_prefix_[l], sum_[l] + min_prefix_[r]);
            if (node == 1) break;
        }
    }

    double max_abs_prefix() const { return std::max(max_prefix_[1], -min_prefix_[1]); }

  private:
    std::size_t size_ = 1;
    std::vector<double> sum_, max_prefix_, min_prefix_;
};

inline double partial_sum_max_tree(const Sample& sample, const WeightVector& wv) {
    std::size_t d_count = 0;
    const auto rank = distinct_rank_by_draw(sample, d_count);
    const double uniform = 1.0 / static_cast<double>(sample.n());
    PrefixExtremaTree tree(d_count);
    double best = 0.0;
    for (std::size_t k = 0; k < sample.n(); ++k) {
        tree.add(rank[k], wv.weights[k] - uniform);
        best = std::max(best, tree.max_abs_prefix());
    }
    return best;
}

}  // namespace detail

// max over k <= n and all t of |sum_{i<=k} (W_i - 1/n) 1{X_i <= t}|, with i
// running in the original draw order. Exact; the rescan and the incremental
// segment-tree evaluation agree to floating-point accuracy.
inline double partial_sum_process_max(const Sample& sample, const WeightVector& wv) {
    if (wv.weights.size() != sample.n()) {
        throw std::invalid_argument("partial_sum_process_max: weight/sample length mismatch");
    }
    if (sample.n() <= 1000) return detail::partial_sum_max_naive(sample, wv);
    return detail::partial_sum_max_tree(sample, wv);
}

}  // namespace wboot
