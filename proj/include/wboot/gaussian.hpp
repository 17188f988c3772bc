#pragma once

// Reference Gaussian objects: Brownian bridge paths on grids, Kiefer fields
// (running sums of independent bridges), the Kolmogorov sup-norm limit law,
// composition with a CDF, and the normalized modulus-of-continuity
// statistic. Bridges are built from exact Gaussian increments of Brownian
// motion (B(t) = W(t) - t W(1)), so the finite-dimensional law on the grid
// is exact and no truncation analysis is needed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <stdexcept>
#include <vector>

#include "wboot/rng.hpp"

namespace wboot {

struct BridgePath {
    std::vector<double> grid;    // sorted, starts at 0, ends at 1
    std::vector<double> values;  // values[0] = values[m] = 0
};

struct KieferField {
    std::vector<double> grid;
    std::size_t k_max = 0;
    std::vector<double> values;  // row-major: row k-1 holds K(., k)

    double at(std::size_t k, std::size_t g) const {  // k is 1-based
        return values[(k - 1) * grid.size() + g];
    }
};

namespace detail {

inline void validate_unit_grid(const std::vector<double>& grid, const char* who) {
    if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != 1.0 ||
        !std::is_sorted(grid.begin(), grid.end()) ||
        std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
        throw std::invalid_argument(std::string(who) +
                                    ": grid must increase strictly from 0 to 1");
    }
}

}  // namespace detail

// Brownian bridge with the exact finite-dimensional law on the grid:
// mean 0, Cov(B(s), B(t)) = min(s,t) - st; endpoints pinned to 0 exactly.
inline BridgePath sample_bridge(const std::vector<double>& grid, RandomStream& stream) {
    detail::validate_unit_grid(grid, "sample_bridge");
    const std::size_t m = grid.size() - 1;
    BridgePath path;
    path.grid = grid;
    path.values.resize(m + 1);
    double w = 0.0;
    path.values[0] = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        w += stream.normal() * std::sqrt(grid[i] - grid[i - 1]);
        path.values[i] = w;  // Brownian motion for now
    }
    const double w1 = w;
    for (std::size_t i = 1; i < m; ++i) path.values[i] -= grid[i] * w1;
    path.values[m] = 0.0;
    return path;
}

// Kiefer field: row k is the running sum of k independent bridges, so
// Cov(K(s,j), K(t,k)) = (min(s,t) - st) * min(j,k).
inline KieferField sample_kiefer(const std::vector<double>& grid, std::size_t k_max,
                                 RandomStream& stream) {
    detail::validate_unit_grid(grid, "sample_kiefer");
    if (k_max < 1) throw std::invalid_argument("sample_kiefer: k_max must be >= 1");
    KieferField field;
    field.grid = grid;
    field.k_max = k_max;
    field.values.assign(k_max * grid.size(), 0.0);
    std::vector<double> running(grid.size(), 0.0);
    for (std::size_t k = 0; k < k_max; ++k) {
        const BridgePath bridge = sample_bridge(grid, stream);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            running[g] += bridge.values[g];
            field.values[k * grid.size() + g] = running[g];
        }
    }
    return field;
}

// Kolmogorov law of sup|B|: K(x) = 1 - 2 sum_{k>=1} (-1)^{k+1} exp(-2 k^2 x^2).
// The series is truncated when a term drops below 1e-16 (at most 100 terms);
// below x = 0.02 the true value is smaller than about 1e-300, returned as 0.
// For small x the alternating sum sits at 0.5 up to rounding, so computed
// values below 1e-14 are pure cancellation noise (the true law there is far
// smaller); they are snapped to 0 to keep the function monotone.
inline double kolmogorov_cdf(double x) {
    if (x < 0.0) throw std::invalid_argument("kolmogorov_cdf: x must be nonnegative");
    if (x <= 0.02) return 0.0;
    double sum = 0.0;
    double sign = 1.0;
    bool converged = false;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) {
            converged = true;
            break;
        }
    }
    // The 100-term cap can only be hit for x < 0.043, where the true value
    // is below 1e-250; the truncated remainder would otherwise pollute the
    // output at the 1e-4 scale.
    if (!converged) return 0.0;
    const double v = 1.0 - 2.0 * sum;
    if (v < 1e-14) return 0.0;
    return std::min(1.0, v);
}

// Inverse of kolmogorov_cdf by bisection on [0.02, 5] to 1e-10.
inline double kolmogorov_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("kolmogorov_quantile: p must lie in (0,1)");
    }
    double lo = 0.02, hi = 5.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// Linear interpolation of a bridge path at y in [0,1]; exactly 0 at 0 and 1.
inline double bridge_at(const BridgePath& path, double y) {
    if (y <= 0.0 || y >= 1.0) return 0.0;
    const auto it = std::upper_bound(path.grid.begin(), path.grid.end(), y);
    const std::size_t hi = static_cast<std::size_t>(it - path.grid.begin());
    const std::size_t lo = hi - 1;
    const double frac = (y - path.grid[lo]) / (path.grid[hi] - path.grid[lo]);
    return path.values[lo] + frac * (path.values[hi] - path.values[lo]);
}

}  // namespace detail

// B(F(t)) on a t-grid, by linear interpolation of the sampled path.
inline std::vector<double> compose_with_cdf(const BridgePath& path,
                                            const std::function<double(double)>& true_cdf,
                                            const std::vector<double>& t_grid) {
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
        throw std::invalid_argument("compose_with_cdf: t_grid must be sorted");
    }
    std::vector<double> out(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double y = true_cdf(t_grid[i]);
        if (!(y >= 0.0 && y <= 1.0)) {
            throw std::runtime_error("compose_with_cdf: cdf output outside [0,1]");
        }
        out[i] = detail::bridge_at(path, y);
    }
    return out;
}

// Normalized modulus of continuity:
//   sup over pairs |u - v| < delta of |B(u) - B(v)|, divided by
//   sqrt(2 delta log(1/delta)).
// Computed by sliding-window extrema over the uniform grid.
inline double modulus_statistic(const BridgePath& path, double delta) {
    if (!(delta > 0.0 && delta <= 0.5)) {
        throw std::invalid_argument("modulus_statistic: delta must lie in (0, 1/2]");
    }
    const std::size_t m = path.grid.size() - 1;
    const double spacing = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (std::abs((path.grid[i + 1] - path.grid[i]) - spacing) > 1e-12) {
            throw std::invalid_argument("modulus_statistic: grid must be uniform");
        }
    }
    if (spacing > delta / 16.0 + 1e-15) {
        throw std::invalid_argument("modulus_statistic: grid too coarse for requested delta");
    }
    // Largest step count w with w * spacing < delta (strict).
    std::size_t w = static_cast<std::size_t>(std::floor(delta / spacing));
    while (w > 0 && static_cast<double>(w) * spacing >= delta) --w;

    // Monotonic deques over windows of w+1 points.
    std::deque<std::size_t> maxq, minq;
    double sup = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        while (!maxq.empty() && path.values[maxq.back()] <= path.values[i]) maxq.pop_back();
        maxq.push_back(i);
        while (!minq.empty() && path.values[minq.back()] >= path.values[i]) minq.pop_back();
        minq.push_back(i);
        if (i >= w) {
            while (maxq.front() + w < i) maxq.pop_front();
            while (minq.front() + w < i) minq.pop_front();
            sup = std::max(sup, path.values[maxq.front()] - path.values[minq.front()]);
        }
    }
    return sup / std::sqrt(2.0 * delta * std::log(1.0 / delta));
}

}  // namespace wboot
