#pragma once

// Shared numeric helpers: compensated summation, exact Kolmogorov-Smirnov
// distances (one-sample against a continuous CDF, and two-sample), and the
// order-statistic quantile convention used throughout the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace wboot {

// Kahan-Neumaier compensated summation.
class KahanSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Exact sup-distance between the empirical CDF of `values` and a continuous
// CDF, via the sorted-sample formula: the sup is attained just before or at
// an order statistic.
inline double ks_distance_to_cdf(std::vector<double> values,
                                 const std::function<double(double)>& cdf) {
    if (values.empty()) throw std::invalid_argument("ks_distance_to_cdf: empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

// Exact sup-distance between the empirical CDFs of two samples.
inline double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Order-statistic quantile: the ceil(N*p)-th smallest value (1-based) — the
// smallest z with empirical CDF at z reaching at least p. Matches the band
// radius rule.
inline double empirical_quantile(const std::vector<double>& sorted_values, double p) {
    if (sorted_values.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("empirical_quantile: p must lie in (0,1)");
    const double np = std::ceil(static_cast<double>(sorted_values.size()) * p);
    std::size_t idx = static_cast<std::size_t>(np) - 1;
    if (idx >= sorted_values.size()) idx = sorted_values.size() - 1;
    return sorted_values[idx];
}

}  // namespace wboot
