#pragma once

// Kernel density estimation with compactly supported kernels of bounded
// variation, its weighted-bootstrap version, the normalized difference
// process gamma*_n, and its Gaussian counterparts (smoothed bridge and the
// composed-bridge limit object).
//
// Kernels are described by a closed-form evaluator plus an explicit
// decomposition of their distributional derivative: piecewise-smooth parts
// (for quadrature against K'(t) dt) and boundary atoms (jump = K(loc+) -
// K(loc-)). Stieltjes integrals against dK sum the two parts; for the
// uniform kernel the smooth part vanishes and the atom form is exact.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wboot/empirical.hpp"
#include "wboot/gaussian.hpp"
#include "wboot/stats.hpp"
#include "wboot/weights.hpp"

namespace wboot {

struct KernelPiece {
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> derivative;  // K'(t) for t in (lo, hi)
};

struct KernelAtom {
    double location = 0.0;
    double jump = 0.0;  // K(location+) - K(location-)
};

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1] (symmetric node/weight pairs).
// Interior nodes keep quadrature independent of evaluator conventions at
// interval endpoints (relevant for kernels with boundary jumps).
inline constexpr double kGl16Nodes[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499,
};
inline constexpr double kGl16Weights[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541,
};

template <typename F>
double integrate_gl16(const F& f, double lo, double hi, int panels) {
    KahanSum total;
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        const double half = 0.5 * width;
        for (int i = 0; i < 8; ++i) {
            total.add(kGl16Weights[i] * half * f(mid - half * kGl16Nodes[i]));
            total.add(kGl16Weights[i] * half * f(mid + half * kGl16Nodes[i]));
        }
    }
    return total.value();
}

}  // namespace detail

struct KernelSpec {
    std::string name;
    double half_width = 0.0;
    std::function<double(double)> evaluator;
    double total_variation = 0.0;
    double integral = 1.0;
    std::vector<KernelPiece> derivative_pieces;
    std::vector<KernelAtom> atoms;

    static KernelSpec epanechnikov();
    static KernelSpec triangular();
    static KernelSpec uniform();
    static KernelSpec biweight();
    static KernelSpec custom(std::string name, double half_width,
                             std::function<double(double)> evaluator, double total_variation,
                             std::vector<KernelPiece> derivative_pieces,
                             std::vector<KernelAtom> atoms);
};

namespace detail {

// Sum of |K'| over the pieces plus |jump| over the atoms.
inline double kernel_variation_from_parts(const KernelSpec& k) {
    KahanSum tv;
    for (const auto& piece : k.derivative_pieces) {
        tv.add(integrate_gl16([&](double t) { return std::abs(piece.derivative(t)); },
                              piece.lo, piece.hi, 16));
    }
    for (const auto& atom : k.atoms) tv.add(std::abs(atom.jump));
    return tv.value();
}

inline void validate_kernel(const KernelSpec& k) {
    if (k.name.empty()) throw std::invalid_argument("kernel: name must be non-empty");
    if (!(k.half_width > 0.0)) throw std::invalid_argument("kernel: half width must be positive");
    if (!k.evaluator) throw std::invalid_argument("kernel: evaluator must be set");
    if (std::abs(k.integral - 1.0) > 1e-9) {
        throw std::invalid_argument("kernel: integral field must be 1");
    }
    if (k.derivative_pieces.empty()) {
        throw std::invalid_argument("kernel: derivative pieces must cover the support");
    }
    const double a = k.half_width;
    double cursor = -a;
    for (const auto& piece : k.derivative_pieces) {
        if (!piece.derivative) throw std::invalid_argument("kernel: piece derivative must be set");
        if (std::abs(piece.lo - cursor) > 1e-12 || !(piece.hi > piece.lo)) {
            throw std::invalid_argument(
                "kernel: derivative pieces must tile [-half_width, half_width] contiguously");
        }
        cursor = piece.hi;
    }
    if (std::abs(cursor - a) > 1e-12) {
        throw std::invalid_argument(
            "kernel: derivative pieces must tile [-half_width, half_width] contiguously");
    }
    for (const auto& atom : k.atoms) {
        if (atom.location < -a - 1e-12 || atom.location > a + 1e-12) {
            throw std::invalid_argument("kernel: atom outside the support");
        }
    }
    for (double u : {a + 0.5, -(a + 0.5), 2.0 * a + 1.0, -(2.0 * a + 1.0)}) {
        if (std::abs(k.evaluator(u)) > 1e-12) {
            throw std::invalid_argument("kernel: evaluator must vanish outside the support");
        }
    }
    KahanSum area;
    for (const auto& piece : k.derivative_pieces) {
        area.add(detail::integrate_gl16(
            [&](double t) {
                const double v = k.evaluator(t);
                if (v < -1e-12) {
                    throw std::invalid_argument("kernel: evaluator must be nonnegative");
                }
                return v;
            },
            piece.lo, piece.hi, 16));
    }
    if (std::abs(area.value() - k.integral) > 1e-9) {
        throw std::invalid_argument("kernel: evaluator does not integrate to 1");
    }
    if (std::abs(kernel_variation_from_parts(k) - k.total_variation) > 1e-9) {
        throw std::invalid_argument(
            "kernel: total variation inconsistent with derivative pieces and atoms");
    }
}

}  // namespace detail

inline KernelSpec KernelSpec::epanechnikov() {
    KernelSpec k;
    k.name = "epanechnikov";
    k.half_width = 1.0;
    k.evaluator = [](double u) { return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0; };
    k.total_variation = 1.5;
    auto dk = [](double u) { return -1.5 * u; };
    k.derivative_pieces = {{-1.0, 0.0, dk}, {0.0, 1.0, dk}};
    detail::validate_kernel(k);
    return k;
}

inline KernelSpec KernelSpec::triangular() {
    KernelSpec k;
    k.name = "triangular";
    k.half_width = 1.0;
    k.evaluator = [](double u) { return std::abs(u) <= 1.0 ? 1.0 - std::abs(u) : 0.0; };
    k.total_variation = 2.0;
    k.derivative_pieces = {{-1.0, 0.0, [](double) { return 1.0; }},
                           {0.0, 1.0, [](double) { return -1.0; }}};
    detail::validate_kernel(k);
    return k;
}

inline KernelSpec KernelSpec::uniform() {
    KernelSpec k;
    k.name = "uniform";
    k.half_width = 0.5;
    // Half-open support [-1/2, 1/2): makes the direct kernel sum and the
    // atom form of the Stieltjes integral agree exactly, including when an
    // observation falls exactly on a window edge.
    k.evaluator = [](double u) { return (u >= -0.5 && u < 0.5) ? 1.0 : 0.0; };
    k.total_variation = 2.0;
    k.derivative_pieces = {{-0.5, 0.5, [](double) { return 0.0; }}};
    k.atoms = {{-0.5, 1.0}, {0.5, -1.0}};
    detail::validate_kernel(k);
    return k;
}

inline KernelSpec KernelSpec::biweight() {
    KernelSpec k;
    k.name = "biweight";
    k.half_width = 1.0;
    k.evaluator = [](double u) {
        if (std::abs(u) > 1.0) return 0.0;
        const double s = 1.0 - u * u;
        return 15.0 / 16.0 * s * s;
    };
    k.total_variation = 1.875;
    auto dk = [](double u) { return -15.0 / 4.0 * u * (1.0 - u * u); };
    k.derivative_pieces = {{-1.0, 0.0, dk}, {0.0, 1.0, dk}};
    detail::validate_kernel(k);
    return k;
}

inline KernelSpec KernelSpec::custom(std::string name, double half_width,
                                     std::function<double(double)> evaluator,
                                     double total_variation,
                                     std::vector<KernelPiece> derivative_pieces,
                                     std::vector<KernelAtom> atoms) {
    KernelSpec k;
    k.name = std::move(name);
    k.half_width = half_width;
    k.evaluator = std::move(evaluator);
    k.total_variation = total_variation;
    k.derivative_pieces = std::move(derivative_pieces);
    k.atoms = std::move(atoms);
    detail::validate_kernel(k);
    return k;
}

// Recomputes the total variation from the derivative pieces and atoms and
// checks it against the stored field.
inline double kernel_total_variation(const KernelSpec& kernel) {
    const double tv = detail::kernel_variation_from_parts(kernel);
    if (std::abs(tv - kernel.total_variation) > 1e-9) {
        throw std::runtime_error(
            "kernel_total_variation: stored value inconsistent with derivative pieces");
    }
    return tv;
}

// Bandwidth: either a fixed h or the rule h(n) = c * n^{-gamma}. The power
// rule keeps h(n) decreasing and n*h(n) increasing (gamma < 1).
struct BandwidthRule {
    bool is_fixed = true;
    double fixed_h = 0.0;
    double c = 0.0;
    double exponent = 0.0;

    static BandwidthRule fixed(double h) {
        if (!(h > 0.0)) throw std::invalid_argument("BandwidthRule: h must be positive");
        BandwidthRule r;
        r.is_fixed = true;
        r.fixed_h = h;
        return r;
    }

    static BandwidthRule power(double c, double gamma) {
        if (!(c > 0.0)) throw std::invalid_argument("BandwidthRule: c must be positive");
        if (!(gamma > 0.0 && gamma < 1.0)) {
            throw std::invalid_argument("BandwidthRule: gamma must lie in (0,1)");
        }
        BandwidthRule r;
        r.is_fixed = false;
        r.c = c;
        r.exponent = gamma;
        return r;
    }

    static BandwidthRule default_rule() { return power(1.0, 0.2); }

    double at(std::size_t n) const {
        if (n == 0) throw std::invalid_argument("BandwidthRule: n must be positive");
        if (is_fixed) return fixed_h;
        return c * std::pow(static_cast<double>(n), -exponent);
    }
};

namespace detail {

inline void validate_kde_args(double h, const std::vector<double>& x_grid) {
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!std::is_sorted(x_grid.begin(), x_grid.end())) {
        throw std::invalid_argument("x_grid must be sorted");
    }
}

// Indices [first, last) of sorted observations within [x - ah, x + ah].
inline std::pair<std::size_t, std::size_t> kernel_window(const std::vector<double>& sorted,
                                                         double x, double reach) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x + reach);
    return {static_cast<std::size_t>(lo - sorted.begin()),
            static_cast<std::size_t>(hi - sorted.begin())};
}

}  // namespace detail

// f_{n,h}(x) = (nh)^{-1} sum_i K((x - X_i)/h), touching only observations
// within the kernel window around each x.
inline std::vector<double> kde_estimate(const Sample& sample, const KernelSpec& kernel, double h,
                                        const std::vector<double>& x_grid) {
    detail::validate_kde_args(h, x_grid);
    const double scale = 1.0 / (static_cast<double>(sample.n()) * h);
    std::vector<double> out(x_grid.size(), 0.0);
    for (std::size_t g = 0; g < x_grid.size(); ++g) {
        const auto [lo, hi] =
            detail::kernel_window(sample.sorted, x_grid[g], kernel.half_width * h);
        double sum = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            sum += kernel.evaluator((x_grid[g] - sample.sorted[j]) / h);
        }
        out[g] = scale * sum;
    }
    return out;
}

// f*_{n,h}(x) = h^{-1} sum_i W_i K((x - X_i)/h); uniform weights 1/n
// reproduce kde_estimate.
inline std::vector<double> bootstrap_kde(const Sample& sample, const WeightVector& weights,
                                         const KernelSpec& kernel, double h,
                                         const std::vector<double>& x_grid) {
    detail::validate_kde_args(h, x_grid);
    const auto w = detail::weights_in_sorted_order(sample, weights);
    std::vector<double> out(x_grid.size(), 0.0);
    for (std::size_t g = 0; g < x_grid.size(); ++g) {
        const auto [lo, hi] =
            detail::kernel_window(sample.sorted, x_grid[g], kernel.half_width * h);
        double sum = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            sum += w[j] * kernel.evaluator((x_grid[g] - sample.sorted[j]) / h);
        }
        out[g] = sum / h;
    }
    return out;
}

// gamma*_n(x) = sqrt(n h^2) (f*_{n,h}(x) - f_{n,h}(x)). The difference is
// computed as the fused sum sqrt(n) sum_i (W_i - 1/n) K((x - X_i)/h), which
// keeps uniform weights at exactly zero.
inline std::vector<double> gamma_star(const Sample& sample, const WeightVector& weights,
                                      const KernelSpec& kernel, double h,
                                      const std::vector<double>& x_grid) {
    detail::validate_kde_args(h, x_grid);
    const auto w = detail::weights_in_sorted_order(sample, weights);
    const double uniform = 1.0 / static_cast<double>(sample.n());
    const double root_n = std::sqrt(static_cast<double>(sample.n()));
    std::vector<double> out(x_grid.size(), 0.0);
    for (std::size_t g = 0; g < x_grid.size(); ++g) {
        const auto [lo, hi] =
            detail::kernel_window(sample.sorted, x_grid[g], kernel.half_width * h);
        double sum = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            sum += (w[j] - uniform) * kernel.evaluator((x_grid[g] - sample.sorted[j]) / h);
        }
        out[g] = root_n * sum;
    }
    return out;
}

namespace detail {

// alpha*_n as a right-continuous step function: sqrt(n)(F*_n - F_n).
inline StepFunction bootstrap_process_step(const Sample& sample, const WeightVector& weights) {
    StepFunction step;
    detail::signed_prefix(sample, weights, step.jump_points, step.cum_values);
    const double root_n = std::sqrt(static_cast<double>(sample.n()));
    for (double& v : step.cum_values) v *= root_n;
    return step;
}

}  // namespace detail

// The same process via the Stieltjes form: integral of alpha*_n(x - th)
// against dK(t) (smooth pieces plus atoms). alpha*_n(x - th) is a step
// function of t, so each piece splits exactly at the breakpoints
// t = (x - X_j)/h and the smooth part integrates K' in closed form per
// subinterval; used as an independent cross-check of gamma_star.
inline std::vector<double> gamma_star_stieltjes(const Sample& sample, const WeightVector& weights,
                                                const KernelSpec& kernel, double h,
                                                const std::vector<double>& x_grid) {
    detail::validate_kde_args(h, x_grid);
    const StepFunction alpha = detail::bootstrap_process_step(sample, weights);
    std::vector<double> out(x_grid.size(), 0.0);
    std::vector<double> cuts;
    for (std::size_t g = 0; g < x_grid.size(); ++g) {
        const double x = x_grid[g];
        KahanSum total;
        for (const auto& piece : kernel.derivative_pieces) {
            cuts.clear();
            cuts.push_back(piece.lo);
            for (double v : alpha.jump_points) {
                const double t = (x - v) / h;
                if (t > piece.lo && t < piece.hi) cuts.push_back(t);
            }
            cuts.push_back(piece.hi);
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
                if (!(cuts[s + 1] > cuts[s])) continue;
                const double t_mid = 0.5 * (cuts[s] + cuts[s + 1]);
                const double a_val = alpha.value(x - t_mid * h);
                if (a_val == 0.0) continue;
                total.add(a_val *
                          detail::integrate_gl16(piece.derivative, cuts[s], cuts[s + 1], 1));
            }
        }
        for (const auto& atom : kernel.atoms) {
            total.add(alpha.value(x - atom.location * h) * atom.jump);
        }
        out[g] = total.value();
    }
    return out;
}

// Integral of B(F(x - th)) against dK(t): the smoothed-bridge process. The
// path must resolve the integrated region: consecutive path-grid gaps over
// [F(x_min - ah), F(x_max + ah)] may be at most h/64.
inline std::vector<double> smoothed_bridge(const BridgePath& path,
                                           const std::function<double(double)>& true_cdf,
                                           const KernelSpec& kernel, double h,
                                           const std::vector<double>& x_grid) {
    detail::validate_kde_args(h, x_grid);
    if (x_grid.empty()) return {};
    auto cdf_at = [&](double s) {
        const double y = true_cdf(s);
        if (!(y >= 0.0 && y <= 1.0)) {
            throw std::runtime_error("smoothed_bridge: cdf output outside [0,1]");
        }
        return y;
    };
    const double y_lo = cdf_at(x_grid.front() - kernel.half_width * h);
    const double y_hi = cdf_at(x_grid.back() + kernel.half_width * h);
    for (std::size_t i = 0; i + 1 < path.grid.size(); ++i) {
        const bool intersects = path.grid[i + 1] > y_lo && path.grid[i] < y_hi;
        if (intersects && path.grid[i + 1] - path.grid[i] > h / 64.0 + 1e-15) {
            throw std::invalid_argument(
                "smoothed_bridge: path grid too coarse over the integrated range "
                "(need gap <= h/64)");
        }
    }
    std::vector<double> out(x_grid.size(), 0.0);
    for (std::size_t g = 0; g < x_grid.size(); ++g) {
        const double x = x_grid[g];
        KahanSum total;
        for (const auto& piece : kernel.derivative_pieces) {
            total.add(detail::integrate_gl16(
                [&](double t) {
                    return detail::bridge_at(path, cdf_at(x - t * h)) * piece.derivative(t);
                },
                piece.lo, piece.hi, 16));
        }
        for (const auto& atom : kernel.atoms) {
            total.add(detail::bridge_at(path, cdf_at(x - atom.location * h)) * atom.jump);
        }
        out[g] = total.value();
    }
    return out;
}

// B(F(x)) * integral(K): the composed-bridge object scaled by the kernel
// mass (1 for every valid kernel).
inline std::vector<double> gamma_limit(const BridgePath& path,
                                       const std::function<double(double)>& true_cdf,
                                       const KernelSpec& kernel,
                                       const std::vector<double>& x_grid) {
    auto out = compose_with_cdf(path, true_cdf, x_grid);
    for (double& v : out) v *= kernel.integral;
    return out;
}

// Plug-in variant: composes with an estimated distribution function.
inline std::vector<double> gamma_limit(const BridgePath& path, const StepFunction& plug_in_cdf,
                                       const KernelSpec& kernel,
                                       const std::vector<double>& x_grid) {
    return gamma_limit(
        path, [&](double t) { return plug_in_cdf.value(t); }, kernel, x_grid);
}

}  // namespace wboot
