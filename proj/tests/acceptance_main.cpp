// Acceptance gate for the library: ten quantitative checks, one output line
// each, everything derived from the master seed 42.  A line looks like
//
//   [PASS] 03 decomposition-identity  max residual 2.3e-13 <= 1e-09  (0.4s < 5s)
//
// and the process exit status is the number of failed checks, so the gate can
// sit directly inside the test driver.  Checks 4 and 8 encode distributional
// targets that the implemented processes provably miss (the sup statistic of
// the weighted bootstrap difference process concentrates below the Kolmogorov
// law at these scales); they are kept at their stated thresholds and report
// honest failures rather than being tuned to pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wboot/wboot.hpp"

namespace {

constexpr std::uint64_t kMasterSeed = 42;

struct CheckResult {
    bool ok = false;
    std::string detail;
};

std::string num(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

class Gate {
  public:
    void run(int index, const char* name, double limit_seconds,
             const std::function<CheckResult()>& body) {
        const auto start = std::chrono::steady_clock::now();
        CheckResult result;
        try {
            result = body();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < limit_seconds;
        const bool pass = result.ok && in_time;
        std::printf("[%s] %02d %-24s %s  (%.1fs < %.0fs)\n", pass ? "PASS" : "FAIL", index,
                    name, result.detail.c_str(), seconds, limit_seconds);
        std::fflush(stdout);
        if (!pass) ++failures_;
    }

    int failures() const { return failures_; }

  private:
    int failures_ = 0;
};

double clamped_uniform_cdf(double t) { return t <= 0.0 ? 0.0 : (t >= 1.0 ? 1.0 : t); }

std::vector<double> draw_uniforms(wboot::RandomStream& stream, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = stream.u01();
    return out;
}

// --- check 1 ---------------------------------------------------------------

CheckResult weight_law() {
    auto z_stream = wboot::derive_substream(kMasterSeed, {901, 0});
    const std::size_t n = 100000;
    wboot::KahanSum sum, sum2;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = z_stream.exponential();
        sum.add(z);
        sum2.add(z * z);
    }
    const double mean_err = std::abs(sum.value() / static_cast<double>(n) - 1.0);
    const double m2_err = std::abs(sum2.value() / static_cast<double>(n) - 2.0);
    // SD of Z is 1; SD of Z^2 is sqrt(E Z^4 - (E Z^2)^2) = sqrt(24 - 4).
    const double mean_tol = 4.0 / std::sqrt(static_cast<double>(n));
    const double m2_tol = 4.0 * std::sqrt(20.0) / std::sqrt(static_cast<double>(n));

    auto w_stream = wboot::derive_substream(kMasterSeed, {901, 1});
    const auto scheme = wboot::WeightScheme::exp_bayesian();
    double worst_sum_err = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
        const std::size_t dim =
            1 + static_cast<std::size_t>(w_stream.u01() * 999.0);
        const auto wv = wboot::draw_weight_vector(scheme, dim, w_stream);
        wboot::KahanSum total;
        for (double w : wv.weights) total.add(w);
        worst_sum_err = std::max(worst_sum_err, std::abs(total.value() - 1.0));
    }

    CheckResult r;
    r.ok = mean_err <= mean_tol && m2_err <= m2_tol && worst_sum_err <= 1e-12;
    r.detail = "|mean-1| " + num(mean_err) + " <= " + num(mean_tol) + "; |m2-2| " +
               num(m2_err) + " <= " + num(m2_tol) + "; max|sum(w)-1| " + num(worst_sum_err) +
               " <= 1e-12";
    return r;
}

// --- check 2 ---------------------------------------------------------------

CheckResult exact_sup_oracle() {
    auto stream = wboot::derive_substream(kMasterSeed, {902, 0});
    const std::array<wboot::WeightScheme, 3> schemes = {
        wboot::WeightScheme::exp_bayesian(), wboot::WeightScheme::two_point(0.5, 3.0),
        wboot::WeightScheme::efron()};
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        const std::size_t n = 1 + static_cast<std::size_t>(stream.u01() * 49.0);
        auto draws = draw_uniforms(stream, n);
        if (c % 4 == 0) {
            // Coarsen to one decimal so ties occur and get exercised.
            for (double& v : draws) v = std::floor(v * 10.0) / 10.0;
        }
        const auto sample = wboot::Sample::from_draws(draws);
        const auto wv = wboot::draw_weight_vector(schemes[c % 3], n, stream);
        const double lib = wboot::sup_process_distance(sample, wv);

        // Brute force on a dense grid: 1e5 uniform points plus every sample
        // point; at each point evaluate the weighted and classical empirical
        // distribution functions by direct O(n) summation.
        auto grid = draw_uniforms(stream, 100000);
        grid.insert(grid.end(), sample.sorted.begin(), sample.sorted.end());
        const double root_n = std::sqrt(static_cast<double>(n));
        double brute = 0.0;
        for (double t : grid) {
            double weighted = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sample.sorted[i] <= t) {
                    weighted += wv.weights[sample.order[i]];
                    ++count;
                }
            }
            const double fn = static_cast<double>(count) / static_cast<double>(n);
            brute = std::max(brute, std::abs(root_n * (weighted - fn)));
        }
        worst = std::max(worst, std::abs(lib - brute));
    }
    CheckResult r;
    r.ok = worst <= 1e-12;
    r.detail = "max |exact - brute force| " + num(worst) + " <= 1e-12 over 100 cases";
    return r;
}

// --- check 3 ---------------------------------------------------------------

CheckResult decomposition_identity() {
    auto stream = wboot::derive_substream(kMasterSeed, {903, 0});
    const std::array<wboot::WeightScheme, 2> schemes = {
        wboot::WeightScheme::exp_bayesian(), wboot::WeightScheme::two_point(0.5, 3.0)};
    double worst = 0.0;
    for (int c = 0; c < 1000; ++c) {
        const std::size_t n = 1 + static_cast<std::size_t>(stream.u01() * 299.0);
        const auto sample = wboot::Sample::from_draws(draw_uniforms(stream, n));
        const auto wv = wboot::draw_weight_vector(schemes[c % 2], n, stream);
        auto grid = draw_uniforms(stream, 48);
        grid.push_back(sample.sorted.front());
        grid.push_back(sample.sorted.back());
        std::sort(grid.begin(), grid.end());
        worst = std::max(
            worst, wboot::decomposition_residual(sample, wv, clamped_uniform_cdf, grid));
    }
    CheckResult r;
    r.ok = worst <= 1e-9;
    r.detail = "max residual " + num(worst) + " <= 1e-09 over 1000 cases";
    return r;
}

// --- check 4 ---------------------------------------------------------------

CheckResult limit_law_distance() {
    wboot::ExperimentConfig config;
    config.kind = "rates";
    config.seed = kMasterSeed;
    config.n_grid = {2000};
    config.reps = 10000;
    const auto report = wboot::run_rate_experiment(config);
    const double ks = report.rows[0].ks_distance;
    CheckResult r;
    r.ok = ks <= 0.02;
    r.detail = "KS(law of sup statistic, Kolmogorov cdf) " + num(ks) + " <= 0.02";
    return r;
}

// --- check 5 ---------------------------------------------------------------

CheckResult rate_trend() {
    wboot::ExperimentConfig config;
    config.kind = "rates";
    config.seed = kMasterSeed;
    config.n_grid = {100, 400, 1600, 6400};
    config.reps = 2000;
    const auto report = wboot::run_rate_experiment(config);
    std::string distances;
    for (const auto& row : report.rows) {
        if (!distances.empty()) distances += ", ";
        distances += num(row.ks_distance);
    }
    CheckResult r;
    r.ok = report.trend_nonincreasing && report.ratio_spread <= 3.0;
    r.detail = "d_n = [" + distances + "] non-increasing (allowance " +
               num(report.trend_allowance) + "): " +
               (report.trend_nonincreasing ? "yes" : "no") + "; envelope ratio spread " +
               num(report.ratio_spread) + " <= 3";
    return r;
}

// --- check 6 ---------------------------------------------------------------

CheckResult band_coverage() {
    wboot::ExperimentConfig config;
    config.kind = "coverage";
    config.seed = kMasterSeed;
    config.n = 500;
    config.n_boot = 999;
    config.alpha = 0.10;
    config.reps = 1000;
    const auto result = wboot::run_coverage_experiment(config);
    const double coverage = result.report.coverage;
    CheckResult r;
    r.ok = coverage >= 0.87 && coverage <= 0.93;
    r.detail = "90% band empirical coverage " + num(coverage) + " in [0.87, 0.93]";
    return r;
}

// --- check 7 ---------------------------------------------------------------

// Independent series oracle: fixed 200 terms, summed smallest-first in long
// double, no early exit -- deliberately different from the library routine.
double oracle_kolmogorov_cdf(double x) {
    long double alternating = 0.0L;
    for (int k = 200; k >= 1; --k) {
        const long double term = std::exp(-2.0L * static_cast<long double>(k) * k * x * x);
        alternating += (k % 2 == 1) ? term : -term;
    }
    const long double value = 1.0L - 2.0L * alternating;
    return static_cast<double>(value < 0.0L ? 0.0L : value);
}

double oracle_kolmogorov_quantile(double p) {
    double lo = 0.2, hi = 5.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (oracle_kolmogorov_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CheckResult kolmogorov_reference() {
    const double oracle_cdf = oracle_kolmogorov_cdf(0.5);
    const double oracle_q = oracle_kolmogorov_quantile(0.95);
    const double cdf_err = std::abs(wboot::kolmogorov_cdf(0.5) - oracle_cdf);
    const double q_err = std::abs(wboot::kolmogorov_quantile(0.95) - oracle_q);
    CheckResult r;
    r.ok = cdf_err <= 1e-5 && q_err <= 1e-4 && std::abs(oracle_cdf - 0.036055) <= 1e-5 &&
           std::abs(oracle_q - 1.35810) <= 1e-4;
    r.detail = "cdf(0.5) err " + num(cdf_err) + " <= 1e-05 (oracle " + num(oracle_cdf) +
               "); quantile(0.95) err " + num(q_err) + " <= 1e-04 (oracle " + num(oracle_q) +
               ")";
    return r;
}

// --- check 8 ---------------------------------------------------------------

CheckResult kde_limit_quantile() {
    wboot::ExperimentConfig config;
    config.kind = "kde-rates";
    config.seed = kMasterSeed;
    config.n_grid = {10000};
    config.reps = 2000;
    const auto report = wboot::run_kde_rate_experiment(config);
    const double q95 = report.rows[0].quantile_values[5];  // level 0.95
    CheckResult r;
    r.ok = std::abs(q95 - 1.3581) <= 0.12;
    r.detail = "95th pct of sup density process " + num(q95) + " within 1.3581 +- 0.12";
    return r;
}

// --- check 9 ---------------------------------------------------------------

CheckResult bridge_modulus() {
    const std::size_t m = 1u << 16;
    std::vector<double> grid(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        grid[i] = static_cast<double>(i) / static_cast<double>(m);
    }
    const double delta = 1.0 / 1024.0;
    wboot::KahanSum total;
    for (int rep = 0; rep < 200; ++rep) {
        auto stream = wboot::derive_substream(kMasterSeed, {909, static_cast<std::uint64_t>(rep)});
        const auto path = wboot::sample_bridge(grid, stream);
        total.add(wboot::modulus_statistic(path, delta));
    }
    const double mean = total.value() / 200.0;
    CheckResult r;
    r.ok = mean >= 0.75 && mean <= 1.25;
    r.detail = "mean normalized modulus " + num(mean) + " in [0.75, 1.25]";
    return r;
}

// --- check 10 --------------------------------------------------------------

std::string with_thread_count(const char* count, const std::function<std::string()>& render) {
    ::setenv("WBOOT_THREADS", count, 1);
    std::string out = render();
    ::unsetenv("WBOOT_THREADS");
    return out;
}

CheckResult determinism() {
    wboot::ExperimentConfig rates;
    rates.kind = "rates";
    rates.seed = kMasterSeed;
    rates.n_grid = {50, 100};
    rates.reps = 120;

    wboot::ExperimentConfig coverage;
    coverage.kind = "coverage";
    coverage.seed = kMasterSeed;
    coverage.n = 40;
    coverage.n_boot = 39;
    coverage.alpha = 0.10;
    coverage.reps = 100;

    wboot::ExperimentConfig kde;
    kde.kind = "kde-rates";
    kde.seed = kMasterSeed;
    kde.n_grid = {100};
    kde.reps = 100;

    const std::array<std::function<std::string()>, 3> renders = {
        [&] { return wboot::run_rate_experiment(rates).to_json().dump(2); },
        [&] { return wboot::run_coverage_experiment(coverage).summary.dump(2); },
        [&] { return wboot::run_kde_rate_experiment(kde).to_json().dump(2); }};

    int identical = 0;
    for (const auto& render : renders) {
        if (with_thread_count("1", render) == with_thread_count("4", render)) ++identical;
    }
    CheckResult r;
    r.ok = identical == 3;
    r.detail = "byte-identical reports across worker counts {1, 4}: " +
               std::to_string(identical) + "/3 experiment kinds";
    return r;
}

}  // namespace

int main() {
    Gate gate;
    gate.run(1, "weight-law", 5.0, weight_law);
    gate.run(2, "exact-sup-oracle", 10.0, exact_sup_oracle);
    gate.run(3, "decomposition-identity", 5.0, decomposition_identity);
    gate.run(4, "limit-law-distance", 120.0, limit_law_distance);
    gate.run(5, "rate-trend", 300.0, rate_trend);
    gate.run(6, "band-coverage", 180.0, band_coverage);
    gate.run(7, "kolmogorov-reference", 1.0, kolmogorov_reference);
    gate.run(8, "kde-limit-quantile", 300.0, kde_limit_quantile);
    gate.run(9, "bridge-modulus", 120.0, bridge_modulus);
    gate.run(10, "determinism", 60.0, determinism);

    if (gate.failures() == 0) {
        std::printf("all 10 acceptance checks passed\n");
    } else {
        std::printf("%d of 10 acceptance checks failed\n", gate.failures());
    }
    return gate.failures();
}
