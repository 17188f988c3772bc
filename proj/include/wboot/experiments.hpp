#pragma once

// Configuration, JSON reports, and the Monte Carlo harnesses: convergence-
// rate experiments for the sup statistics, the coverage harness, and the
// config-driven band/simulate runners behind the CLI. Every replicate is
// keyed by (experiment tag, n-index, replicate) substream labels and writes
// into its own slot, so reports are byte-identical for any worker count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wboot/bands.hpp"
#include "wboot/empirical.hpp"
#include "wboot/gaussian.hpp"
#include "wboot/io.hpp"
#include "wboot/kde.hpp"
#include "wboot/parallel.hpp"
#include "wboot/rng.hpp"
#include "wboot/stats.hpp"
#include "wboot/weights.hpp"

namespace wboot {

using json = nlohmann::ordered_json;

// Substream tags, one per experiment kind; part of the reproducibility
// contract (never renumber).
inline constexpr std::uint64_t kTagRates = 1;
inline constexpr std::uint64_t kTagKieferRates = 2;
inline constexpr std::uint64_t kTagKdeRates = 3;
inline constexpr std::uint64_t kTagCoverage = 4;
inline constexpr std::uint64_t kTagBand = 5;
inline constexpr std::uint64_t kTagKdeBand = 6;
inline constexpr std::uint64_t kTagSimulate = 7;

inline constexpr std::array<double, 6> kQuantileLevels = {0.10, 0.25, 0.50,
                                                          0.75, 0.90, 0.95};

struct SchemeConfig {
    std::string name = "exp-bayesian";  // exp-bayesian | two-point | efron
    double a = 0.0;                     // two-point lower support value
    double b = 0.0;                     // two-point upper support value
    long m = 0;                         // efron trial count (0 = sample size)
};

struct BandwidthConfig {
    bool fixed = false;
    double h = 0.0;         // when fixed
    double c = 1.0;         // c * n^{-exponent} otherwise
    double exponent = 0.2;
};

struct ExperimentConfig {
    std::string kind;  // rates | kiefer-rates | kde-rates | coverage | band |
                       // kde-band | simulate
    std::uint64_t seed = 42;
    SchemeConfig scheme;
    std::vector<std::size_t> n_grid;  // rate experiments
    std::size_t reps = 0;             // rate experiments, coverage, simulate
    std::size_t n = 0;                // coverage, simulate sample size
    std::size_t n_boot = 999;         // band, kde-band, coverage
    double alpha = 0.05;
    std::string kernel = "epanechnikov";
    BandwidthConfig bandwidth;
    std::string statistic = "sup";  // simulate: sup | partial-sum
    std::string data_path;          // band, kde-band input CSV
    std::string out_path;           // primary output file
    std::string report_path;        // secondary JSON report (band-family)
};

inline WeightScheme make_scheme(const SchemeConfig& sc) {
    if (sc.name == "exp-bayesian") return WeightScheme::exp_bayesian();
    if (sc.name == "two-point") return WeightScheme::two_point(sc.a, sc.b);
    if (sc.name == "efron") return WeightScheme::efron(sc.m);
    throw std::invalid_argument("unknown weight scheme: " + sc.name);
}

inline KernelSpec make_kernel(const std::string& name) {
    if (name == "epanechnikov") return KernelSpec::epanechnikov();
    if (name == "triangular") return KernelSpec::triangular();
    if (name == "uniform") return KernelSpec::uniform();
    if (name == "biweight") return KernelSpec::biweight();
    throw std::invalid_argument("unknown kernel: " + name);
}

inline BandwidthRule make_bandwidth_rule(const BandwidthConfig& bc) {
    if (bc.fixed) return BandwidthRule::fixed(bc.h);
    return BandwidthRule::power(bc.c, bc.exponent);
}

namespace detail {

inline bool is_rate_kind(const std::string& kind) {
    return kind == "rates" || kind == "kiefer-rates" || kind == "kde-rates";
}

inline bool is_known_kind(const std::string& kind) {
    return is_rate_kind(kind) || kind == "coverage" || kind == "band" ||
           kind == "kde-band" || kind == "simulate";
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& c) {
    if (!detail::is_known_kind(c.kind)) {
        throw std::invalid_argument("unknown experiment kind: '" + c.kind + "'");
    }
    if (c.scheme.name != "exp-bayesian" && c.scheme.name != "two-point" &&
        c.scheme.name != "efron") {
        throw std::invalid_argument("unknown weight scheme: " + c.scheme.name);
    }
    if (c.scheme.name == "efron" && c.kind != "band" && c.kind != "simulate") {
        throw std::invalid_argument(
            "efron weights are limited to band and simulate runs");
    }
    if (detail::is_rate_kind(c.kind)) {
        if (c.n_grid.empty()) throw std::invalid_argument("n_grid must be non-empty");
        for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
            if (c.n_grid[i] < 1) throw std::invalid_argument("n_grid entries must be >= 1");
            if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1]) {
                throw std::invalid_argument("n_grid must be strictly increasing");
            }
        }
        if (c.reps < 100) {
            throw std::invalid_argument("rate experiments need reps >= 100");
        }
    }
    if (c.kind == "coverage") {
        if (c.n < 1) throw std::invalid_argument("coverage needs n >= 1");
        if (c.reps < 100) throw std::invalid_argument("coverage needs reps >= 100");
        detail::quantile_index(c.n_boot, c.alpha);
    }
    if (c.kind == "band" || c.kind == "kde-band") {
        detail::quantile_index(c.n_boot, c.alpha);
    }
    if (c.kind == "simulate") {
        if (c.n < 1) throw std::invalid_argument("simulate needs n >= 1");
        if (c.reps < 1) throw std::invalid_argument("simulate needs reps >= 1");
        if (c.statistic != "sup" && c.statistic != "partial-sum") {
            throw std::invalid_argument("unknown statistic: '" + c.statistic +
                                        "' (expected sup or partial-sum)");
        }
    }
    if (c.kind == "kde-band" || c.kind == "kde-rates") {
        make_kernel(c.kernel);
        make_bandwidth_rule(c.bandwidth);
    }
    if (c.scheme.name == "two-point") {
        make_scheme(c.scheme);  // enforces the support/moment conditions
    }
}

// Canonical JSON form: every field serialized, fixed key order; the config
// echo embedded in every report uses exactly this rendering.
inline json config_to_json(const ExperimentConfig& c) {
    json scheme;
    scheme["name"] = c.scheme.name;
    if (c.scheme.name == "two-point") {
        scheme["a"] = c.scheme.a;
        scheme["b"] = c.scheme.b;
    }
    if (c.scheme.name == "efron") scheme["m"] = c.scheme.m;

    json bandwidth;
    if (c.bandwidth.fixed) {
        bandwidth["fixed"] = c.bandwidth.h;
    } else {
        bandwidth["c"] = c.bandwidth.c;
        bandwidth["exponent"] = c.bandwidth.exponent;
    }

    json j;
    j["kind"] = c.kind;
    j["seed"] = c.seed;
    j["scheme"] = scheme;
    j["n_grid"] = c.n_grid;
    j["reps"] = c.reps;
    j["n"] = c.n;
    j["n_boot"] = c.n_boot;
    j["alpha"] = c.alpha;
    j["kernel"] = c.kernel;
    j["bandwidth"] = bandwidth;
    j["statistic"] = c.statistic;
    j["data"] = c.data_path;
    j["out"] = c.out_path;
    j["report"] = c.report_path;
    return j;
}

namespace detail {

inline std::string config_type_error(const std::string& key, const char* expected) {
    return "config key '" + key + "' must be " + expected;
}

inline std::string require_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw std::invalid_argument(config_type_error(key, "a string"));
    return v.get<std::string>();
}

inline double require_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw std::invalid_argument(config_type_error(key, "a number"));
    return v.get<double>();
}

inline std::uint64_t require_uint(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) {
        return static_cast<std::uint64_t>(v.get<long long>());
    }
    throw std::invalid_argument(config_type_error(key, "a nonnegative integer"));
}

inline SchemeConfig scheme_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument(config_type_error("scheme", "an object"));
    SchemeConfig sc;
    for (const auto& [key, value] : j.items()) {
        if (key == "name") {
            sc.name = require_string(value, "scheme.name");
        } else if (key == "a") {
            sc.a = require_number(value, "scheme.a");
        } else if (key == "b") {
            sc.b = require_number(value, "scheme.b");
        } else if (key == "m") {
            sc.m = static_cast<long>(require_uint(value, "scheme.m"));
        } else {
            throw std::invalid_argument("unknown config key 'scheme." + key + "'");
        }
    }
    return sc;
}

inline BandwidthConfig bandwidth_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument(config_type_error("bandwidth", "an object"));
    }
    BandwidthConfig bc;
    for (const auto& [key, value] : j.items()) {
        if (key == "fixed") {
            bc.fixed = true;
            bc.h = require_number(value, "bandwidth.fixed");
        } else if (key == "c") {
            bc.c = require_number(value, "bandwidth.c");
        } else if (key == "exponent") {
            bc.exponent = require_number(value, "bandwidth.exponent");
        } else {
            throw std::invalid_argument("unknown config key 'bandwidth." + key + "'");
        }
    }
    return bc;
}

}  // namespace detail

// Apply the keys of a config object onto an existing config. Unknown keys and
// type mismatches are rejected so a typo cannot silently fall back to a
// default; keys absent from the object leave the current values alone.
inline void apply_config_json(ExperimentConfig& c, const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            c.kind = detail::require_string(value, key);
        } else if (key == "seed") {
            c.seed = detail::require_uint(value, key);
        } else if (key == "scheme") {
            c.scheme = detail::scheme_from_json(value);
        } else if (key == "n_grid") {
            if (!value.is_array()) {
                throw std::invalid_argument(detail::config_type_error(key, "an array"));
            }
            c.n_grid.clear();
            for (const auto& entry : value) {
                c.n_grid.push_back(
                    static_cast<std::size_t>(detail::require_uint(entry, "n_grid[]")));
            }
        } else if (key == "reps") {
            c.reps = static_cast<std::size_t>(detail::require_uint(value, key));
        } else if (key == "n") {
            c.n = static_cast<std::size_t>(detail::require_uint(value, key));
        } else if (key == "n_boot") {
            c.n_boot = static_cast<std::size_t>(detail::require_uint(value, key));
        } else if (key == "alpha") {
            c.alpha = detail::require_number(value, key);
        } else if (key == "kernel") {
            c.kernel = detail::require_string(value, key);
        } else if (key == "bandwidth") {
            c.bandwidth = detail::bandwidth_from_json(value);
        } else if (key == "statistic") {
            c.statistic = detail::require_string(value, key);
        } else if (key == "data") {
            c.data_path = detail::require_string(value, key);
        } else if (key == "out") {
            c.out_path = detail::require_string(value, key);
        } else if (key == "report") {
            c.report_path = detail::require_string(value, key);
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    apply_config_json(c, j);
    return c;
}

inline json load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
}

inline ExperimentConfig config_from_file(const std::string& path) {
    return config_from_json(load_config_json(path));
}

// ---------------------------------------------------------------------------
// Rate experiments
// ---------------------------------------------------------------------------

struct RateRow {
    std::size_t n = 0;
    std::size_t reps = 0;
    double h = 0.0;  // kde-rates only
    std::vector<double> quantile_values;
    std::vector<double> reference_quantile_values;         // kiefer-rates only
    double scale = 1.0;                                    // kiefer-rates: sqrt(n)
    std::vector<double> quantile_values_scaled;            // kiefer-rates only
    std::vector<double> reference_quantile_values_scaled;  // kiefer-rates only
    double ks_distance = 0.0;
    double envelope = 0.0;
    double envelope_n_term = 0.0;
    double envelope_h_term = 0.0;  // kde-rates only
    double ratio = 0.0;
    double mc_se = 0.0;
};

struct RateReport {
    std::string kind;
    std::uint64_t seed = 0;
    double trend_allowance = 0.0;
    bool trend_nonincreasing = true;
    double ratio_spread = 0.0;
    std::vector<RateRow> rows;
    ExperimentConfig config;

    json to_json() const {
        json j;
        j["kind"] = kind;
        j["seed"] = seed;
        j["config"] = config_to_json(config);
        j["trend_allowance"] = trend_allowance;
        j["trend_nonincreasing"] = trend_nonincreasing;
        j["ratio_spread"] = ratio_spread;
        json out_rows = json::array();
        for (const auto& row : rows) {
            json r;
            r["n"] = row.n;
            r["reps"] = row.reps;
            if (kind == "kde-rates") r["h"] = row.h;
            r["quantile_levels"] = kQuantileLevels;
            r["quantile_values"] = row.quantile_values;
            if (kind == "kiefer-rates") {
                r["reference_quantile_values"] = row.reference_quantile_values;
                r["scale"] = row.scale;
                r["quantile_values_scaled"] = row.quantile_values_scaled;
                r["reference_quantile_values_scaled"] =
                    row.reference_quantile_values_scaled;
            }
            r["ks_distance"] = row.ks_distance;
            r["envelope"] = row.envelope;
            if (kind == "kde-rates") {
                r["envelope_n_term"] = row.envelope_n_term;
                r["envelope_h_term"] = row.envelope_h_term;
            }
            r["ratio"] = row.ratio;
            r["mc_se"] = row.mc_se;
            out_rows.push_back(std::move(r));
        }
        j["rows"] = std::move(out_rows);
        return j;
    }
};

namespace detail {

inline Sample draw_uniform_sample(RandomStream& stream, std::size_t n) {
    std::vector<double> draws(n);
    for (double& d : draws) d = stream.u01();
    return Sample::from_draws(draws);
}

inline std::vector<double> quantiles_of_sorted(const std::vector<double>& sorted) {
    std::vector<double> q;
    q.reserve(kQuantileLevels.size());
    for (double p : kQuantileLevels) q.push_back(empirical_quantile(sorted, p));
    return q;
}

// Fluctuation scale of an exact KS distance estimated from `reps` draws;
// trend assertions allow 2 of these per side (hence the sqrt(2) below).
inline double ks_mc_se(std::size_t reps) {
    return 0.5 / std::sqrt(static_cast<double>(reps));
}

inline void finish_rate_report(RateReport& report) {
    const std::size_t reps = report.rows.empty() ? 1 : report.rows.front().reps;
    report.trend_allowance = 2.0 * std::sqrt(2.0) * ks_mc_se(reps);
    report.trend_nonincreasing = true;
    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
        if (report.rows[i + 1].ks_distance - report.rows[i].ks_distance >
            report.trend_allowance) {
            report.trend_nonincreasing = false;
        }
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& row : report.rows) {
        lo = std::min(lo, row.ratio);
        hi = std::max(hi, row.ratio);
    }
    report.ratio_spread = lo > 0.0 ? hi / lo : 0.0;
}

}  // namespace detail

// Law of the sup statistic against its reference: for each n, draw `reps`
// values of sup_t sqrt(n)|F*_n - F_n| (fresh uniform sample + weights per
// replicate) and report the exact KS distance to the sup-bridge law together
// with the log n / sqrt(n) envelope.
inline RateReport run_rate_experiment(const ExperimentConfig& config) {
    validate_config(config);
    if (config.kind != "rates") throw std::invalid_argument("run_rate_experiment: kind must be 'rates'");
    const WeightScheme scheme = make_scheme(config.scheme);

    RateReport report;
    report.kind = config.kind;
    report.seed = config.seed;
    report.config = config;
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
        const std::size_t n = config.n_grid[i];
        std::vector<double> values(config.reps, 0.0);
        parallel_for(config.reps, [&](std::size_t r) {
            RandomStream rep = derive_substream(config.seed, {kTagRates, i, r});
            auto sample_stream = rep.child(0);
            const Sample sample = detail::draw_uniform_sample(sample_stream, n);
            auto weight_stream = rep.child(1);
            const WeightVector wv = draw_weight_vector(scheme, n, weight_stream);
            values[r] = sup_process_distance(sample, wv);
        });
        std::sort(values.begin(), values.end());

        RateRow row;
        row.n = n;
        row.reps = config.reps;
        row.quantile_values = detail::quantiles_of_sorted(values);
        row.ks_distance = ks_distance_to_cdf(values, [](double x) { return kolmogorov_cdf(x); });
        const double nd = static_cast<double>(n);
        row.envelope = std::log(nd) / std::sqrt(nd);
        row.envelope_n_term = row.envelope;
        row.ratio = row.envelope > 0.0 ? row.ks_distance / row.envelope : 0.0;
        row.mc_se = detail::ks_mc_se(config.reps);
        report.rows.push_back(std::move(row));
    }
    detail::finish_rate_report(report);
    return report;
}

namespace detail {

// max_{k<=n} sup_t |K(t, k)| / n with the Kiefer field realized as a running
// sum of bridges on the given unit grid; draw-for-draw identical to
// sample_kiefer with k_max = n but without materializing the field.
inline double kiefer_max_statistic(const std::vector<double>& unit_grid, std::size_t n,
                                   RandomStream& stream) {
    std::vector<double> running(unit_grid.size(), 0.0);
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const BridgePath bridge = sample_bridge(unit_grid, stream);
        for (std::size_t g = 0; g < unit_grid.size(); ++g) {
            running[g] += bridge.values[g];
            const double a = std::abs(running[g]);
            if (a > best) best = a;
        }
    }
    return best / static_cast<double>(n);
}

}  // namespace detail

// Partial-sum process law against its matched Gaussian-field law: for each n,
// `reps` draws of max_{k<=n} sup_t |sum_{i<=k}(W_i - 1/n) 1{X_i<=t}| on the
// bootstrap side and of max_{k<=n} sup |K(t,k)|/n on the field side (uniform
// (n+1)-point grid, k_max = n); the two-sample KS distance between the MC
// laws is reported with the n^{-3/4} sqrt(log n) envelope. Quantiles are
// reported raw and sqrt(n)-scaled.
inline RateReport run_kiefer_rate_experiment(const ExperimentConfig& config) {
    validate_config(config);
    if (config.kind != "kiefer-rates") {
        throw std::invalid_argument("run_kiefer_rate_experiment: kind must be 'kiefer-rates'");
    }
    const WeightScheme scheme = make_scheme(config.scheme);

    RateReport report;
    report.kind = config.kind;
    report.seed = config.seed;
    report.config = config;
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
        const std::size_t n = config.n_grid[i];
        std::vector<double> unit_grid(n + 1);
        for (std::size_t g = 0; g <= n; ++g) {
            unit_grid[g] = static_cast<double>(g) / static_cast<double>(n);
        }
        unit_grid.front() = 0.0;
        unit_grid.back() = 1.0;

        std::vector<double> boot_values(config.reps, 0.0);
        std::vector<double> field_values(config.reps, 0.0);
        parallel_for(config.reps, [&](std::size_t r) {
            RandomStream rep = derive_substream(config.seed, {kTagKieferRates, i, r});
            auto sample_stream = rep.child(0);
            const Sample sample = detail::draw_uniform_sample(sample_stream, n);
            auto weight_stream = rep.child(1);
            const WeightVector wv = draw_weight_vector(scheme, n, weight_stream);
            boot_values[r] = partial_sum_process_max(sample, wv);
            auto gauss_stream = rep.child(2);
            field_values[r] = detail::kiefer_max_statistic(unit_grid, n, gauss_stream);
        });
        std::sort(boot_values.begin(), boot_values.end());
        std::sort(field_values.begin(), field_values.end());

        RateRow row;
        row.n = n;
        row.reps = config.reps;
        row.quantile_values = detail::quantiles_of_sorted(boot_values);
        row.reference_quantile_values = detail::quantiles_of_sorted(field_values);
        const double nd = static_cast<double>(n);
        row.scale = std::sqrt(nd);
        for (double q : row.quantile_values) row.quantile_values_scaled.push_back(q * row.scale);
        for (double q : row.reference_quantile_values) {
            row.reference_quantile_values_scaled.push_back(q * row.scale);
        }
        row.ks_distance = ks_distance_two_sample(boot_values, field_values);
        row.envelope = std::sqrt(std::log(nd)) / std::pow(nd, 0.75);
        row.envelope_n_term = row.envelope;
        row.ratio = row.envelope > 0.0 ? row.ks_distance / row.envelope : 0.0;
        row.mc_se = detail::ks_mc_se(config.reps);
        report.rows.push_back(std::move(row));
    }
    detail::finish_rate_report(report);
    return report;
}

// Evaluation grid for sup_x |gamma*|: the sample range padded by the kernel
// reach, spacing h/16.
inline std::vector<double> kde_evaluation_grid(const Sample& sample, const KernelSpec& kernel,
                                               double h) {
    const double pad = kernel.half_width * h;
    const double lo = sample.sorted.front() - pad;
    const double hi = sample.sorted.back() + pad;
    const double step = h / 16.0;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-12));
    std::vector<double> grid;
    grid.reserve(count + 2);
    for (std::size_t i = 0; i <= count; ++i) {
        grid.push_back(lo + static_cast<double>(i) * step);
    }
    if (grid.back() < hi) grid.push_back(hi);
    return grid;
}

// Law of sup_x |gamma*_n| per n, its exact KS distance to the sup-bridge law,
// and the two-part envelope log n / sqrt(n) + h sqrt(log(1/h)).
inline RateReport run_kde_rate_experiment(const ExperimentConfig& config) {
    validate_config(config);
    if (config.kind != "kde-rates") {
        throw std::invalid_argument("run_kde_rate_experiment: kind must be 'kde-rates'");
    }
    const WeightScheme scheme = make_scheme(config.scheme);
    const KernelSpec kernel = make_kernel(config.kernel);
    const BandwidthRule rule = make_bandwidth_rule(config.bandwidth);

    RateReport report;
    report.kind = config.kind;
    report.seed = config.seed;
    report.config = config;
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
        const std::size_t n = config.n_grid[i];
        const double h = rule.at(n);
        std::vector<double> values(config.reps, 0.0);
        parallel_for(config.reps, [&](std::size_t r) {
            RandomStream rep = derive_substream(config.seed, {kTagKdeRates, i, r});
            auto sample_stream = rep.child(0);
            const Sample sample = detail::draw_uniform_sample(sample_stream, n);
            auto weight_stream = rep.child(1);
            const WeightVector wv = draw_weight_vector(scheme, n, weight_stream);
            const auto x_grid = kde_evaluation_grid(sample, kernel, h);
            const auto gs = gamma_star(sample, wv, kernel, h, x_grid);
            double sup = 0.0;
            for (double v : gs) sup = std::max(sup, std::abs(v));
            values[r] = sup;
        });
        std::sort(values.begin(), values.end());

        RateRow row;
        row.n = n;
        row.reps = config.reps;
        row.h = h;
        row.quantile_values = detail::quantiles_of_sorted(values);
        row.ks_distance = ks_distance_to_cdf(values, [](double x) { return kolmogorov_cdf(x); });
        const double nd = static_cast<double>(n);
        row.envelope_n_term = std::log(nd) / std::sqrt(nd);
        row.envelope_h_term = h * std::sqrt(std::max(0.0, std::log(1.0 / h)));
        row.envelope = row.envelope_n_term + row.envelope_h_term;
        row.ratio = row.envelope > 0.0 ? row.ks_distance / row.envelope : 0.0;
        row.mc_se = detail::ks_mc_se(config.reps);
        report.rows.push_back(std::move(row));
    }
    detail::finish_rate_report(report);
    return report;
}

// ---------------------------------------------------------------------------
// Config-driven runners behind the CLI
// ---------------------------------------------------------------------------

struct CoverageRunResult {
    CoverageReport report;
    json summary;
};

inline CoverageRunResult run_coverage_experiment(const ExperimentConfig& config) {
    validate_config(config);
    if (config.kind != "coverage") {
        throw std::invalid_argument("run_coverage_experiment: kind must be 'coverage'");
    }
    const WeightScheme scheme = make_scheme(config.scheme);
    const RandomStream parent = derive_substream(config.seed, {kTagCoverage, 0});
    CoverageRunResult result;
    result.report = coverage_experiment(
        [](double t) { return t <= 0.0 ? 0.0 : (t >= 1.0 ? 1.0 : t); },
        [](RandomStream& s) { return s.u01(); }, config.n, scheme, config.n_boot,
        config.alpha, config.reps, parent);
    json j;
    j["kind"] = config.kind;
    j["seed"] = config.seed;
    j["config"] = config_to_json(config);
    j["coverage"] = result.report.coverage;
    j["covered"] = result.report.covered;
    j["reps"] = result.report.reps;
    j["std_error"] = result.report.std_error;
    j["mean_radius"] = result.report.mean_radius;
    j["n"] = result.report.n;
    j["n_boot"] = result.report.n_boot;
    j["alpha"] = result.report.alpha;
    result.summary = std::move(j);
    return result;
}

struct BandRunResult {
    BandEstimate estimate;
    CdfBand band;
    std::string csv;
    json summary;
};

inline BandRunResult run_band(const ExperimentConfig& config, const Sample& sample) {
    validate_config(config);
    if (config.kind != "band") throw std::invalid_argument("run_band: kind must be 'band'");
    const WeightScheme scheme = make_scheme(config.scheme);
    BandRunResult result;
    result.estimate = estimate_band_radius(sample, scheme, config.n_boot, config.alpha,
                                           derive_substream(config.seed, {kTagBand, 0}));
    result.band = cdf_confidence_band(sample, result.estimate.radius);
    result.csv = render_cdf_band_csv(sample, result.band);
    json j;
    j["kind"] = config.kind;
    j["radius"] = result.estimate.radius;
    j["alpha"] = config.alpha;
    j["N"] = config.n_boot;
    j["n"] = sample.n();
    j["seed"] = config.seed;
    j["config"] = config_to_json(config);
    result.summary = std::move(j);
    return result;
}

struct KdeBandRunResult {
    KdeBand band;
    std::string csv;
    json summary;
};

inline KdeBandRunResult run_kde_band(const ExperimentConfig& config, const Sample& sample) {
    validate_config(config);
    if (config.kind != "kde-band") {
        throw std::invalid_argument("run_kde_band: kind must be 'kde-band'");
    }
    const WeightScheme scheme = make_scheme(config.scheme);
    const KernelSpec kernel = make_kernel(config.kernel);
    const BandwidthRule rule = make_bandwidth_rule(config.bandwidth);
    const auto x_grid = kde_evaluation_grid(sample, kernel, rule.at(sample.n()));
    KdeBandRunResult result;
    result.band =
        kde_confidence_band(sample, kernel, rule, scheme, config.n_boot, config.alpha,
                            x_grid, derive_substream(config.seed, {kTagKdeBand, 0}));
    result.csv = render_kde_band_csv(result.band);
    json j;
    j["kind"] = config.kind;
    j["radius"] = result.band.radius;
    j["alpha"] = config.alpha;
    j["N"] = config.n_boot;
    j["n"] = sample.n();
    j["h"] = result.band.h;
    j["seed"] = config.seed;
    j["config"] = config_to_json(config);
    result.summary = std::move(j);
    return result;
}

struct SimulateResult {
    std::vector<double> values;
    std::string csv;
    json summary;
};

// Raw per-replicate statistic dump: each replicate draws a fresh uniform
// sample and weight vector and records either the sup statistic or the
// partial-sum maximum.
inline SimulateResult run_simulate(const ExperimentConfig& config) {
    validate_config(config);
    if (config.kind != "simulate") {
        throw std::invalid_argument("run_simulate: kind must be 'simulate'");
    }
    const WeightScheme scheme = make_scheme(config.scheme);
    const bool partial = config.statistic == "partial-sum";
    SimulateResult result;
    result.values.assign(config.reps, 0.0);
    parallel_for(config.reps, [&](std::size_t r) {
        RandomStream rep = derive_substream(config.seed, {kTagSimulate, 0, r});
        auto sample_stream = rep.child(0);
        const Sample sample = detail::draw_uniform_sample(sample_stream, config.n);
        auto weight_stream = rep.child(1);
        const WeightVector wv = draw_weight_vector(scheme, config.n, weight_stream);
        result.values[r] = partial ? partial_sum_process_max(sample, wv)
                                   : sup_process_distance(sample, wv);
    });
    result.csv = render_values_csv(result.values, config.statistic);

    std::vector<double> sorted = result.values;
    std::sort(sorted.begin(), sorted.end());
    KahanSum total;
    for (double v : sorted) total.add(v);
    json j;
    j["kind"] = config.kind;
    j["seed"] = config.seed;
    j["config"] = config_to_json(config);
    j["statistic"] = config.statistic;
    j["n"] = config.n;
    j["reps"] = config.reps;
    j["quantile_levels"] = kQuantileLevels;
    j["quantile_values"] = detail::quantiles_of_sorted(sorted);
    j["mean"] = total.value() / static_cast<double>(config.reps);
    result.summary = std::move(j);
    return result;
}

}  // namespace wboot
