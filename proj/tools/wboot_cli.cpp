// wboot: weighted-bootstrap empirical process toolkit.
//
// Subcommands run one experiment kind each.  Command-line flags feed an
// ExperimentConfig; when --config FILE is given, keys present in the file
// override the flags, and the file's "kind" (if any) must match the
// subcommand.  Exit codes: 0 success, 2 configuration/usage error, 1 runtime
// failure (unreadable input files and the like).

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wboot/wboot.hpp"

namespace {

struct CliState {
    wboot::ExperimentConfig config;
    std::string config_path;
    std::string n_text;          // single value or comma list, depending on kind
    double fixed_h = 0.0;
    bool fixed_h_given = false;
    long reps = -1;              // -1: not given on the command line
    long n_boot = -1;
};

bool is_rate_kind(const std::string& kind) {
    return kind == "rates" || kind == "kiefer-rates" || kind == "kde-rates";
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string piece = text.substr(pos, comma - pos);
        if (piece.empty()) throw std::invalid_argument("--n: empty entry in '" + text + "'");
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(piece, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("--n: not a positive integer: '" + piece + "'");
        }
        if (used != piece.size()) {
            throw std::invalid_argument("--n: not a positive integer: '" + piece + "'");
        }
        out.push_back(static_cast<std::size_t>(v));
        pos = comma + 1;
    }
    return out;
}

// Flags first, then the config file on top; enforce path requirements that
// CLI11 cannot see because either source may supply them.
void finalize_config(CliState& st, const std::string& kind) {
    st.config.kind = kind;
    if (st.reps >= 0) st.config.reps = static_cast<std::size_t>(st.reps);
    if (st.n_boot >= 0) st.config.n_boot = static_cast<std::size_t>(st.n_boot);
    if (st.fixed_h_given) {
        st.config.bandwidth.fixed = true;
        st.config.bandwidth.h = st.fixed_h;
    }
    if (!st.n_text.empty()) {
        const auto values = parse_size_list(st.n_text);
        if (is_rate_kind(kind)) {
            st.config.n_grid = values;
        } else {
            if (values.size() != 1) {
                throw std::invalid_argument("--n: " + kind + " takes a single sample size");
            }
            st.config.n = values[0];
        }
    }
    if (!st.config_path.empty()) {
        wboot::apply_config_json(st.config, wboot::load_config_json(st.config_path));
        if (st.config.kind != kind) {
            throw std::invalid_argument("config file kind '" + st.config.kind +
                                        "' does not match subcommand '" + kind + "'");
        }
    }
    wboot::validate_config(st.config);
    if ((kind == "band" || kind == "kde-band") && st.config.data_path.empty()) {
        throw std::invalid_argument("--data is required for " + kind);
    }
    if ((kind == "band" || kind == "kde-band" || kind == "simulate") &&
        st.config.out_path.empty()) {
        throw std::invalid_argument("--out is required for " + kind);
    }
}

void emit_json(const wboot::json& document, const std::string& path) {
    const std::string text = document.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
    } else {
        wboot::write_text_file(path, text);
    }
}

wboot::Sample load_sample(const std::string& path) {
    return wboot::Sample::from_draws(wboot::read_sample_csv(path));
}

int run_subcommand(const std::string& kind, CliState& st) {
    finalize_config(st, kind);
    const auto& config = st.config;

    if (is_rate_kind(kind)) {
        wboot::RateReport report;
        if (kind == "rates") {
            report = wboot::run_rate_experiment(config);
        } else if (kind == "kiefer-rates") {
            report = wboot::run_kiefer_rate_experiment(config);
        } else {
            report = wboot::run_kde_rate_experiment(config);
        }
        emit_json(report.to_json(), config.out_path);
        return 0;
    }
    if (kind == "coverage") {
        const auto result = wboot::run_coverage_experiment(config);
        emit_json(result.summary, config.out_path);
        return 0;
    }
    if (kind == "band") {
        const auto result = wboot::run_band(config, load_sample(config.data_path));
        wboot::write_text_file(config.out_path, result.csv);
        if (!config.report_path.empty()) emit_json(result.summary, config.report_path);
        std::cout << result.summary.dump(2) << "\n";
        return 0;
    }
    if (kind == "kde-band") {
        const auto result = wboot::run_kde_band(config, load_sample(config.data_path));
        wboot::write_text_file(config.out_path, result.csv);
        if (!config.report_path.empty()) emit_json(result.summary, config.report_path);
        std::cout << result.summary.dump(2) << "\n";
        return 0;
    }
    if (kind == "simulate") {
        const auto result = wboot::run_simulate(config);
        wboot::write_text_file(config.out_path, result.csv);
        if (!config.report_path.empty()) emit_json(result.summary, config.report_path);
        std::cout << result.summary.dump(2) << "\n";
        return 0;
    }
    throw std::invalid_argument("unknown experiment kind: '" + kind + "'");
}

void add_common_options(CLI::App* sub, CliState& st) {
    sub->add_option("--seed", st.config.seed, "master seed (default 42)");
    sub->add_option("--config", st.config_path,
                    "JSON config file; its keys override command-line flags");
    sub->add_option("--out", st.config.out_path, "output file path");
    sub->add_option("--scheme", st.config.scheme.name,
                    "weight scheme: exp-bayesian | two-point | efron");
    sub->add_option("--a", st.config.scheme.a, "two-point lower support value");
    sub->add_option("--b", st.config.scheme.b, "two-point upper support value");
    sub->add_option("--m", st.config.scheme.m, "efron trial count (0 = sample size)");
}

void add_kernel_options(CLI::App* sub, CliState& st) {
    sub->add_option("--kernel", st.config.kernel,
                    "kernel: epanechnikov | triangular | uniform | biweight");
    sub->add_option("--bandwidth-c", st.config.bandwidth.c,
                    "bandwidth constant in h = c * n^-exponent");
    sub->add_option("--bandwidth-exponent", st.config.bandwidth.exponent,
                    "bandwidth exponent in h = c * n^-exponent");
    sub->add_option("--bandwidth", st.fixed_h, "fixed bandwidth (overrides the power rule)")
        ->each([&st](const std::string&) { st.fixed_h_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted bootstrap of empirical processes"};
    app.require_subcommand(1);
    CliState st;

    auto* rates = app.add_subcommand(
        "rates", "sup-statistic law vs the Kolmogorov limit over a sample-size grid");
    add_common_options(rates, st);
    rates->add_option("--n", st.n_text, "comma-separated sample sizes");
    rates->add_option("--reps", st.reps, "Monte Carlo replicates per sample size");

    auto* kiefer = app.add_subcommand(
        "kiefer-rates",
        "partial-sum maximum law vs a matched Gaussian-field law over a grid");
    add_common_options(kiefer, st);
    kiefer->add_option("--n", st.n_text, "comma-separated sample sizes");
    kiefer->add_option("--reps", st.reps, "Monte Carlo replicates per sample size");

    auto* kde_rates = app.add_subcommand(
        "kde-rates", "sup distance of the bootstrapped density error process");
    add_common_options(kde_rates, st);
    kde_rates->add_option("--n", st.n_text, "comma-separated sample sizes");
    kde_rates->add_option("--reps", st.reps, "Monte Carlo replicates per sample size");
    add_kernel_options(kde_rates, st);

    auto* coverage = app.add_subcommand(
        "coverage", "empirical coverage of the bootstrap distribution band");
    add_common_options(coverage, st);
    coverage->add_option("--n", st.n_text, "sample size");
    coverage->add_option("--reps", st.reps, "Monte Carlo replicates");
    coverage->add_option("--boot", st.n_boot, "bootstrap draws per replicate");
    coverage->add_option("--alpha", st.config.alpha, "nominal miscoverage level");

    auto* band = app.add_subcommand(
        "band", "distribution-function confidence band for a data file");
    add_common_options(band, st);
    band->add_option("--data", st.config.data_path, "CSV file with one numeric column");
    band->add_option("--report", st.config.report_path, "also write a JSON summary here");
    band->add_option("--boot", st.n_boot, "bootstrap draws");
    band->add_option("--alpha", st.config.alpha, "nominal miscoverage level");

    auto* kde_band = app.add_subcommand(
        "kde-band", "density confidence band for a data file");
    add_common_options(kde_band, st);
    kde_band->add_option("--data", st.config.data_path, "CSV file with one numeric column");
    kde_band->add_option("--report", st.config.report_path, "also write a JSON summary here");
    kde_band->add_option("--boot", st.n_boot, "bootstrap draws");
    kde_band->add_option("--alpha", st.config.alpha, "nominal miscoverage level");
    add_kernel_options(kde_band, st);

    auto* simulate = app.add_subcommand(
        "simulate", "dump raw bootstrap statistic replicates as CSV");
    add_common_options(simulate, st);
    simulate->add_option("--n", st.n_text, "sample size");
    simulate->add_option("--reps", st.reps, "number of replicates");
    simulate->add_option("--report", st.config.report_path, "also write a JSON summary here");
    simulate->add_option("--statistic", st.config.statistic, "sup | partial-sum");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    try {
        return run_subcommand(app.get_subcommands().front()->get_name(), st);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
