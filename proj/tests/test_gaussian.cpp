#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

#include "wboot/gaussian.hpp"
#include "wboot/rng.hpp"
#include "wboot/stats.hpp"

namespace {

std::vector<double> uniform_grid(std::size_t m) {
    std::vector<double> g(m + 1);
    for (std::size_t i = 0; i <= m; ++i) g[i] = static_cast<double>(i) / static_cast<double>(m);
    g.front() = 0.0;
    g.back() = 1.0;
    return g;
}

double mean_of(const std::vector<double>& xs) {
    wboot::KahanSum s;
    for (double x : xs) s.add(x);
    return s.value() / static_cast<double>(xs.size());
}

double variance_of(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    wboot::KahanSum s;
    for (double x : xs) s.add((x - m) * (x - m));
    return s.value() / static_cast<double>(xs.size());
}

double covariance_of(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double mx = mean_of(xs), my = mean_of(ys);
    wboot::KahanSum s;
    for (std::size_t i = 0; i < xs.size(); ++i) s.add((xs[i] - mx) * (ys[i] - my));
    return s.value() / static_cast<double>(xs.size());
}

double correlation_of(const std::vector<double>& xs, const std::vector<double>& ys) {
    return covariance_of(xs, ys) / std::sqrt(variance_of(xs) * variance_of(ys));
}

// Independent reference for the sup|B| law: fixed 200-term alternating series
// summed in reverse order with compensation, no early stopping.
double kolmogorov_series_reference(double x) {
    wboot::KahanSum s;
    for (int k = 200; k >= 1; --k) {
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        s.add(sign * std::exp(-2.0 * k * k * x * x));
    }
    const double v = 1.0 - 2.0 * s.value();
    return std::min(1.0, std::max(0.0, v));
}

}  // namespace

TEST_CASE("bridge paths pin endpoints and reproduce deterministically") {
    const auto grid = uniform_grid(16);
    wboot::RandomStream s1(2026, {100, 1});
    wboot::RandomStream s2(2026, {100, 1});
    wboot::RandomStream s3(2026, {100, 2});
    const auto p1 = wboot::sample_bridge(grid, s1);
    const auto p2 = wboot::sample_bridge(grid, s2);
    const auto p3 = wboot::sample_bridge(grid, s3);

    REQUIRE(p1.values.size() == grid.size());
    CHECK(p1.values.front() == 0.0);
    CHECK(p1.values.back() == 0.0);
    CHECK(p1.values == p2.values);
    CHECK(p1.values != p3.values);

    bool some_nonzero = false;
    for (double v : p1.values) {
        if (v != 0.0) some_nonzero = true;
    }
    CHECK(some_nonzero);
}

TEST_CASE("bridge sampling rejects bad grids") {
    wboot::RandomStream s(1, {100, 3});
    CHECK_THROWS_AS(wboot::sample_bridge({0.0, 0.5, 0.9}, s), std::invalid_argument);
    CHECK_THROWS_AS(wboot::sample_bridge({0.1, 0.5, 1.0}, s), std::invalid_argument);
    CHECK_THROWS_AS(wboot::sample_bridge({0.0, 0.6, 0.5, 1.0}, s), std::invalid_argument);
    CHECK_THROWS_AS(wboot::sample_bridge({0.0, 0.5, 0.5, 1.0}, s), std::invalid_argument);
    CHECK_THROWS_AS(wboot::sample_bridge({1.0}, s), std::invalid_argument);
}

TEST_CASE("bridge marginal variance and covariance match min(s,t) - st") {
    const std::size_t reps = 10000;

    std::vector<double> at_half;
    at_half.reserve(reps);
    {
        const std::vector<double> grid{0.0, 0.5, 1.0};
        wboot::RandomStream stream(2026, {100, 4});
        for (std::size_t r = 0; r < reps; ++r) {
            auto sub = stream.child(r);
            at_half.push_back(wboot::sample_bridge(grid, sub).values[1]);
        }
    }
    // Var B(1/2) = 1/4; sample variance SE ~ Var * sqrt(2/reps).
    CHECK(std::abs(mean_of(at_half)) < 0.02);
    CHECK(variance_of(at_half) == Catch::Approx(0.25).margin(3.0 * 0.25 * std::sqrt(2.0 / reps)));

    std::vector<double> at_q, at_3q;
    at_q.reserve(reps);
    at_3q.reserve(reps);
    {
        const std::vector<double> grid{0.0, 0.25, 0.75, 1.0};
        wboot::RandomStream stream(2026, {100, 5});
        for (std::size_t r = 0; r < reps; ++r) {
            auto sub = stream.child(r);
            const auto path = wboot::sample_bridge(grid, sub);
            at_q.push_back(path.values[1]);
            at_3q.push_back(path.values[2]);
        }
    }
    // Cov(B(1/4), B(3/4)) = 1/4 - 3/16 = 1/16.
    CHECK(covariance_of(at_q, at_3q) == Catch::Approx(0.0625).margin(0.01));
}

TEST_CASE("kiefer field is the running sum of independent bridges") {
    const std::vector<double> grid{0.0, 0.5, 1.0};

    SECTION("rows accumulate exactly the bridges drawn from the same stream") {
        wboot::RandomStream sa(7, {100, 6});
        wboot::RandomStream sb(7, {100, 6});
        const auto field = wboot::sample_kiefer(grid, 3, sa);
        const auto b1 = wboot::sample_bridge(grid, sb);
        const auto b2 = wboot::sample_bridge(grid, sb);
        const auto b3 = wboot::sample_bridge(grid, sb);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            CHECK(field.at(1, g) == b1.values[g]);
            CHECK(field.at(2, g) == b1.values[g] + b2.values[g]);
            CHECK(field.at(3, g) == b1.values[g] + b2.values[g] + b3.values[g]);
        }
    }

    SECTION("marginal variance at (1/2, 4) and increment independence") {
        const std::size_t reps = 10000;
        std::vector<double> k4, k1, inc21;
        k4.reserve(reps);
        k1.reserve(reps);
        inc21.reserve(reps);
        wboot::RandomStream stream(2026, {100, 7});
        for (std::size_t r = 0; r < reps; ++r) {
            auto sub = stream.child(r);
            const auto field = wboot::sample_kiefer(grid, 4, sub);
            k4.push_back(field.at(4, 1));
            k1.push_back(field.at(1, 1));
            inc21.push_back(field.at(2, 1) - field.at(1, 1));
        }
        // Var K(1/2, 4) = 4 * (1/2)(1 - 1/2) = 1.
        CHECK(variance_of(k4) == Catch::Approx(1.0).margin(0.06));
        CHECK(std::abs(correlation_of(inc21, k1)) < 0.03);
    }

    SECTION("argument validation") {
        wboot::RandomStream s(1, {100, 8});
        CHECK_THROWS_AS(wboot::sample_kiefer(grid, 0, s), std::invalid_argument);
        CHECK_THROWS_AS(wboot::sample_kiefer({0.0, 0.5}, 2, s), std::invalid_argument);
    }
}

TEST_CASE("kolmogorov cdf matches an independent series evaluation") {
    for (double x : {0.3, 0.5, 0.8, 1.0, 1.3581, 2.0, 3.0}) {
        CHECK(wboot::kolmogorov_cdf(x) ==
              Catch::Approx(kolmogorov_series_reference(x)).margin(1e-12));
    }
    CHECK(wboot::kolmogorov_cdf(0.5) == Catch::Approx(0.036055).margin(1e-5));
    CHECK(wboot::kolmogorov_cdf(0.0) == 0.0);
    CHECK(wboot::kolmogorov_cdf(0.02) == 0.0);
    CHECK(wboot::kolmogorov_cdf(5.0) == Catch::Approx(1.0).margin(1e-15));
    CHECK_THROWS_AS(wboot::kolmogorov_cdf(-0.1), std::invalid_argument);

    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = wboot::kolmogorov_cdf(3.0 * i / 1000.0);
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("kolmogorov quantile inverts the cdf") {
    CHECK(wboot::kolmogorov_quantile(0.95) == Catch::Approx(1.35810).margin(1e-4));
    for (double p : {0.1, 0.5, 0.9, 0.95, 0.99}) {
        CHECK(wboot::kolmogorov_cdf(wboot::kolmogorov_quantile(p)) ==
              Catch::Approx(p).margin(1e-9));
    }
    CHECK(wboot::kolmogorov_quantile(0.90) < wboot::kolmogorov_quantile(0.95));
    CHECK(wboot::kolmogorov_quantile(0.95) < wboot::kolmogorov_quantile(0.99));
    CHECK_THROWS_AS(wboot::kolmogorov_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(wboot::kolmogorov_quantile(1.0), std::invalid_argument);
    CHECK_THROWS_AS(wboot::kolmogorov_quantile(-0.5), std::invalid_argument);
}

TEST_CASE("composition with a cdf interpolates the path") {
    const auto grid = uniform_grid(8);
    wboot::RandomStream s(11, {100, 9});
    const auto path = wboot::sample_bridge(grid, s);

    SECTION("identity cdf on the path grid returns the path values") {
        const auto out =
            wboot::compose_with_cdf(path, [](double t) { return t; }, grid);
        REQUIRE(out.size() == grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(out[i] == path.values[i]);
    }

    SECTION("points outside the support map to exactly zero") {
        auto unif25 = [](double t) {
            return std::min(1.0, std::max(0.0, (t - 2.0) / 3.0));
        };
        const auto out = wboot::compose_with_cdf(path, unif25, {-4.0, 1.0, 2.0, 5.0, 9.0});
        CHECK(out[0] == 0.0);
        CHECK(out[1] == 0.0);
        CHECK(out[2] == 0.0);  // F = 0 at the left edge
        CHECK(out[3] == 0.0);  // F = 1 at the right edge
        CHECK(out[4] == 0.0);
    }

    SECTION("interior points interpolate linearly") {
        auto unif25 = [](double t) {
            return std::min(1.0, std::max(0.0, (t - 2.0) / 3.0));
        };
        // F(3.5) = 0.5 = grid[4]; F(2.375) = 1/8 = grid[1].
        const auto out = wboot::compose_with_cdf(path, unif25, {2.375, 3.5});
        CHECK(out[0] == Catch::Approx(path.values[1]).margin(1e-15));
        CHECK(out[1] == Catch::Approx(path.values[4]).margin(1e-15));
        // Halfway between grid[4] and grid[5]: F(t) = 0.5625 at t = 3.6875.
        const auto mid = wboot::compose_with_cdf(path, unif25, {3.6875});
        CHECK(mid[0] ==
              Catch::Approx(0.5 * (path.values[4] + path.values[5])).margin(1e-12));
    }

    SECTION("errors") {
        CHECK_THROWS_AS(
            wboot::compose_with_cdf(path, [](double t) { return t; }, {0.5, 0.2}),
            std::invalid_argument);
        CHECK_THROWS_AS(
            wboot::compose_with_cdf(path, [](double) { return 1.5; }, {0.5}),
            std::runtime_error);
    }
}

TEST_CASE("modulus statistic on synthetic and degenerate paths") {
    wboot::BridgePath path;
    path.grid = uniform_grid(32);

    SECTION("constant-zero path gives zero") {
        path.values.assign(33, 0.0);
        CHECK(wboot::modulus_statistic(path, 0.5) == 0.0);
        wboot::BridgePath fine;
        fine.grid = uniform_grid(64);
        fine.values.assign(65, 0.0);
        CHECK(wboot::modulus_statistic(fine, 0.25) == 0.0);
    }

    SECTION("hand-evaluated piecewise-linear path") {
        // Rises to 0.8 at index 10, falls to -0.3 at index 17, back to 0.
        path.values.assign(33, 0.0);
        for (std::size_t i = 0; i <= 10; ++i) path.values[i] = 0.8 * static_cast<double>(i) / 10.0;
        for (std::size_t i = 11; i <= 17; ++i)
            path.values[i] = 0.8 - 1.1 * static_cast<double>(i - 10) / 7.0;
        for (std::size_t i = 18; i <= 32; ++i)
            path.values[i] = -0.3 + 0.3 * static_cast<double>(i - 17) / 15.0;
        // Max and min are 7/32 apart, inside the delta = 1/2 window:
        // (0.8 + 0.3) / sqrt(2 * 0.5 * log 2).
        CHECK(wboot::modulus_statistic(path, 0.5) ==
              Catch::Approx(1.1 / std::sqrt(std::log(2.0))).margin(1e-12));
    }

    SECTION("the pair window |u - v| < delta is strict") {
        // On a 65-point grid with delta = 1/4, pairs up to 15 steps apart
        // (15/64 < 1/4) count; 16 steps (exactly 1/4) do not. Peak at index
        // 20 and trough at index 36 are 16 steps apart, so the best pair sits
        // on the linear descent: range 1.1 * 15/16.
        wboot::BridgePath fine;
        fine.grid = uniform_grid(64);
        fine.values.assign(65, 0.0);
        for (std::size_t i = 0; i <= 20; ++i)
            fine.values[i] = 0.8 * static_cast<double>(i) / 20.0;
        for (std::size_t i = 21; i <= 36; ++i)
            fine.values[i] = 0.8 - 1.1 * static_cast<double>(i - 20) / 16.0;
        for (std::size_t i = 37; i <= 64; ++i)
            fine.values[i] = -0.3 + 0.3 * static_cast<double>(i - 36) / 28.0;
        // 2 * (1/4) * log 4 = log 2, same normalization as delta = 1/2.
        CHECK(wboot::modulus_statistic(fine, 0.25) ==
              Catch::Approx(1.1 * 15.0 / 16.0 / std::sqrt(std::log(2.0))).margin(1e-12));
    }

    SECTION("argument validation") {
        path.values.assign(33, 0.0);
        CHECK_THROWS_AS(wboot::modulus_statistic(path, 0.6), std::invalid_argument);
        CHECK_THROWS_AS(wboot::modulus_statistic(path, 0.0), std::invalid_argument);
        // Spacing 1/32 exceeds delta/16 = 0.0125 for delta = 0.2.
        CHECK_THROWS_AS(wboot::modulus_statistic(path, 0.2), std::invalid_argument);
        wboot::BridgePath skew;
        skew.grid = {0.0, 0.3, 0.6, 0.8, 0.9, 0.95, 1.0};
        skew.values.assign(7, 0.0);
        CHECK_THROWS_AS(wboot::modulus_statistic(skew, 0.5), std::invalid_argument);
    }
}

TEST_CASE("modulus statistic concentrates near one for small delta") {
    const double delta = std::pow(2.0, -10.0);
    const auto grid = uniform_grid(1 << 16);
    const std::size_t reps = 200;
    wboot::KahanSum sum;
    wboot::RandomStream stream(2026, {100, 10});
    for (std::size_t r = 0; r < reps; ++r) {
        auto sub = stream.child(r);
        const auto path = wboot::sample_bridge(grid, sub);
        sum.add(wboot::modulus_statistic(path, delta));
    }
    const double mean = sum.value() / static_cast<double>(reps);
    CHECK(mean >= 0.75);
    CHECK(mean <= 1.25);
}

TEST_CASE("sup of the bridge follows the kolmogorov law") {
    const auto grid = uniform_grid(1 << 12);
    const std::size_t reps = 10000;
    std::vector<double> sups;
    sups.reserve(reps);
    wboot::RandomStream stream(2026, {100, 11});
    for (std::size_t r = 0; r < reps; ++r) {
        auto sub = stream.child(r);
        const auto path = wboot::sample_bridge(grid, sub);
        double sup = 0.0;
        for (double v : path.values) sup = std::max(sup, std::abs(v));
        sups.push_back(sup);
    }
    const double ks =
        wboot::ks_distance_to_cdf(sups, [](double x) { return wboot::kolmogorov_cdf(x); });
    CHECK(ks <= 0.03);
}
