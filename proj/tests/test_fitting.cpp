#include "doctest.h"

#include "relaxsoh/errors.hpp"
#include "relaxsoh/fitting.hpp"
#include "relaxsoh/rng.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace relaxsoh;

namespace {

VoltageTrace power_trace(double a, double b, double c, int n = 1801, double noise_sigma = 0.0,
                         std::uint64_t seed = 0) {
    GaussianRng rng(seed);
    std::vector<double> ts, vs;
    for (int k = 0; k < n; ++k) {
        ts.push_back(k);
        double v = a * std::pow(k + 1.0, b) + c;
        if (noise_sigma > 0.0) v += rng.normal(0.0, noise_sigma);
        vs.push_back(v);
    }
    return oracle::make_trace(ts, vs);
}

} // namespace

TEST_CASE("fit_power recovers planted parameters on a noiseless trace") {
    auto trace = power_trace(0.05, -0.5, 4.25);
    auto fit = fit_power(trace);
    CHECK(fit.a == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(fit.b == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(fit.c == doctest::Approx(4.25).epsilon(1e-6));
    CHECK(fit.rmse < 1e-8);
    CHECK(fit.r_squared == doctest::Approx(1.0));

    // Independent route: exhaustive exponent grid search + closed-form (a, c).
    auto ref = oracle::power_grid_search(trace.times(), trace.voltages());
    CHECK(fit.a == doctest::Approx(ref.a).epsilon(1e-5));
    CHECK(fit.b == doctest::Approx(ref.b).epsilon(1e-5));
    CHECK(fit.c == doctest::Approx(ref.c).epsilon(1e-5));
}

TEST_CASE("fit_power agrees with the grid-search oracle on noisy traces") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto trace = power_trace(0.0757, -0.15, 4.124, 1801, 0.0005, seed);
        auto fit = fit_power(trace);
        auto ref = oracle::power_grid_search(trace.times(), trace.voltages());
        CHECK(fit.b == doctest::Approx(ref.b).epsilon(1e-4));
        CHECK(fit.a == doctest::Approx(ref.a).epsilon(1e-3));
        CHECK(fit.c == doctest::Approx(ref.c).epsilon(1e-4));
        // The solver may not beat an exhaustive search, but must match it.
        auto ref_sse = oracle::power_solve_at_b(trace.times(), trace.voltages(), ref.b).sse;
        double n = static_cast<double>(trace.samples.size());
        CHECK(fit.rmse * fit.rmse * n <= ref_sse * (1.0 + 1e-6));
    }
}

TEST_CASE("fit_power constant-trace convention") {
    std::vector<double> ts, vs;
    for (int k = 0; k < 20; ++k) {
        ts.push_back(k);
        vs.push_back(4.30);
    }
    auto fit = fit_power(oracle::make_trace(ts, vs));
    CHECK(fit.a == 0.0);
    CHECK(fit.b == -1.0);
    CHECK(fit.c == doctest::Approx(4.30));
    CHECK(fit.rmse == 0.0);
    CHECK(fit.r_squared == 1.0);
}

TEST_CASE("fit_power rejects bad inputs") {
    auto tiny = power_trace(0.05, -0.5, 4.25, 5);
    CHECK_THROWS_AS(fit_power(tiny), ValidationError);
    auto neg = oracle::make_trace({-1, 0, 1, 2, 3, 4, 5, 6, 7, 8},
                                  {4.3, 4.2, 4.1, 4.05, 4.0, 3.98, 3.96, 3.95, 3.94, 3.93});
    CHECK_THROWS_AS(fit_power(neg), ValidationError);
}

TEST_CASE("fit_power is shift-equivariant in the offset") {
    auto base = power_trace(0.05, -0.4, 4.1, 600, 0.0004, 42);
    auto shifted = base;
    for (auto& s : shifted.samples) s.v += 0.25;
    auto f0 = fit_power(base);
    auto f1 = fit_power(shifted);
    CHECK(f1.a == doctest::Approx(f0.a).epsilon(1e-9));
    CHECK(f1.b == doctest::Approx(f0.b).epsilon(1e-9));
    CHECK(f1.c - f0.c == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("fit_power never loses to the constant model") {
    GaussianRng rng(99);
    for (int rep = 0; rep < 8; ++rep) {
        std::vector<double> ts, vs;
        for (int k = 0; k < 50; ++k) {
            ts.push_back(k);
            vs.push_back(4.0 + 0.02 * std::sin(k * 0.9) + 0.01 * rng.normal());
        }
        PowerFit fit;
        try {
            fit = fit_power(oracle::make_trace(ts, vs));
        } catch (const FitDivergedError& e) {
            fit = *e.power_best();
        }
        double mean = 0.0;
        for (double v : vs) mean += v;
        mean /= vs.size();
        double const_sse = 0.0;
        for (double v : vs) const_sse += (v - mean) * (v - mean);
        double const_rmse = std::sqrt(const_sse / vs.size());
        CHECK(fit.rmse <= const_rmse + 1e-15);
    }
}

TEST_CASE("eval_power basics") {
    CHECK(eval_power({0.0, -2.3, 4.30, 0, 1}, 17.0) == doctest::Approx(4.30));
    CHECK(eval_power({0.05, -0.5, 4.25, 0, 1}, 0.0) == doctest::Approx(4.30));
    auto trace = power_trace(0.06, -0.3, 4.2, 400, 0.0005, 7);
    auto fit = fit_power(trace);
    std::vector<double> pred;
    for (const auto& s : trace.samples) pred.push_back(eval_power(fit, s.t_s));
    auto g = goodness(trace.voltages(), pred);
    CHECK(g.rmse == doctest::Approx(fit.rmse).epsilon(1e-12));
}

TEST_CASE("fit_linear on two points is exact") {
    auto fit = fit_linear({0, 1}, {1, 3});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.rmse == doctest::Approx(0.0));
}

TEST_CASE("fit_linear matches the normal-equation oracle") {
    GaussianRng rng(5);
    std::vector<double> xs, ys;
    for (int k = 0; k < 200; ++k) {
        xs.push_back(k + 0.3 * rng.normal());
        ys.push_back(2.5 - 0.004 * k + 0.05 * rng.normal());
    }
    auto fit = fit_linear(xs, ys);
    auto ref = oracle::ols_normal_equations(xs, ys);
    CHECK(fit.slope == doctest::Approx(ref.slope).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(ref.intercept).epsilon(1e-12));
}

TEST_CASE("fit_linear degenerate cases") {
    CHECK_THROWS_AS(fit_linear({1}, {2}), ValidationError);
    CHECK_THROWS_AS(fit_linear({2, 2, 2}, {1, 2, 3}), NumericError);
    auto fit = fit_linear({0, 1, 2}, {5, 5, 5});
    CHECK(fit.slope == doctest::Approx(0.0));
    CHECK(fit.r_squared == 1.0);
}

TEST_CASE("fit_linear on capacity-fade-style series meets the reference accuracy") {
    // Twelve linear degradation series with measurement-grade label noise.
    for (int series = 0; series < 12; ++series) {
        GaussianRng rng(100 + series);
        double slope = -0.0008 - 0.00004 * series;
        double sigma = 0.0002;
        std::vector<double> xs, ys;
        for (int k = 0; k < 300; ++k) {
            xs.push_back(k);
            ys.push_back(1.0 + slope * k + rng.normal(0.0, sigma));
        }
        auto fit = fit_linear(xs, ys);
        CHECK(fit.rmse < 0.00062);
        CHECK(fit.r_squared > 0.972);
        // Planted-parameter recovery within 3 standard errors.
        double sxx = 0.0, mx = (300.0 - 1.0) / 2.0;
        for (double x : xs) sxx += (x - mx) * (x - mx);
        double se_slope = sigma / std::sqrt(sxx);
        CHECK(std::abs(fit.slope - slope) < 3.0 * se_slope);
    }
}

TEST_CASE("fit_exponential recovers planted one-term parameters") {
    std::vector<double> ts, vs;
    for (int k = 0; k < 300; ++k) {
        ts.push_back(k);
        vs.push_back(4.1 * std::exp(-0.002 * k));
    }
    auto fit = fit_exponential(oracle::make_trace(ts, vs), 1);
    REQUIRE(fit.terms.size() == 1);
    CHECK(fit.terms[0].amplitude == doctest::Approx(4.1).epsilon(1e-6));
    CHECK(fit.terms[0].rate == doctest::Approx(-0.002).epsilon(1e-6));
    CHECK(fit.rmse < 1e-9);
}

TEST_CASE("fit_exponential constant-trace convention") {
    std::vector<double> ts, vs;
    for (int k = 0; k < 20; ++k) {
        ts.push_back(k);
        vs.push_back(3.9);
    }
    auto fit = fit_exponential(oracle::make_trace(ts, vs), 1);
    REQUIRE(fit.terms.size() == 1);
    CHECK(fit.terms[0].amplitude == doctest::Approx(3.9));
    CHECK(fit.terms[0].rate == 0.0);
    CHECK(fit.r_squared == 1.0);
}

TEST_CASE("fit_exponential two-term fit tracks relaxation less well than the power fit") {
    int power_wins = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto trace = power_trace(0.0757, -0.15, 4.124, 1801, 0.0005, 1000 + seed);
        double pr2 = fit_power(trace).r_squared;
        double er1, er2;
        try {
            er1 = fit_exponential(trace, 1).r_squared;
        } catch (const FitDivergedError& e) {
            er1 = e.exp_best()->r_squared;
        }
        try {
            er2 = fit_exponential(trace, 2).r_squared;
        } catch (const FitDivergedError& e) {
            er2 = e.exp_best()->r_squared;
        }
        ++total;
        if (pr2 > std::max(er1, er2)) ++power_wins;
    }
    CHECK(power_wins >= (total * 9) / 10);
}

TEST_CASE("goodness hand-checked vectors") {
    auto same = goodness({4.1, 4.2, 4.3}, {4.1, 4.2, 4.3});
    CHECK(same.rmse == doctest::Approx(0.0));
    CHECK(same.r_squared == doctest::Approx(1.0));

    // rmse 1 by hand; SS_res = SS_tot = 2 so the definition yields 0.
    auto g = goodness({0, 2}, {1, 1});
    CHECK(g.rmse == doctest::Approx(1.0));
    CHECK(g.r_squared == doctest::Approx(0.0));
}

TEST_CASE("goodness matches the long-double reference on random vectors") {
    GaussianRng rng(77);
    std::vector<double> obs, pred;
    for (int k = 0; k < 500; ++k) {
        obs.push_back(4.0 + 0.1 * rng.normal());
        pred.push_back(4.0 + 0.1 * rng.normal());
    }
    auto g = goodness(obs, pred);
    auto ref = oracle::goodness_reference(obs, pred);
    CHECK(g.rmse == doctest::Approx(ref.rmse).epsilon(1e-12));
    CHECK(g.r_squared == doctest::Approx(ref.r_squared).epsilon(1e-12));
}

TEST_CASE("goodness validates lengths") {
    CHECK_THROWS_AS(goodness({1, 2}, {1}), ValidationError);
    CHECK_THROWS_AS(goodness({}, {}), ValidationError);
}
