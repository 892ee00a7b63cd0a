#include "doctest.h"

#include "relaxsoh/errors.hpp"
#include "relaxsoh/preprocessing.hpp"
#include "relaxsoh/rng.hpp"
#include "relaxsoh/simulator.hpp"

#include <cmath>

using namespace relaxsoh;

namespace {

RelaxLaw test_law() {
    RelaxLaw law;
    law.a0 = 0.0757;
    law.c0 = 4.2 - 0.0757;
    law.da_dsoh = -0.0200;
    law.dc_dsoh = 0.0200;
    return law;
}

CycleRecord law_record(std::uint32_t idx, double soh, double noise_v, std::uint64_t seed,
                       std::size_t n_samples = 601) {
    GaussianRng rng(seed);
    CycleRecord r;
    r.cycle_index = idx;
    r.soh = soh;
    r.relax_trace.sample_interval_s = 1.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        double t = static_cast<double>(k);
        r.relax_trace.samples.push_back(
            {t, relax_voltage(test_law(), soh, t) + rng.normal(0.0, noise_v), {}, {}});
    }
    return r;
}

CycleDataset linear_dataset(std::size_t n, double noise_v = 0.0, std::size_t n_samples = 601) {
    CycleDataset ds;
    ds.spec = {2200.0, "bench-cell"};
    for (std::size_t i = 0; i < n; ++i)
        ds.records.push_back(law_record(static_cast<std::uint32_t>(i),
                                        1.0 - 0.001 * static_cast<double>(i), noise_v,
                                        900 + i, n_samples));
    return ds;
}

} // namespace

TEST_CASE("label filter flags a planted one-percent deviation") {
    CycleDataset ds = linear_dataset(30, 0.0, 11);
    ds.records[12].soh += 0.01;
    FilterReport report = filter_soh_outliers(ds);
    REQUIRE(report.removed.size() == 1);
    CHECK(report.removed.count(12) == 1);
    CHECK(report.removed.at(12) == "soh_outlier");
}

TEST_CASE("label filter passes clean linear degradation") {
    CycleDataset ds = linear_dataset(30, 0.0, 11);
    CHECK(filter_soh_outliers(ds).removed.empty());
}

TEST_CASE("label filter needs ten records") {
    CycleDataset ds = linear_dataset(9, 0.0, 11);
    CHECK_THROWS_AS(filter_soh_outliers(ds), ValidationError);
}

TEST_CASE("trace filter removes its quota even on clean data") {
    CycleDataset ds = linear_dataset(100, 0.0002);
    FilterReport report = filter_trace_outliers(ds);
    CHECK(report.removed.size() == 5); // ceil(0.05 * 100)
    for (const auto& [idx, reason] : report.removed) CHECK(reason == "trace_outlier");
}

TEST_CASE("trace filter catches contaminated and unfittable traces") {
    CycleDataset ds = linear_dataset(40, 0.0002);
    // Additive slow sine: visibly off the relaxation family.
    for (auto& s : ds.records[7].relax_trace.samples)
        s.v += 0.005 * std::sin(2.0 * 3.14159265358979 * s.t_s / 300.0);
    // Too few samples to fit at all.
    ds.records[21].relax_trace.samples.resize(5);
    FilterReport report = filter_trace_outliers(ds);
    CHECK(report.removed.size() == 2); // ceil(0.05 * 40)
    CHECK(report.removed.count(7) == 1);
    CHECK(report.removed.count(21) == 1);
}

TEST_CASE("trace filter needs twenty records") {
    CycleDataset ds = linear_dataset(19, 0.0002);
    CHECK_THROWS_AS(filter_trace_outliers(ds), ValidationError);
}

TEST_CASE("applying filters removes the union of flags once") {
    CycleDataset ds = linear_dataset(30, 0.0);
    FilterReport a, b;
    a.removed[3] = "soh_outlier";
    b.removed[3] = "trace_outlier";
    b.removed[7] = "trace_outlier";
    CycleDataset out = apply_filters(ds, {a, b});
    REQUIRE(out.records.size() == 28);
    for (const auto& r : out.records) {
        CHECK(r.cycle_index != 3);
        CHECK(r.cycle_index != 7);
    }
    // Survivors are untouched.
    CHECK(out.records[3].cycle_index == 4);
    CHECK(out.records[3].soh == ds.records[4].soh);
    CHECK(out.records[3].relax_trace.samples[5].v == ds.records[4].relax_trace.samples[5].v);
    CHECK(out.spec.model_name == ds.spec.model_name);
}

TEST_CASE("moving average clips its window at the edges") {
    std::vector<double> out = moving_average({1, 2, 3, 4, 5}, 3);
    REQUIRE(out.size() == 5);
    CHECK(out[0] == doctest::Approx(1.5));
    CHECK(out[1] == doctest::Approx(2.0));
    CHECK(out[2] == doctest::Approx(3.0));
    CHECK(out[3] == doctest::Approx(4.0));
    CHECK(out[4] == doctest::Approx(4.5));

    std::vector<double> w5 = moving_average({1, 2, 3, 4, 5}, 5);
    CHECK(w5[0] == doctest::Approx(2.0));
    CHECK(w5[1] == doctest::Approx(2.5));
    CHECK(w5[2] == doctest::Approx(3.0));
    CHECK(w5[3] == doctest::Approx(3.5));
    CHECK(w5[4] == doctest::Approx(4.0));
}

TEST_CASE("moving average window one is the identity") {
    std::vector<double> in = {3.0, 1.0, 4.0, 1.0, 5.0};
    CHECK(moving_average(in, 1) == in);
}

TEST_CASE("moving average rejects even or nonpositive windows") {
    CHECK_THROWS_AS(moving_average({1, 2, 3}, 2), ValidationError);
    CHECK_THROWS_AS(moving_average({1, 2, 3}, 0), ValidationError);
    CHECK_THROWS_AS(moving_average({1, 2, 3}, -3), ValidationError);
}

TEST_CASE("moving average shrinks white-noise variance") {
    GaussianRng rng(5);
    std::vector<double> xs;
    for (int i = 0; i < 500; ++i) xs.push_back(rng.normal());
    std::vector<double> ys = moving_average(xs, 5);
    auto var = [](const std::vector<double>& v) {
        double m = 0, s = 0;
        for (double x : v) m += x / static_cast<double>(v.size());
        for (double x : v) s += (x - m) * (x - m) / static_cast<double>(v.size() - 1);
        return s;
    };
    CHECK(var(ys) < 0.35 * var(xs));
}

TEST_CASE("dataset smoothing averages labels and traces across cycles") {
    CycleDataset ds = linear_dataset(25, 0.0005, 121);
    GaussianRng label_noise(99);
    for (auto& r : ds.records) r.soh += label_noise.normal(0.0, 0.002);

    CycleDataset out = smooth_dataset(ds, 5);
    REQUIRE(out.records.size() == 25);

    std::vector<double> labels;
    for (const auto& r : ds.records) labels.push_back(r.soh);
    std::vector<double> expected = moving_average(labels, 5);
    for (std::size_t i = 0; i < 25; ++i) {
        CHECK(out.records[i].cycle_index == ds.records[i].cycle_index);
        CHECK(out.records[i].soh == doctest::Approx(expected[i]).epsilon(1e-12));
    }

    // Pointwise trace average over the same cycle window, clipped at edges.
    for (std::size_t i : {std::size_t{0}, std::size_t{2}, std::size_t{12}, std::size_t{24}}) {
        std::size_t lo = i >= 2 ? i - 2 : 0;
        std::size_t hi = std::min<std::size_t>(24, i + 2);
        for (std::size_t k : {std::size_t{0}, std::size_t{60}, std::size_t{120}}) {
            double acc = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) acc += ds.records[j].relax_trace.samples[k].v;
            acc /= static_cast<double>(hi - lo + 1);
            CHECK(out.records[i].relax_trace.samples[k].v ==
                  doctest::Approx(acc).epsilon(1e-12));
        }
    }
}

TEST_CASE("dataset smoothing requires equal-length traces") {
    CycleDataset ds = linear_dataset(12, 0.0, 61);
    ds.records[4].relax_trace.samples.resize(50);
    CHECK_THROWS_AS(smooth_dataset(ds, 5), ValidationError);
}
