#include "relaxsoh/preprocessing.hpp"

#include "relaxsoh/errors.hpp"
#include "relaxsoh/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relaxsoh {

FilterReport filter_soh_outliers(const CycleDataset& ds, double max_dev) {
    if (ds.records.size() < 10)
        throw ValidationError("soh outlier filter needs >= 10 records, got " +
                              std::to_string(ds.records.size()));
    std::vector<double> xs, ys;
    xs.reserve(ds.records.size());
    ys.reserve(ds.records.size());
    for (const auto& r : ds.records) {
        xs.push_back(static_cast<double>(r.cycle_index));
        ys.push_back(r.soh);
    }
    LinearFit fit = fit_linear(xs, ys);
    FilterReport report;
    for (const auto& r : ds.records) {
        double resid = r.soh - (fit.slope * r.cycle_index + fit.intercept);
        if (std::abs(resid) > max_dev) report.removed[r.cycle_index] = "soh_outlier";
    }
    return report;
}

FilterReport filter_trace_outliers(const CycleDataset& ds, double worst_fraction) {
    if (ds.records.size() < 20)
        throw ValidationError("trace outlier filter needs >= 20 records, got " +
                              std::to_string(ds.records.size()));
    if (worst_fraction < 0.0 || worst_fraction > 1.0)
        throw ValidationError("worst_fraction must be in [0, 1]");

    struct Scored {
        std::uint32_t cycle_index;
        double r2;
    };
    std::vector<Scored> scored;
    scored.reserve(ds.records.size());
    for (const auto& r : ds.records) {
        double r2;
        try {
            r2 = fit_power(r.relax_trace).r_squared;
        } catch (const Error&) {
            r2 = -std::numeric_limits<double>::infinity(); // unfittable: worst rank
        }
        scored.push_back({r.cycle_index, r2});
    }
    std::size_t quota = static_cast<std::size_t>(
        std::ceil(worst_fraction * static_cast<double>(scored.size())));
    quota = std::min(quota, scored.size());
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return a.r2 < b.r2; });
    FilterReport report;
    for (std::size_t i = 0; i < quota; ++i)
        report.removed[scored[i].cycle_index] = "trace_outlier";
    return report;
}

CycleDataset apply_filters(const CycleDataset& ds, const std::vector<FilterReport>& reports) {
    CycleDataset out;
    out.spec = ds.spec;
    for (const auto& r : ds.records) {
        bool flagged = false;
        for (const auto& rep : reports) flagged |= rep.removed.count(r.cycle_index) > 0;
        if (!flagged) out.records.push_back(r);
    }
    return out;
}

std::vector<double> moving_average(const std::vector<double>& values, int window) {
    if (window < 1 || window % 2 == 0)
        throw ValidationError("moving average window must be a positive odd integer");
    const int half = window / 2;
    const int n = static_cast<int>(values.size());
    std::vector<double> out(values.size());
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - half);
        int hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += values[j];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

CycleDataset smooth_dataset(const CycleDataset& ds, int window) {
    if (window < 1 || window % 2 == 0)
        throw ValidationError("moving average window must be a positive odd integer");
    if (ds.records.empty()) return ds;
    const std::size_t len = ds.records.front().relax_trace.samples.size();
    for (const auto& r : ds.records)
        if (r.relax_trace.samples.size() != len)
            throw ValidationError("smoothing needs equal-length traces");

    CycleDataset out = ds;
    std::vector<double> labels;
    labels.reserve(ds.records.size());
    for (const auto& r : ds.records) labels.push_back(r.soh);
    auto smoothed = moving_average(labels, window);
    for (std::size_t i = 0; i < out.records.size(); ++i) out.records[i].soh = smoothed[i];

    const int half = window / 2;
    const int n = static_cast<int>(ds.records.size());
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - half);
        int hi = std::min(n - 1, i + half);
        auto& dst = out.records[i].relax_trace.samples;
        for (std::size_t k = 0; k < len; ++k) {
            double acc = 0.0;
            for (int j = lo; j <= hi; ++j) acc += ds.records[j].relax_trace.samples[k].v;
            dst[k].v = acc / static_cast<double>(hi - lo + 1);
        }
    }
    return out;
}

} // namespace relaxsoh
