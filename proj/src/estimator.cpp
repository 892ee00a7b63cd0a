#include "relaxsoh/estimator.hpp"

#include "relaxsoh/fitting.hpp"

#include <algorithm>
#include <cmath>

namespace relaxsoh {

SohEstimate estimate_session(const FingerprintModel& model, const ChargeSessionLog& log,
                             const SegmentationConfig& config, double min_subtrace_s) {
    SegmentationResult seg = segment_subtraces(log, config);
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& sub : seg.subtraces) {
        RelaxSubTrace recovered;
        try {
            recovered = recover_trace(sub, model.grid, min_subtrace_s);
        } catch (const TraceTooShortError&) {
            continue;
        }
        sum += predict_trace(model, recovered.trace);
        ++used;
    }
    if (used == 0)
        throw NoEstimateError("no relaxation segment was usable in this session");

    SohEstimate est;
    est.raw = sum / static_cast<double>(used);
    est.n_subtraces = used;
    if (est.raw < 0.0 || est.raw > 1.2) {
        est.raw = std::clamp(est.raw, 0.0, 1.2);
        est.clamped = true;
    }
    est.smoothed = est.raw;
    return est;
}

std::vector<SohEstimate> smooth_history(std::vector<SohEstimate> history, std::size_t window) {
    if (window < 1) throw ValidationError("smoothing window must be at least 1");
    for (std::size_t i = 0; i < history.size(); ++i) {
        const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
        const std::size_t count = i - lo + 1;
        if (count < 3) {
            history[i].smoothed = history[i].raw;
            continue;
        }
        std::vector<double> xs, ys;
        xs.reserve(count);
        ys.reserve(count);
        for (std::size_t j = lo; j <= i; ++j) {
            xs.push_back(static_cast<double>(j));
            ys.push_back(history[j].raw);
        }
        LinearFit fit = fit_linear(xs, ys);
        history[i].smoothed = fit.slope * static_cast<double>(i) + fit.intercept;
    }
    return history;
}

CoulombResult coulomb_count(const VoltageTrace& trace, double soc_start, double soc_end,
                            const BatterySpec& spec) {
    if (!trace.has_current())
        throw ValidationError("coulomb counting needs a current column");
    if (trace.samples.size() < 2)
        throw ValidationError("coulomb counting needs at least 2 samples");
    if (spec.design_capacity_mah <= 0.0)
        throw ValidationError("design capacity must be positive");
    const double delta_soc = std::abs(soc_end - soc_start);
    if (delta_soc <= 0.0) throw ValidationError("soc span must be nonzero");

    double mah = 0.0;
    for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i) {
        const auto& a = trace.samples[i];
        const auto& b = trace.samples[i + 1];
        mah += 0.5 * (*a.i_ma + *b.i_ma) * (b.t_s - a.t_s) / 3600.0;
    }

    CoulombResult out;
    out.delta_c_mah = std::abs(mah);
    out.c_fullcharge_mah = out.delta_c_mah / delta_soc;
    out.soh = out.c_fullcharge_mah / spec.design_capacity_mah;
    return out;
}

} // namespace relaxsoh
