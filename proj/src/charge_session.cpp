#include "relaxsoh/charge_session.hpp"

#include <algorithm>
#include <cmath>

namespace relaxsoh {

namespace {

constexpr double kFullChargeBandV = 0.005;
constexpr double kAscentMarginV = 0.002;

} // namespace

std::size_t detect_full_charge(const ChargeSessionLog& log, double hold_s,
                               std::optional<double> i_cutoff_ma) {
    const auto& samples = log.trace.samples;
    if (samples.size() < 2) throw ValidationError("session log needs at least 2 samples");
    if (!(log.full_charge_voltage > 3.9 && log.full_charge_voltage < 4.5))
        throw ValidationError("full-charge voltage must lie in (3.9, 4.5) V");
    if (hold_s <= 0.0) throw ValidationError("hold window must be positive");
    if (i_cutoff_ma && !log.trace.has_current())
        throw ValidationError("current cutoff requested but the log has no current column");

    const double interval = log.trace.sample_interval_s;
    const std::size_t n_hold =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hold_s / interval)));
    const double threshold = log.full_charge_voltage - kFullChargeBandV;

    std::size_t run = 0;
    std::size_t at_voltage = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        run = samples[i].v >= threshold ? run + 1 : 0;
        if (run >= n_hold) {
            at_voltage = i + 1 - n_hold;
            break;
        }
    }
    if (at_voltage == samples.size())
        throw NotFullyChargedError("voltage never held at full charge for " +
                                   std::to_string(static_cast<long>(hold_s)) + " s");
    if (!i_cutoff_ma) return at_voltage;

    for (std::size_t i = at_voltage; i < samples.size(); ++i)
        if (*samples[i].i_ma <= *i_cutoff_ma) return i;
    throw NotFullyChargedError("charge current never fell to the cutoff");
}

std::vector<double> delta_signal(const std::vector<double>& values) {
    if (values.size() < 2) throw ValidationError("delta signal needs at least 2 values");
    std::vector<double> d(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) d[i] = values[i + 1] - values[i];
    return d;
}

std::vector<double> low_pass(const std::vector<double>& signal, double alpha) {
    if (signal.empty()) throw ValidationError("low pass needs a nonempty signal");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0, 1]");
    std::vector<double> y(signal.size());
    y[0] = signal[0];
    for (std::size_t i = 1; i < signal.size(); ++i)
        y[i] = alpha * signal[i] + (1.0 - alpha) * y[i - 1];
    return y;
}

SegmentationResult segment_subtraces(const ChargeSessionLog& log,
                                     const SegmentationConfig& config) {
    SegmentationResult result;
    result.full_charge_index = detect_full_charge(log, config.hold_s, config.i_cutoff_ma);

    const auto& samples = log.trace.samples;
    const std::size_t base = result.full_charge_index;
    std::vector<double> v;
    v.reserve(samples.size() - base);
    for (std::size_t i = base; i < samples.size(); ++i) v.push_back(samples[i].v);
    const std::size_t n = v.size();

    // Recharge spikes: runs where the smoothed forward difference exceeds the
    // threshold. Within each run the largest raw step locates the pulse; the
    // sample after that step is the recharge peak.
    std::vector<std::size_t> triggers;
    if (n >= 2) {
        std::vector<double> raw = delta_signal(v);
        std::vector<double> filtered = low_pass(raw, config.alpha);
        const double threshold = config.spike_threshold_mv * 1e-3;
        std::size_t k = 0;
        while (k < filtered.size()) {
            if (filtered[k] <= threshold) {
                ++k;
                continue;
            }
            std::size_t start = k;
            while (k < filtered.size() && filtered[k] > threshold) ++k;
            std::size_t best = start;
            for (std::size_t j = start + 1; j < k; ++j)
                if (raw[j] > raw[best]) best = j;
            triggers.push_back(best + 1);
        }
    }

    // Segment boundaries: each segment runs from one relaxation start to the
    // last sample before the next recharge. The relaxation start is the
    // recharge peak, advanced while the voltage still climbs meaningfully.
    auto relax_start = [&](std::size_t trigger) {
        std::size_t k = trigger;
        while (k + 1 < n && v[k + 1] - v[k] > kAscentMarginV) ++k;
        return k;
    };
    std::vector<std::pair<std::size_t, std::size_t>> bounds;
    std::size_t prev_start = 0;
    for (std::size_t trig : triggers) {
        std::size_t valley = trig - 1;
        if (valley > prev_start) bounds.emplace_back(prev_start, valley);
        prev_start = relax_start(trig);
    }
    if (n > 0 && n - 1 > prev_start) bounds.emplace_back(prev_start, n - 1);

    for (auto [s, e] : bounds) {
        const std::size_t abs_s = base + s, abs_e = base + e;
        if (e - s + 1 < config.min_keep_samples) {
            result.dropped.push_back({abs_s, abs_e, "too few samples"});
            continue;
        }
        RelaxSubTrace sub;
        sub.start_index = abs_s;
        sub.end_index = abs_e;
        sub.start_s = samples[abs_s].t_s;
        sub.end_s = samples[abs_e].t_s;
        sub.trace.sample_interval_s = log.trace.sample_interval_s;
        for (std::size_t i = abs_s; i <= abs_e; ++i) {
            VoltageSample sample = samples[i];
            sample.t_s -= samples[abs_s].t_s;
            sub.trace.samples.push_back(sample);
        }
        try {
            sub.fit = fit_power(sub.trace);
        } catch (const Error&) {
            result.dropped.push_back({abs_s, abs_e, "fit failed"});
            continue;
        }
        if (sub.fit.r_squared < config.r2_threshold) {
            result.dropped.push_back({abs_s, abs_e, "poor fit"});
            continue;
        }
        result.subtraces.push_back(std::move(sub));
    }
    return result;
}

RelaxSubTrace recover_trace(const RelaxSubTrace& sub, const GridSpec& grid,
                            double min_subtrace_s) {
    const auto& samples = sub.trace.samples;
    if (samples.size() < 2) throw ValidationError("sub-trace needs at least 2 samples");
    const double span = sub.trace.duration_s();
    if (span < min_subtrace_s)
        throw TraceTooShortError("sub-trace spans " + std::to_string(span) +
                                 " s, need at least " + std::to_string(min_subtrace_s));

    RelaxSubTrace out = sub;
    out.trace.samples.clear();
    out.trace.sample_interval_s = grid.interval_s;
    out.recovered = span < grid.duration_s;

    const double t0 = samples.front().t_s;
    const double t_last = samples.back().t_s;
    std::size_t seg = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = static_cast<double>(k) * grid.interval_s;
        double v;
        if (t0 + t <= t_last + 1e-9) {
            const double target = t0 + t;
            while (seg + 2 < samples.size() && samples[seg + 1].t_s < target) ++seg;
            const auto& a = samples[seg];
            const auto& b = samples[seg + 1];
            const double w = (target - a.t_s) / (b.t_s - a.t_s);
            v = a.v + w * (b.v - a.v);
        } else {
            v = eval_power(out.fit, t);
        }
        out.trace.samples.push_back({t, v, {}, {}});
    }
    return out;
}

} // namespace relaxsoh
