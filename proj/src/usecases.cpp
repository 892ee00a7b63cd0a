#include "relaxsoh/usecases.hpp"

#include "relaxsoh/errors.hpp"

#include <algorithm>
#include <cmath>

namespace relaxsoh {

SocResult compensated_soc(double c_remaining_mah, double soh, const BatterySpec& spec) {
    if (soh <= 0.0) throw ValidationError("soh must be positive");
    if (c_remaining_mah < 0.0) throw ValidationError("remaining charge must be nonnegative");
    if (spec.design_capacity_mah <= 0.0)
        throw ValidationError("design capacity must be positive");
    SocResult out;
    out.soc = c_remaining_mah / (soh * spec.design_capacity_mah);
    if (out.soc > 1.0) {
        out.soc = 1.0;
        out.clamped = true;
    }
    return out;
}

double remaining_time_minutes(double c_remaining_nominal_mah, double soh,
                              double avg_current_ma) {
    if (soh <= 0.0) throw ValidationError("soh must be positive");
    if (c_remaining_nominal_mah < 0.0)
        throw ValidationError("remaining charge must be nonnegative");
    if (avg_current_ma <= 0.0) throw ValidationError("average current must be positive");
    return 60.0 * (c_remaining_nominal_mah * soh) / avg_current_ma;
}

std::vector<std::size_t> detect_abnormal_drop(const std::vector<SohEstimate>& history,
                                              double drop_threshold) {
    if (drop_threshold <= 0.0) throw ValidationError("drop threshold must be positive");
    std::vector<std::size_t> flagged;
    for (std::size_t i = 1; i < history.size(); ++i)
        if (history[i - 1].smoothed - history[i].smoothed > drop_threshold)
            flagged.push_back(i);
    return flagged;
}

ResistanceEstimate estimate_resistance(const RelaxSubTrace& sub, double i_before_ma,
                                       double at_relax_s) {
    if (i_before_ma <= 0.0) throw ValidationError("pre-cut current must be positive");
    if (at_relax_s <= 0.0) throw ValidationError("relaxation offset must be positive");
    const auto& samples = sub.trace.samples;
    if (samples.size() < 2) throw ValidationError("sub-trace needs at least 2 samples");
    if (sub.trace.duration_s() + 1e-9 < at_relax_s)
        throw ValidationError("sub-trace does not cover the relaxation offset");

    const double target = samples.front().t_s + at_relax_s;
    std::size_t seg = 0;
    while (seg + 2 < samples.size() && samples[seg + 1].t_s < target) ++seg;
    const double w = (target - samples[seg].t_s) / (samples[seg + 1].t_s - samples[seg].t_s);
    const double v_at = samples[seg].v + w * (samples[seg + 1].v - samples[seg].v);

    ResistanceEstimate out;
    out.delta_v = samples.front().v - v_at;
    out.i_before_ma = i_before_ma;
    out.at_relax_s = at_relax_s;
    out.r_mohm = 1e6 * out.delta_v / i_before_ma;
    out.suspect = out.delta_v <= 0.0;
    return out;
}

double percentile_rank(double value, const std::vector<double>& population) {
    if (population.empty()) throw ValidationError("population must be nonempty");
    const auto below = std::count_if(population.begin(), population.end(),
                                     [value](double x) { return x < value; });
    return 100.0 * static_cast<double>(below) / static_cast<double>(population.size());
}

} // namespace relaxsoh
