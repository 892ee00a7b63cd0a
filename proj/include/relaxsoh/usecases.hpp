#pragma once

#include "relaxsoh/charge_session.hpp"
#include "relaxsoh/estimator.hpp"
#include "relaxsoh/trace.hpp"

#include <cstddef>
#include <vector>

namespace relaxsoh {

struct SocResult {
    double soc = 0.0;
    bool clamped = false;
};

// True state of charge once capacity fade is accounted for:
// soc = c_remaining / (soh * design capacity), clamped to [0, 1].
SocResult compensated_soc(double c_remaining_mah, double soh, const BatterySpec& spec);

// Minutes of use left for a nominal remaining charge, shrunk by the battery's
// health, at a given average drain.
double remaining_time_minutes(double c_remaining_nominal_mah, double soh,
                              double avg_current_ma);

// Indices whose smoothed health fell by more than drop_threshold since the
// previous entry — a flag for sudden degradation or a faulty reading.
std::vector<std::size_t> detect_abnormal_drop(const std::vector<SohEstimate>& history,
                                              double drop_threshold = 0.02);

struct ResistanceEstimate {
    double r_mohm = 0.0;
    double delta_v = 0.0; // ohmic voltage step across the current cut
    double i_before_ma = 0.0;
    double at_relax_s = 1.0;
    bool suspect = false; // nonpositive step; reading not physically plausible
};

// Internal resistance from the instantaneous voltage step when charging stops:
// the drop between the first relaxation sample and the voltage at_relax_s
// later, divided by the current that was flowing.
ResistanceEstimate estimate_resistance(const RelaxSubTrace& sub, double i_before_ma,
                                       double at_relax_s = 1.0);

// Share of a reference population strictly below the value, as a percentage.
double percentile_rank(double value, const std::vector<double>& population);

} // namespace relaxsoh
