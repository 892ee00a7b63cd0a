#pragma once

#include "relaxsoh/charge_session.hpp"
#include "relaxsoh/fitting.hpp"
#include "relaxsoh/preprocessing.hpp"
#include "relaxsoh/trace.hpp"

#include <string>
#include <vector>

namespace relaxsoh {

// Published single-feature estimators used for comparison:
//  - "casals": SoH = m * v(300 s) + q
//  - "bond":   SoH = a * v(1800 s)^2 + b * v(1800 s) + c
//  - "vbash":  SoH = m * b_exponent + q, where b_exponent comes from the
//              power-law fit of the relaxation curve
struct BaselineModel {
    std::string kind;
    std::vector<double> coefficients;
    Goodness fit_quality;
};

struct BaselinePrediction {
    double soh = 0.0;
    bool out_of_range = false;   // outside [0, 1]; never clamped
    bool anchor_recovered = false; // anchor voltage came from extrapolation
};

struct AnchorValue {
    double v = 0.0;
    bool recovered = false;
};

// Voltage at an elapsed rest time: interpolated from samples when the trace
// covers t_s, otherwise read off a freshly fitted power law.
AnchorValue anchor_voltage(const VoltageTrace& trace, double t_s);
// Same, but reuses the fit already attached to a segmented sub-trace.
AnchorValue anchor_voltage(const RelaxSubTrace& sub, double t_s);

BaselineModel casals_fit(const CycleDataset& ds);
BaselineModel bonds_fit(const CycleDataset& ds);
BaselineModel vbash_fit(const CycleDataset& ds);

BaselinePrediction baseline_predict(const BaselineModel& model, const VoltageTrace& trace);
BaselinePrediction baseline_predict(const BaselineModel& model, const RelaxSubTrace& sub);

// Average of per-sub-trace predictions over one charging session.
BaselinePrediction baseline_estimate_session(const BaselineModel& model,
                                             const ChargeSessionLog& log,
                                             const SegmentationConfig& config = {});

} // namespace relaxsoh
