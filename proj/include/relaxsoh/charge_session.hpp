#pragma once

#include "relaxsoh/errors.hpp"
#include "relaxsoh/fitting.hpp"
#include "relaxsoh/trace.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace relaxsoh {

// A raw overnight charging log: one voltage (and optionally current) trace
// covering charge, trickle recharges, and rest periods.
struct ChargeSessionLog {
    VoltageTrace trace;
    double full_charge_voltage = 4.2; // V, must lie in (3.9, 4.5)
    std::string model_name;
};

// The log never reaches and holds the full-charge voltage.
class NotFullyChargedError : public Error {
public:
    using Error::Error;
};

// A relaxation segment is too short to extrapolate from.
class TraceTooShortError : public Error {
public:
    using Error::Error;
};

// First sample index at which the battery is considered fully charged: the
// voltage must stay within 5 mV of full_charge_voltage for hold_s seconds,
// and, when a cutoff is given and current is logged, the charge current must
// have fallen to i_cutoff_ma or below.
std::size_t detect_full_charge(const ChargeSessionLog& log, double hold_s = 60.0,
                               std::optional<double> i_cutoff_ma = std::nullopt);

// Consecutive differences d[k] = values[k+1] - values[k] (size n-1).
std::vector<double> delta_signal(const std::vector<double>& values);

// First-order IIR smoothing y[k] = alpha*x[k] + (1-alpha)*y[k-1], y[0] = x[0].
std::vector<double> low_pass(const std::vector<double>& signal, double alpha = 0.3);

struct SegmentationConfig {
    double spike_threshold_mv = 5.0; // filtered voltage jump that marks a recharge
    double alpha = 0.3;              // low-pass coefficient for the delta signal
    double r2_threshold = 0.95;      // minimum power-fit quality to keep a segment
    std::size_t min_keep_samples = 10;
    double hold_s = 60.0;
    std::optional<double> i_cutoff_ma;
};

// One relaxation segment cut from a session, re-zeroed to start at t = 0.
struct RelaxSubTrace {
    VoltageTrace trace;
    double start_s = 0.0, end_s = 0.0;        // position within the session
    std::size_t start_index = 0, end_index = 0; // sample indices in the session log
    PowerFit fit;
    bool recovered = false; // true once the tail has been extrapolated
};

struct DroppedSubTrace {
    std::size_t start_index = 0, end_index = 0;
    std::string reason;
};

struct SegmentationResult {
    std::size_t full_charge_index = 0;
    std::vector<RelaxSubTrace> subtraces;
    std::vector<DroppedSubTrace> dropped;
};

// Split the post-full-charge region of a session into relaxation sub-traces
// separated by trickle recharge spikes, keeping only segments long enough to
// fit and with an acceptable power-law fit.
SegmentationResult segment_subtraces(const ChargeSessionLog& log,
                                     const SegmentationConfig& config = {});

// Put a sub-trace onto the reference grid: measured samples (interpolated)
// where the segment covers the grid, the fitted power law beyond its end.
// Throws TraceTooShortError when the segment is shorter than min_subtrace_s.
RelaxSubTrace recover_trace(const RelaxSubTrace& sub, const GridSpec& grid = {},
                            double min_subtrace_s = 300.0);

} // namespace relaxsoh
