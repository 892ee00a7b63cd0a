#pragma once

#include "relaxsoh/charge_session.hpp"
#include "relaxsoh/errors.hpp"
#include "relaxsoh/fingerprint.hpp"
#include "relaxsoh/trace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace relaxsoh {

struct SohEstimate {
    std::string session_id;
    double raw = 0.0;
    double smoothed = 0.0;
    std::size_t n_subtraces = 0;
    std::int64_t timestamp = 0;
    bool clamped = false;
};

// No usable relaxation segment survived segmentation and recovery.
class NoEstimateError : public Error {
public:
    using Error::Error;
};

// End-to-end estimate for one charging session: segment, recover each
// sub-trace onto the model grid, predict, and average. Raw values outside
// [0, 1.2] are clamped and flagged.
SohEstimate estimate_session(const FingerprintModel& model, const ChargeSessionLog& log,
                             const SegmentationConfig& config = {},
                             double min_subtrace_s = 300.0);

// Trailing-window linear smoothing over a session history, ordered oldest to
// newest. Each entry's smoothed value is the window's least-squares line
// evaluated at that entry; windows with fewer than 3 points pass raw through.
std::vector<SohEstimate> smooth_history(std::vector<SohEstimate> history,
                                        std::size_t window = 10);

struct CoulombResult {
    double delta_c_mah = 0.0;
    double c_fullcharge_mah = 0.0;
    double soh = 0.0;
};

// Capacity-based reference: integrate logged current over a partial charge or
// discharge between two known SoC levels.
CoulombResult coulomb_count(const VoltageTrace& trace, double soc_start, double soc_end,
                            const BatterySpec& spec);

} // namespace relaxsoh
