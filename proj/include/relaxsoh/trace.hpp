#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace relaxsoh {

// One sample of a logged voltage trace. Time is seconds since the start of the
// trace; voltage in volts. Current (mA, discharge negative) and temperature
// (deg C) are optional side channels.
struct VoltageSample {
    double t_s = 0.0;
    double v = 0.0;
    std::optional<double> i_ma;
    std::optional<double> temp_c;
};

// A contiguous voltage log with a nominal sampling interval.
struct VoltageTrace {
    std::vector<VoltageSample> samples;
    double sample_interval_s = 1.0;

    double duration_s() const {
        return samples.empty() ? 0.0 : samples.back().t_s - samples.front().t_s;
    }
    bool has_current() const;
    std::vector<double> voltages() const;
    std::vector<double> times() const;
};

// Charging parameters of a battery/charger pair. Currents in mA, volts in V.
struct ChargeProfile {
    double i_cc_ma = 0.0;
    double v_full = 0.0;
    double i_cutoff_ma = 0.0;
    double v_discharge_cutoff = 0.0;
    double rest_minutes = 30.0;
};

// Static description of a battery model.
struct BatterySpec {
    double design_capacity_mah = 0.0;
    std::string model_name;
};

// One labeled cycle: the relaxing-voltage trace recorded after a full charge,
// plus the capacity-derived state-of-health label for that cycle.
struct CycleRecord {
    std::uint32_t cycle_index = 0;
    VoltageTrace relax_trace;
    double soh = 1.0;
    ChargeProfile profile;
    bool synthetic = false;
};

// Uniform time grid used to compare traces sample-by-sample.
struct GridSpec {
    double duration_s = 1800.0;
    double interval_s = 1.0;
    std::size_t size() const {
        return static_cast<std::size_t>(duration_s / interval_s) + 1;
    }
};

// Parse a trace from CSV text with header `t_s,v_V[,i_mA][,temp_C]`.
// Throws ParseError (with line number) on malformed rows, ValidationError on
// contract violations (voltage range, time ordering, gaps).
VoltageTrace parse_trace(const std::string& csv_text);

// Inverse of parse_trace; emits the same header layout the trace carries.
std::string serialize_trace(const VoltageTrace& trace);

// Voltage drop from the first sample: d[k] = v[0] - v[k]. Positive for a
// relaxing (falling) trace.
std::vector<double> dropped_voltage(const VoltageTrace& trace);

// Linear interpolation of the trace onto a uniform grid anchored at the first
// sample's timestamp. The trace must cover the grid span (up to one interval
// of slack at the tail).
std::vector<double> resample_to_grid(const VoltageTrace& trace, const GridSpec& grid);

// Enforce the trace contract: >= 2 samples, strictly increasing time, voltage
// in (2.0, 5.0) V, no gap exceeding twice the nominal interval.
void validate_trace(const VoltageTrace& trace);

} // namespace relaxsoh
