#pragma once

#include "relaxsoh/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace relaxsoh {

// Relaxation law v(t) = a(S)*(t+1)^b(S) + c(S) for state-of-health S.
// The *0 values hold at S = 1; each parameter drifts linearly in S.
struct RelaxLaw {
    double a0 = 0.0;
    double b0 = -0.15;
    double c0 = 0.0;
    double da_dsoh = 0.0;
    double db_dsoh = 0.0;
    double dc_dsoh = 0.0;

    double a(double soh) const { return a0 + da_dsoh * (soh - 1.0); }
    double b(double soh) const { return b0 + db_dsoh * (soh - 1.0); }
    double c(double soh) const { return c0 + dc_dsoh * (soh - 1.0); }
};

// Noiseless relaxation voltage at rest time t for state-of-health soh.
double relax_voltage(const RelaxLaw& law, double soh, double t);

// Maintenance (trickle) charging behavior of the charger: when the resting
// voltage has dropped trigger_drop_mv below full, the charger tops the cell
// back up within recharge_s seconds. Successive relaxations get shallower as
// the open-circuit voltage recovers toward full with time constant
// ocv_recovery_tau_s, which stretches the gaps between events.
struct TrickleConfig {
    double trigger_drop_mv = 40.0;
    double recharge_s = 1.0;
    double ocv_recovery_tau_s = 150000.0;
};

// Measurement noise model. sigma_v is the total per-sample voltage noise,
// white by default. Optionally a structured_fraction of the rest-segment
// variance can come from n_modes smooth sinusoidal disturbance modes whose
// weights are AR(1)-correlated across cycles (cycle_correlation), emulating
// slowly drifting rig conditions. Structured modes apply to campaign rest
// traces only; charge/discharge segments and overnight sessions always see
// white noise. Beware that cross-cycle-correlated disturbances comparable to
// the degradation signal let a trained model key on the drift instead of the
// health trend, which does not transfer to independently generated data.
// Reported current carries multiplicative white noise of current_noise_frac.
struct NoiseModel {
    double sigma_v = 0.0005;
    double structured_fraction = 0.0;
    int n_modes = 40;
    double cycle_correlation = 0.9;
    double current_noise_frac = 0.02;
};

// Full description of one simulated battery + charger + logging rig.
struct SimBatteryConfig {
    BatterySpec spec;
    ChargeProfile profile;
    double fade_per_cycle = 0.001;
    double initial_soh = 1.0;
    RelaxLaw relax;
    double internal_resistance_mohm = 68.0;
    double resistance_growth_mohm_per_soh = 18.0;
    NoiseModel noise;
    std::optional<TrickleConfig> trickle;
    std::uint64_t seed = 1;
};

// One simulated charge/rest/discharge cycle. record.relax_trace holds the
// rest segment re-zeroed to t=0; full_trace the whole cycle with current.
struct SimulatedCycle {
    CycleRecord record;
    double true_soh = 1.0;
    VoltageTrace full_trace;
    std::size_t rest_start_index = 0;
    std::size_t rest_end_index = 0;
};

struct OutlierInjection {
    std::size_t cycle_index = 0;
    std::string kind; // "label" or "trace"
};

// A cycling campaign: the labeled records plus per-cycle ground truth.
struct SimCampaign {
    std::vector<CycleRecord> records;
    std::vector<double> true_soh;
    std::vector<OutlierInjection> injected;
};

// Ground truth for an overnight charge session log.
struct SessionTruth {
    double true_soh = 1.0;
    std::size_t full_charge_index = 0;
    std::vector<std::size_t> trickle_trigger_indices;
    std::vector<std::size_t> relax_start_indices;
};

struct SimulatedSession {
    VoltageTrace log;
    SessionTruth truth;
};

// Simulate one cycle. Deterministic given (config.seed, cycle_index): charge
// is CC to 80% capacity then CV with exponentially decaying current down to
// the cutoff; rest follows the relaxation law at the cycle's true SoH; the
// constant-current discharge delivers exactly true_soh * design_capacity
// before noise. The record's label is Coulomb-counted from the noisy
// discharge current.
SimulatedCycle simulate_cycle(const SimBatteryConfig& config, std::uint32_t cycle_index);

// Repeat simulate_cycle for n_cycles. With outlier_prob > 0 a per-cycle coin
// flips (independent stream) and perturbs either the label (+-1..2% SoH) or
// the rest trace (added 5 mV sinusoid); injections are listed in the result.
SimCampaign simulate_campaign(const SimBatteryConfig& config, std::uint32_t n_cycles,
                              double outlier_prob = 0.0);

// Simulate an overnight charge session: CC/CV charge from 20% state of
// charge, then rest for the remaining duration. Without trickle the rest is
// one clean relaxation; with trickle the charger tops up whenever the drop
// reaches the configured trigger, producing strictly lengthening gaps.
// session_index selects independent noise streams for repeated sessions.
SimulatedSession simulate_overnight_session(const SimBatteryConfig& config, double true_soh,
                                            bool with_trickle, double duration_h = 8.0,
                                            std::uint32_t session_index = 0);

// Named battery presets (capacity, charge profile, relaxation law). The
// relaxation amplitude is derived from the internal resistance so that the
// first-second voltage step equals i_cutoff * R.
SimBatteryConfig preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace relaxsoh
