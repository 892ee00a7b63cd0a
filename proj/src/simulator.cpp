#include "relaxsoh/simulator.hpp"

#include "relaxsoh/errors.hpp"
#include "relaxsoh/rng.hpp"

#include <algorithm>
#include <cmath>

namespace relaxsoh {

namespace {

constexpr std::uint64_t kPhaseStream = 0x50484153;
constexpr std::uint64_t kStructStreamBase = 0x53545255;
constexpr std::uint64_t kOutlierStream = 0x4F55544C;
constexpr std::uint64_t kSessionStreamBase = 0x5E550000;
constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kCcSocFraction = 0.8;   // capacity fraction delivered in CC
constexpr double kSessionStartSoc = 0.2; // sessions begin partly charged
constexpr double kModePeriodS = 1800.0;  // structured-mode fundamental period

double resistance_ohm(const SimBatteryConfig& cfg, double soh) {
    return (cfg.internal_resistance_mohm +
            cfg.resistance_growth_mohm_per_soh * (1.0 - soh)) /
           1000.0;
}

double clamp_soh(double s) { return std::clamp(s, 0.05, 1.2); }

// AR(1) mode weights for one cycle, reproducible for any cycle in isolation:
// w[0] ~ N(0,1), w[i] = rho*w[i-1] + sqrt(1-rho^2)*xi_i, each xi from its own
// derived stream, so the chain has stationary unit variance.
std::vector<double> structured_weights(const SimBatteryConfig& cfg, std::uint32_t cycle_index) {
    const int m = cfg.noise.n_modes;
    const double rho = cfg.noise.cycle_correlation;
    std::vector<double> w(m);
    {
        GaussianRng rng(derive_seed(cfg.seed, kStructStreamBase));
        for (int k = 0; k < m; ++k) w[k] = rng.normal();
    }
    const double innov = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    for (std::uint32_t i = 1; i <= cycle_index; ++i) {
        GaussianRng rng(derive_seed(cfg.seed, kStructStreamBase + i));
        for (int k = 0; k < m; ++k) w[k] = rho * w[k] + innov * rng.normal();
    }
    return w;
}

std::vector<double> mode_phases(const SimBatteryConfig& cfg) {
    GaussianRng rng(derive_seed(cfg.seed, kPhaseStream));
    std::vector<double> phases(cfg.noise.n_modes);
    for (auto& p : phases) p = kTwoPi * rng.uniform();
    return phases;
}

double structured_noise_at(const NoiseModel& noise, const std::vector<double>& weights,
                           const std::vector<double>& phases, double t) {
    if (noise.n_modes <= 0 || noise.structured_fraction <= 0.0) return 0.0;
    const double amp = noise.sigma_v *
                       std::sqrt(noise.structured_fraction / static_cast<double>(noise.n_modes));
    double acc = 0.0;
    for (int m = 0; m < noise.n_modes; ++m)
        acc += weights[m] * std::sqrt(2.0) *
               std::sin(kTwoPi * (m + 1) * t / kModePeriodS + phases[m]);
    return amp * acc;
}

// Appends the CC + CV charge phases; current telemetry is the charger's own
// (noise-free) reading, so the cutoff crossing is exact. Returns nothing; the
// first sample after this block is the rest/relaxation start.
void append_charge(std::vector<VoltageSample>& out, const SimBatteryConfig& cfg, double soh,
                   double start_soc, GaussianRng& rng) {
    const double cap = soh * cfg.spec.design_capacity_mah;
    const double icc = cfg.profile.i_cc_ma;
    const double icut = cfg.profile.i_cutoff_ma;
    const double vfull = cfg.profile.v_full;
    const double r = resistance_ohm(cfg, soh);
    const double v_base = cfg.profile.v_discharge_cutoff + icc / 1000.0 * r;
    double t = out.empty() ? 0.0 : out.back().t_s + 1.0;

    const long cc_n = std::lround((kCcSocFraction - start_soc) * cap / icc * 3600.0);
    for (long k = 0; k < cc_n; ++k) {
        double soc = start_soc + (kCcSocFraction - start_soc) * static_cast<double>(k) /
                                     static_cast<double>(cc_n);
        double u = soc / kCcSocFraction;
        double v = v_base + (vfull - v_base) * std::pow(u, 0.7);
        out.push_back({t, v + rng.normal(0.0, cfg.noise.sigma_v), icc, {}});
        t += 1.0;
    }

    const double tau = 720.0 * cap / (icc - icut);
    const long cv_n = static_cast<long>(std::ceil(tau * std::log(icc / icut)));
    for (long k = 0; k < cv_n; ++k) {
        double i = icc * std::exp(-static_cast<double>(k) / tau);
        out.push_back({t, vfull + rng.normal(0.0, cfg.noise.sigma_v), i, {}});
        t += 1.0;
    }
}

} // namespace

double relax_voltage(const RelaxLaw& law, double soh, double t) {
    return law.a(soh) * std::pow(t + 1.0, law.b(soh)) + law.c(soh);
}

SimulatedCycle simulate_cycle(const SimBatteryConfig& config, std::uint32_t cycle_index) {
    if (config.spec.design_capacity_mah <= 0.0)
        throw ValidationError("design capacity must be positive");
    if (config.profile.i_cc_ma <= config.profile.i_cutoff_ma ||
        config.profile.i_cutoff_ma <= 0.0)
        throw ValidationError("charge profile needs i_cc > i_cutoff > 0");

    const double soh = clamp_soh(config.initial_soh - config.fade_per_cycle * cycle_index);
    GaussianRng rng(derive_seed(config.seed, cycle_index));

    SimulatedCycle cyc;
    cyc.true_soh = soh;
    auto& samples = cyc.full_trace.samples;

    append_charge(samples, config, soh, 0.0, rng);
    cyc.rest_start_index = samples.size();

    const auto weights = structured_weights(config, cycle_index);
    const auto phases = mode_phases(config);
    const long rest_n = std::lround(config.profile.rest_minutes * 60.0);
    const double sigma_white =
        config.noise.sigma_v * std::sqrt(std::max(0.0, 1.0 - config.noise.structured_fraction));
    double t = samples.empty() ? 0.0 : samples.back().t_s + 1.0;
    VoltageTrace rest;
    for (long k = 0; k <= rest_n; ++k) {
        double v = relax_voltage(config.relax, soh, static_cast<double>(k)) +
                   rng.normal(0.0, sigma_white) +
                   structured_noise_at(config.noise, weights, phases, static_cast<double>(k));
        samples.push_back({t, v, 0.0, {}});
        rest.samples.push_back({static_cast<double>(k), v, {}, {}});
        t += 1.0;
    }
    cyc.rest_end_index = samples.size() - 1;

    // Constant-current discharge delivering exactly soh * design capacity
    // before noise; the reported (noisy) current is what gets Coulomb-counted
    // into the label.
    const double cap = soh * config.spec.design_capacity_mah;
    const long dis_n = std::lround(cap / config.profile.i_cc_ma * 3600.0);
    const double idis = cap * 3600.0 / static_cast<double>(dis_n);
    const double r = resistance_ohm(config, soh);
    const double v_start =
        relax_voltage(config.relax, soh, static_cast<double>(rest_n)) - idis / 1000.0 * r;
    const double vcut = config.profile.v_discharge_cutoff;
    std::vector<double> reported_i;
    reported_i.reserve(dis_n + 1);
    for (long k = 0; k <= dis_n; ++k) {
        double f = static_cast<double>(k) / static_cast<double>(dis_n);
        double v = vcut + (v_start - vcut) * std::pow(1.0 - f, 0.8);
        double i = -idis * (1.0 + config.noise.current_noise_frac * rng.normal());
        samples.push_back({t, v + rng.normal(0.0, config.noise.sigma_v), i, {}});
        reported_i.push_back(i);
        t += 1.0;
    }

    double coulombs_mah = 0.0;
    for (std::size_t k = 0; k + 1 < reported_i.size(); ++k)
        coulombs_mah += 0.5 * (reported_i[k] + reported_i[k + 1]) / 3600.0;

    cyc.full_trace.sample_interval_s = 1.0;
    rest.sample_interval_s = 1.0;
    cyc.record.cycle_index = cycle_index;
    cyc.record.relax_trace = std::move(rest);
    cyc.record.soh = std::clamp(std::abs(coulombs_mah) / config.spec.design_capacity_mah, 0.0, 1.2);
    cyc.record.profile = config.profile;
    return cyc;
}

SimCampaign simulate_campaign(const SimBatteryConfig& config, std::uint32_t n_cycles,
                              double outlier_prob) {
    SimCampaign out;
    out.records.reserve(n_cycles);
    out.true_soh.reserve(n_cycles);
    GaussianRng orng(derive_seed(config.seed, kOutlierStream));
    for (std::uint32_t idx = 0; idx < n_cycles; ++idx) {
        SimulatedCycle cyc = simulate_cycle(config, idx);
        CycleRecord rec = std::move(cyc.record);
        if (outlier_prob > 0.0 && orng.uniform() < outlier_prob) {
            if (orng.uniform() < 0.5) {
                double mag = 0.01 + 0.01 * orng.uniform();
                double sign = orng.uniform() < 0.5 ? -1.0 : 1.0;
                rec.soh = std::clamp(rec.soh + sign * mag, 0.0, 1.2);
                out.injected.push_back({idx, "label"});
            } else {
                double phase = kTwoPi * orng.uniform();
                for (auto& s : rec.relax_trace.samples)
                    s.v += 0.005 * std::sin(kTwoPi * s.t_s / 300.0 + phase);
                out.injected.push_back({idx, "trace"});
            }
        }
        out.records.push_back(std::move(rec));
        out.true_soh.push_back(cyc.true_soh);
    }
    return out;
}

SimulatedSession simulate_overnight_session(const SimBatteryConfig& config, double true_soh,
                                            bool with_trickle, double duration_h,
                                            std::uint32_t session_index) {
    if (duration_h < 1.0)
        throw ValidationError("session duration must be at least 1 hour");
    if (with_trickle && !config.trickle.has_value())
        throw ValidationError("config has no trickle settings");

    const double soh = clamp_soh(true_soh);
    GaussianRng rng(derive_seed(config.seed, kSessionStreamBase + session_index));

    SimulatedSession ses;
    ses.truth.true_soh = soh;
    auto& samples = ses.log.samples;
    append_charge(samples, config, soh, kSessionStartSoc, rng);
    ses.truth.full_charge_index = samples.size();
    ses.truth.relax_start_indices.push_back(samples.size());

    const long total_n = std::lround(duration_h * 3600.0);
    long rest_n = total_n - static_cast<long>(samples.size());
    if (rest_n < 60)
        throw ValidationError("session too short: charge leaves no rest time");

    const double sigma = config.noise.sigma_v;
    const double vfull = config.profile.v_full;
    const RelaxLaw& law = config.relax;
    double t = samples.back().t_s + 1.0;

    if (!with_trickle) {
        for (long k = 0; k < rest_n; ++k) {
            double v = relax_voltage(law, soh, static_cast<double>(k));
            samples.push_back({t, v + rng.normal(0.0, sigma), 0.0, {}});
            t += 1.0;
        }
        return ses;
    }

    const TrickleConfig& tk = *config.trickle;
    const double trig = tk.trigger_drop_mv / 1000.0;
    const double b = law.b(soh);
    const double amp0 = law.a(soh);
    long emitted = 0;
    double seg_start = 0.0; // rest time at current segment's first sample
    while (emitted < rest_n) {
        double a_k = amp0 * std::exp(-seg_start / tk.ocv_recovery_tau_s);
        double c_k = vfull - a_k;
        long seg_len;
        bool triggers;
        if (a_k <= trig * 1.0000001) {
            seg_len = rest_n - emitted;
            triggers = false;
        } else {
            double tau_star = std::pow(1.0 - trig / a_k, 1.0 / b) - 1.0;
            seg_len = std::max<long>(1, static_cast<long>(std::ceil(tau_star)));
            triggers = true;
            if (seg_len > rest_n - emitted) {
                seg_len = rest_n - emitted;
                triggers = false;
            }
        }
        for (long k = 0; k < seg_len; ++k) {
            double v = a_k * std::pow(static_cast<double>(k) + 1.0, b) + c_k;
            // The first sample of a recharged segment is the top-up pulse.
            double i = (emitted > 0 && k == 0) ? config.profile.i_cc_ma : 0.0;
            samples.push_back({t, v + rng.normal(0.0, sigma), i, {}});
            t += 1.0;
            ++emitted;
        }
        if (!triggers) break;
        seg_start += static_cast<double>(seg_len);
        if (emitted < rest_n) {
            std::size_t idx = samples.size();
            ses.truth.trickle_trigger_indices.push_back(idx);
            ses.truth.relax_start_indices.push_back(idx);
        }
    }
    ses.log.sample_interval_s = 1.0;
    return ses;
}

namespace {

SimBatteryConfig make_preset(const std::string& model, double capacity_mah, double v_full,
                             double v_cutoff, double c_rate, double r0_mohm, double b0,
                             std::optional<TrickleConfig> trickle = {}) {
    SimBatteryConfig cfg;
    cfg.spec = {capacity_mah, model};
    cfg.profile.i_cc_ma = c_rate * capacity_mah;
    cfg.profile.v_full = v_full;
    cfg.profile.i_cutoff_ma = 0.05 * capacity_mah;
    cfg.profile.v_discharge_cutoff = v_cutoff;
    cfg.profile.rest_minutes = 30.0;
    cfg.internal_resistance_mohm = r0_mohm;
    cfg.trickle = trickle;

    // Relaxation amplitude tied to the ohmic step: the first-second drop
    // a*(1 - 2^b) equals i_cutoff * R, and tracks R as the cell ages, so the
    // voltage drop at any rest time is linear in state of health.
    const double kappa = 1.0 - std::exp2(b0);
    const double icut_a = cfg.profile.i_cutoff_ma / 1000.0;
    cfg.relax.b0 = b0;
    cfg.relax.a0 = icut_a * (r0_mohm / 1000.0) / kappa;
    cfg.relax.da_dsoh = -icut_a * (cfg.resistance_growth_mohm_per_soh / 1000.0) / kappa;
    cfg.relax.c0 = v_full - cfg.relax.a0;
    cfg.relax.dc_dsoh = -cfg.relax.da_dsoh;
    cfg.relax.db_dsoh = 0.0;
    return cfg;
}

} // namespace

SimBatteryConfig preset(const std::string& name) {
    if (name == "galaxy-s3") return make_preset("galaxy-s3", 2200, 4.20, 3.3, 0.5, 68, -0.15);
    if (name == "galaxy-s3-slow")
        return make_preset("galaxy-s3-slow", 2200, 4.20, 3.3, 0.25, 68, -0.15);
    if (name == "nexus-6p") return make_preset("nexus-6p", 3450, 4.35, 3.3, 0.5, 55, -0.13);
    if (name == "nexus-5x") return make_preset("nexus-5x", 2700, 4.35, 3.3, 0.5, 60, -0.14);
    if (name == "nexus-s") return make_preset("nexus-s", 1500, 4.20, 3.2, 0.5, 75, -0.16);
    if (name == "xperia-z5") return make_preset("xperia-z5", 2900, 4.20, 3.2, 0.5, 58, -0.13);
    if (name == "iphone-6-plus")
        return make_preset("iphone-6-plus", 2900, 4.35, 3.3, 0.5, 62, -0.14);
    if (name == "galaxy-note-2")
        return make_preset("galaxy-note-2", 3100, 4.20, 3.2, 0.5, 65, -0.15);
    if (name == "galaxy-s5") return make_preset("galaxy-s5", 2800, 4.35, 3.3, 0.5, 60, -0.13);
    if (name == "galaxy-s4")
        return make_preset("galaxy-s4", 2600, 4.20, 3.0, 0.5, 40, -0.12,
                           TrickleConfig{40.0, 1.0, 150000.0});
    if (name == "galaxy-s6-edge")
        return make_preset("galaxy-s6-edge", 2600, 4.37, 3.3, 0.5, 19, -0.09,
                           TrickleConfig{20.0, 1.0, 150000.0});
    throw ValidationError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
    return {"galaxy-s3",     "galaxy-s3-slow", "galaxy-s4",    "galaxy-s5",
            "galaxy-s6-edge", "iphone-6-plus",  "galaxy-note-2", "nexus-5x",
            "nexus-6p",      "nexus-s",        "xperia-z5"};
}

} // namespace relaxsoh
