// Acceptance suite: one pass/fail line per shipping criterion, exit code =
// number of failures. Unlike the unit tests this exercises the full pipeline
// end to end against the simulator's ground truth.

#include "oracles.hpp"

#include "relaxsoh/baselines.hpp"
#include "relaxsoh/charge_session.hpp"
#include "relaxsoh/estimator.hpp"
#include "relaxsoh/fingerprint.hpp"
#include "relaxsoh/fitting.hpp"
#include "relaxsoh/preprocessing.hpp"
#include "relaxsoh/simulator.hpp"
#include "relaxsoh/usecases.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace {

using namespace relaxsoh;
namespace fs = std::filesystem;

int g_failed = 0;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void line(int idx, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str());
    if (!ok) ++g_failed;
}

template <typename Fn>
void criterion(int idx, const char* name, Fn&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        line(idx, name, false, fmt("exception: %s", e.what()));
    }
}

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double percentile_95(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
    return v[idx - 1];
}

CycleDataset preprocess(const SimCampaign& camp, const BatterySpec& spec) {
    CycleDataset ds{camp.records, spec};
    ds = apply_filters(ds, {filter_soh_outliers(ds), filter_trace_outliers(ds)});
    return smooth_dataset(ds, 7);
}

ChargeSessionLog session_log(const SimulatedSession& session, const SimBatteryConfig& config) {
    ChargeSessionLog log;
    log.trace = session.log;
    log.full_charge_voltage = config.profile.v_full;
    log.model_name = config.spec.model_name;
    return log;
}

SegmentationConfig session_seg(const SimBatteryConfig& config, double r2_threshold = 0.95) {
    SegmentationConfig seg;
    seg.i_cutoff_ma = config.profile.i_cutoff_ma;
    seg.r2_threshold = r2_threshold;
    return seg;
}

VoltageTrace constant_current_trace(double i_ma, double duration_s, double dt_s) {
    VoltageTrace t;
    t.sample_interval_s = dt_s;
    for (double s = 0.0; s <= duration_s + 1e-9; s += dt_s)
        t.samples.push_back({s, 3.9, i_ma, {}});
    return t;
}

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
    // Per-column scaling keeps the covariance eigenvalues well separated.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) r[j] = (1.0 + 0.3 * static_cast<double>(j)) * gauss(rng);
    return rows;
}

// Shared same-battery fixture: 300-cycle campaign, preprocessed, split 80/20,
// fingerprint model trained on the training part.
struct Fixture {
    SimBatteryConfig config;
    SimCampaign campaign;
    CycleDataset train;
    CycleDataset test;
    FingerprintModel model;
    std::vector<double> holdout_errors;
    double build_seconds = 0.0;
};

Fixture build_fixture() {
    auto t0 = std::chrono::steady_clock::now();
    Fixture f;
    f.config = preset("galaxy-s3");
    f.config.seed = 7;
    f.campaign = simulate_campaign(f.config, 300);
    CycleDataset ds = preprocess(f.campaign, f.config.spec);
    f.train.spec = f.test.spec = ds.spec;
    for (std::size_t i = 0; i < ds.records.size(); ++i)
        (i % 5 == 2 ? f.test : f.train).records.push_back(ds.records[i]);
    FingerprintConfig fc;
    fc.uses_dropped_voltage = false;
    fc.min_leaf = 2;
    f.model = train_map(f.train, fc);
    for (const auto& rec : f.test.records)
        f.holdout_errors.push_back(std::abs(predict_trace(f.model, rec.relax_trace) - rec.soh));
    f.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return f;
}

int shell(const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

} // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    Fixture f;
    try {
        f = build_fixture();
    } catch (const std::exception& e) {
        std::printf("[FAIL] fixture: %s\n", e.what());
        return 14;
    }

    criterion(1, "same-battery holdout accuracy", [&] {
        double mean = mean_of(f.holdout_errors);
        double p95 = percentile_95(f.holdout_errors);
        bool ok = mean < 0.02 && p95 < 0.03 && f.build_seconds < 60.0;
        line(1, "same-battery holdout accuracy", ok,
             fmt("mean=%.4f p95=%.4f n=%zu runtime=%.1fs", mean, p95, f.holdout_errors.size(),
                 f.build_seconds));
    });

    criterion(2, "cross-battery and cross-profile transfer", [&] {
        SimBatteryConfig other = f.config;
        other.seed = 8;
        CycleDataset dsb = preprocess(simulate_campaign(other, 300), other.spec);
        std::vector<double> errs_b;
        for (const auto& rec : dsb.records)
            errs_b.push_back(std::abs(predict_trace(f.model, rec.relax_trace) - rec.soh));

        SimBatteryConfig slow = f.config; // same cell, half the CC charge rate
        slow.seed = 9;
        slow.profile.i_cc_ma /= 2.0;
        CycleDataset dsc = preprocess(simulate_campaign(slow, 300), slow.spec);
        double worst_c = 0;
        for (const auto& rec : dsc.records)
            worst_c = std::max(worst_c, std::abs(predict_trace(f.model, rec.relax_trace) - rec.soh));

        double mean_b = mean_of(errs_b);
        bool ok = mean_b < 0.02 && worst_c <= 0.025;
        line(2, "cross-battery and cross-profile transfer", ok,
             fmt("cross-battery mean=%.4f, half-rate worst=%.4f", mean_b, worst_c));
    });

    criterion(3, "4%-bin confusion accuracy", [&] {
        ConfusionResult cr = evaluate_confusion(f.model, f.test, 0.04);
        bool ok = cr.accuracy >= 0.95;
        line(3, "4%-bin confusion accuracy", ok,
             fmt("accuracy=%.4f over %zu holdout records", cr.accuracy, f.test.records.size()));
    });

    criterion(4, "power-law fit recovery and model comparison", [&] {
        const double a = 0.05, b = -0.5, c = 4.25;
        VoltageTrace planted;
        planted.sample_interval_s = 1.0;
        for (int t = 0; t <= 1800; ++t)
            planted.samples.push_back({static_cast<double>(t), a * std::pow(t + 1.0, b) + c, {}, {}});
        PowerFit pf = fit_power(planted);
        double rel = std::max({std::abs(pf.a - a) / a, std::abs(pf.b - b) / -b, std::abs(pf.c - c) / c});

        std::size_t n = 0, fit_ok = 0, beats_exp1 = 0, beats_exp2 = 0;
        for (const auto& rec : f.campaign.records) {
            PowerFit noisy = fit_power(rec.relax_trace);
            if (noisy.rmse < 0.0009 && noisy.r_squared > 0.965) ++fit_ok;
            for (int terms : {1, 2}) {
                std::size_t& wins = terms == 1 ? beats_exp1 : beats_exp2;
                try {
                    if (fit_exponential(rec.relax_trace, terms).r_squared < noisy.r_squared) ++wins;
                } catch (const Error&) {
                    ++wins; // an exponential that cannot even fit scores lower
                }
            }
            ++n;
        }
        double nn = static_cast<double>(n);
        bool ok = rel < 1e-6 && fit_ok == n && beats_exp1 / nn >= 0.90 && beats_exp2 / nn >= 0.90;
        line(4, "power-law fit recovery and model comparison", ok,
             fmt("planted rel_err=%.1e, %zu/%zu noisy fits in tolerance, beats exp: %.0f%%/%.0f%%", rel,
                 fit_ok, n, 100.0 * beats_exp1 / nn, 100.0 * beats_exp2 / nn));
    });

    criterion(5, "PCA matches brute-force eigendecomposition", [&] {
        double worst_eig = 0, worst_dot = 0, worst_proj = 0;
        for (auto [n, d, seed] : {std::tuple<std::size_t, std::size_t, std::uint64_t>{40, 12, 5},
                                  {25, 25, 6},
                                  {12, 30, 7}}) {
            auto rows = random_rows(n, d, seed);
            PcaModel model = pca_fit(rows, 1.0);
            oracle::PcaReference ref = oracle::pca_reference(rows);
            for (std::size_t j = 0; j < model.components.size(); ++j) {
                double scale = std::max(1.0, std::abs(ref.eigenvalues[j]));
                worst_eig = std::max(
                    worst_eig, std::abs(model.explained_variance[j] - ref.eigenvalues[j]) / scale);
                double dot = 0;
                for (std::size_t k = 0; k < d; ++k)
                    dot += model.components[j][k] * ref.components[j][k];
                worst_dot = std::max(worst_dot, std::abs(std::abs(dot) - 1.0));
            }
            for (const auto& row : rows) {
                std::vector<double> pm = pca_project(model, row);
                for (std::size_t j = 0; j < pm.size(); ++j) {
                    double pr = 0;
                    for (std::size_t k = 0; k < d; ++k)
                        pr += (row[k] - ref.mean[k]) * ref.components[j][k];
                    worst_proj = std::max(worst_proj, std::abs(std::abs(pm[j]) - std::abs(pr)) /
                                                          std::max(1.0, std::abs(pr)));
                }
            }
        }
        std::size_t k = f.model.pca.components.size();
        bool ok = worst_eig < 1e-8 && worst_dot < 1e-8 && worst_proj < 1e-8 && k <= 50 &&
                  f.model.pca.variance_retained >= 0.99;
        line(5, "PCA matches brute-force eigendecomposition", ok,
             fmt("worst eig/dir/proj dev=%.1e/%.1e/%.1e; grid model k=%zu retained=%.4f", worst_eig,
                 worst_dot, worst_proj, k, f.model.pca.variance_retained));
    });

    criterion(6, "coulomb counting exactness", [&] {
        // Piecewise-linear ramp: trapezoid integration is exact, so the count
        // must match the closed-form area.
        VoltageTrace ramp;
        ramp.sample_interval_s = 1.0;
        for (int t = 0; t <= 3600; ++t) {
            double i = t <= 1800 ? 400.0 + (1600.0 - 400.0) * t / 1800.0
                                 : 1600.0 + (800.0 - 1600.0) * (t - 1800.0) / 1800.0;
            ramp.samples.push_back({static_cast<double>(t), 3.9, i, {}});
        }
        double closed_mah = (0.5 * (400.0 + 1600.0) * 1800.0 + 0.5 * (1600.0 + 800.0) * 1800.0) / 3600.0;
        CoulombResult ramp_res = coulomb_count(ramp, 0.2, 0.7, {2200.0, "ramp-cell"});
        double ramp_rel = std::abs(ramp_res.delta_c_mah - closed_mah) / closed_mah;

        CoulombResult worked = coulomb_count(constant_current_trace(2117.0, 3600.0, 1.0), 0.0, 1.0,
                                             {2330.0, "bench-cell"});
        double worked_dev = std::abs(worked.soh - 2117.0 / 2330.0);
        bool ok = ramp_rel < 1e-9 && worked_dev < 1e-12;
        line(6, "coulomb counting exactness", ok,
             fmt("ramp rel_err=%.1e, bench soh=%.6f (expected %.6f)", ramp_rel, worked.soh,
                 2117.0 / 2330.0));
    });

    criterion(7, "trickle segmentation boundary recovery", [&] {
        bool ok = true;
        std::string detail;
        // 40 mV and 20 mV trigger devices; the 20 mV device's shallow segments
        // fit with slightly lower r-squared, hence the relaxed gate.
        for (auto [name, gate] : {std::pair<const char*, double>{"galaxy-s4", 0.95},
                                  {"galaxy-s6-edge", 0.94}}) {
            SimBatteryConfig cfg = preset(name);
            cfg.seed = 21;
            SimulatedSession s = simulate_overnight_session(cfg, 0.92, true, 8.0, 0);
            SegmentationResult sr =
                segment_subtraces(session_log(s, cfg), session_seg(cfg, gate));
            std::size_t k = s.truth.trickle_trigger_indices.size();
            long worst = 0;
            for (std::size_t j = 0; j < sr.subtraces.size() && j < s.truth.relax_start_indices.size(); ++j)
                worst = std::max(worst, std::labs(static_cast<long>(sr.subtraces[j].start_index) -
                                                  static_cast<long>(s.truth.relax_start_indices[j])));
            for (std::size_t j = 0; j + 1 < sr.subtraces.size() && j < k; ++j)
                worst = std::max(worst, std::labs(static_cast<long>(sr.subtraces[j].end_index) -
                                                  static_cast<long>(s.truth.trickle_trigger_indices[j])));
            ok = ok && sr.subtraces.size() == k + 1 && worst <= 2;
            detail += fmt("%s: K=%zu subtraces=%zu off<=%ld; ", name, k, sr.subtraces.size(), worst);
        }
        SimBatteryConfig s3 = preset("galaxy-s3");
        SimulatedSession quiet = simulate_overnight_session(s3, 0.97, false, 6.0, 3);
        SegmentationResult sq = segment_subtraces(session_log(quiet, s3), session_seg(s3));
        ok = ok && sq.subtraces.size() == 1;
        detail += fmt("no-trickle subtraces=%zu", sq.subtraces.size());
        line(7, "trickle segmentation boundary recovery", ok, detail);
    });

    criterion(8, "sub-trace recovery fidelity", [&] {
        double worst_rms = 0;
        for (const auto& rec : f.campaign.records) {
            const VoltageTrace& full = rec.relax_trace;
            RelaxSubTrace sub;
            sub.trace.sample_interval_s = full.sample_interval_s;
            for (const auto& s : full.samples) {
                if (s.t_s > 600.0) break;
                sub.trace.samples.push_back(s);
            }
            sub.fit = fit_power(sub.trace);
            RelaxSubTrace rec30 = recover_trace(sub, GridSpec{1800.0, 1.0});
            double ss = 0;
            std::size_t n = 0;
            for (std::size_t k = 601; k < rec30.trace.samples.size(); ++k) {
                double dv = rec30.trace.samples[k].v - full.samples[k].v;
                ss += dv * dv;
                ++n;
            }
            worst_rms = std::max(worst_rms, std::sqrt(ss / static_cast<double>(n)));
        }
        bool ok = worst_rms < 0.002;
        line(8, "sub-trace recovery fidelity", ok,
             fmt("worst RMS over %zu cycles = %.2f mV", f.campaign.records.size(), 1e3 * worst_rms));
    });

    criterion(9, "fingerprint beats single-feature baselines", [&] {
        BaselineModel casals = casals_fit(f.train);
        BaselineModel bond = bonds_fit(f.train);
        BaselineModel vbash = vbash_fit(f.train);

        // Phone-grade logging noise; the quality gate is opened up accordingly
        // (the long noisy rests fit with r-squared near 0.85).
        double fp = 0, ca = 0, bo = 0, vb = 0;
        const int n = 10;
        for (int i = 0; i < n; ++i) {
            double soh = 0.98 - 0.02 * i;
            SimBatteryConfig cfg = f.config;
            cfg.noise.sigma_v = 1.5e-3;
            SimulatedSession s =
                simulate_overnight_session(cfg, soh, false, 8.0, static_cast<std::uint32_t>(i));
            ChargeSessionLog log = session_log(s, cfg);
            SegmentationConfig seg = session_seg(cfg, 0.80);
            fp += std::abs(estimate_session(f.model, log, seg).raw - soh);
            ca += std::abs(baseline_estimate_session(casals, log, seg).soh - soh);
            bo += std::abs(baseline_estimate_session(bond, log, seg).soh - soh);
            vb += std::abs(baseline_estimate_session(vbash, log, seg).soh - soh);
        }
        fp /= n, ca /= n, bo /= n, vb /= n;

        SimBatteryConfig noisy = f.config;
        noisy.noise.sigma_v = 6e-3;
        noisy.seed = 77;
        noisy.initial_soh = 0.85;
        SimCampaign high_noise = simulate_campaign(noisy, 40);
        std::size_t ca_oor = 0, bo_oor = 0;
        for (const auto& rec : high_noise.records) {
            if (baseline_predict(casals, rec.relax_trace).out_of_range) ++ca_oor;
            if (baseline_predict(bond, rec.relax_trace).out_of_range) ++bo_oor;
        }
        bool ok = fp < ca && fp < bo && fp < vb && ca_oor >= 1 && bo_oor >= 1;
        line(9, "fingerprint beats single-feature baselines", ok,
             fmt("mean err fp=%.4f vs casals=%.4f bond=%.4f vbash=%.4f; oor %zu/%zu of 40", fp, ca,
                 bo, vb, ca_oor, bo_oor));
    });

    criterion(10, "history smoothing variance reduction", [&] {
        std::mt19937 rng(11);
        std::normal_distribution<double> noise(0.0, 0.01);
        std::vector<SohEstimate> hist;
        std::vector<double> truth;
        for (int i = 0; i < 40; ++i) {
            truth.push_back(0.98 - 0.08 * i / 39.0);
            SohEstimate e;
            e.session_id = fmt("s%d", i);
            e.timestamp = i;
            e.raw = e.smoothed = truth.back() + noise(rng);
            hist.push_back(e);
        }
        std::vector<SohEstimate> smoothed = smooth_history(hist, 10);
        double var_raw = 0, var_sm = 0;
        for (int i = 0; i < 40; ++i) {
            var_raw += (hist[i].raw - truth[i]) * (hist[i].raw - truth[i]);
            var_sm += (smoothed[i].smoothed - truth[i]) * (smoothed[i].smoothed - truth[i]);
        }
        std::vector<SohEstimate> tiny = smooth_history({hist[0], hist[1]}, 10);
        bool pass_through = tiny[0].smoothed == hist[0].raw && tiny[1].smoothed == hist[1].raw;
        bool ok = var_sm < var_raw && pass_through;
        line(10, "history smoothing variance reduction", ok,
             fmt("variance ratio=%.2f, short history passes raw through=%s", var_sm / var_raw,
                 pass_through ? "yes" : "no"));
    });

    criterion(11, "dataset extension below the measured floor", [&] {
        SimBatteryConfig cfg = f.config;
        cfg.seed = 12;
        cfg.initial_soh = 0.95;
        CycleDataset measured = preprocess(simulate_campaign(cfg, 210), cfg.spec);
        double floor_soh = 1.0;
        for (const auto& r : measured.records) floor_soh = std::min(floor_soh, r.soh);
        double target = floor_soh - 0.15;
        ExtendResult ext = extend_dataset(measured, target - 0.005, floor_soh);
        FingerprintConfig fc;
        fc.uses_dropped_voltage = false;
        fc.min_leaf = 2;
        FingerprintModel extended = train_map(ext.dataset, fc);

        SimBatteryConfig aged = cfg;
        aged.seed = 13;
        aged.initial_soh = target;
        SimCampaign probe = simulate_campaign(aged, 5);
        double worst = 0;
        for (std::size_t i = 0; i < probe.records.size(); ++i)
            worst = std::max(worst,
                             std::abs(predict_trace(extended, probe.records[i].relax_trace) -
                                      probe.true_soh[i]));
        bool ok = worst < 0.03;
        line(11, "dataset extension below the measured floor", ok,
             fmt("floor=%.3f target=%.3f synthesized=%zu worst err=%.4f", floor_soh, target,
                 ext.dataset.records.size() - measured.records.size(), worst));
    });

    criterion(12, "abnormal-drop detection", [&] {
        std::mt19937 rng(13);
        std::normal_distribution<double> noise(0.0, 0.003);
        std::vector<SohEstimate> gentle, stepped;
        for (int i = 0; i < 30; ++i) {
            SohEstimate e;
            e.timestamp = i;
            e.raw = e.smoothed = 0.95 - 0.001 * i + noise(rng);
            gentle.push_back(e);
            if (i >= 15) e.raw = e.smoothed = e.smoothed - 0.05; // loose connector from here on
            stepped.push_back(e);
        }
        std::vector<std::size_t> quiet_flags = detect_abnormal_drop(gentle);
        std::vector<std::size_t> step_flags = detect_abnormal_drop(stepped);
        bool ok = quiet_flags.empty() && step_flags.size() == 1 && step_flags[0] == 15;
        line(12, "abnormal-drop detection", ok,
             fmt("gentle flags=%zu, 5%% step flags=%zu at %s", quiet_flags.size(), step_flags.size(),
                 step_flags.empty() ? "-" : fmt("%zu", step_flags[0]).c_str()));
    });

    criterion(13, "internal resistance from the 1 s drop", [&] {
        // A single 1 s reading carries ~10% sensor noise, so the estimate is
        // taken as the mean over five fresh-cell sessions.
        double sum = 0;
        for (int i = 0; i < 5; ++i) {
            SimulatedSession s = simulate_overnight_session(f.config, 1.0, false, 8.0,
                                                            static_cast<std::uint32_t>(100 + i));
            ChargeSessionLog log = session_log(s, f.config);
            SegmentationResult sr = segment_subtraces(log, session_seg(f.config));
            const RelaxSubTrace& sub = sr.subtraces.at(0);
            double i_before = std::abs(*log.trace.samples[sub.start_index - 1].i_ma);
            sum += estimate_resistance(sub, i_before).r_mohm;
        }
        double mean_r = sum / 5.0;
        double rel = std::abs(mean_r - 68.0) / 68.0;
        bool ok = rel <= 0.15;
        line(13, "internal resistance from the 1 s drop", ok,
             fmt("mean of 5 sessions = %.1f mOhm vs 68 configured (%.1f%% off)", mean_r, 100 * rel));
    });

    criterion(14, "CLI determinism", [&] {
        fs::path dir = fs::temp_directory_path() / fmt("relaxsoh_accept_%d", getpid());
        fs::create_directories(dir);
        const std::string cli = RELAXSOH_CLI_PATH;
        auto in_dir = [&](const std::string& cmd) { return shell("cd " + dir.string() + " && " + cmd); };
        int rc = 0;
        rc |= in_dir(cli + " simulate --preset galaxy-s3 --cycles 8 --seed 5 -o A1 > /dev/null 2>&1");
        rc |= in_dir(cli + " simulate --preset galaxy-s3 --cycles 8 --seed 5 -o A2 > /dev/null 2>&1");
        int sim_same = in_dir("diff -r A1 A2 > /dev/null 2>&1");
        rc |= in_dir(cli + " train -i A1 -o m1.json --min-leaf 2 --raw-voltage > /dev/null 2>&1");
        rc |= in_dir(cli + " train -i A1 -o m2.json --min-leaf 2 --raw-voltage > /dev/null 2>&1");
        int train_same = in_dir("cmp -s m1.json m2.json");
        rc |= in_dir(cli +
                     " simulate --preset galaxy-s3 --session --soh 0.98 --hours 4 --seed 3 -o s1"
                     " > /dev/null 2>&1");
        rc |= in_dir(cli + " estimate -m m1.json -s s1/session.csv --i-cutoff-ma 110 > e1.txt 2>&1");
        rc |= in_dir(cli + " estimate -m m1.json -s s1/session.csv --i-cutoff-ma 110 > e2.txt 2>&1");
        int est_same = in_dir("cmp -s e1.txt e2.txt");
        fs::remove_all(dir);
        bool ok = rc == 0 && sim_same == 0 && train_same == 0 && est_same == 0;
        line(14, "CLI determinism", ok,
             fmt("runs ok=%s, identical bytes: campaign=%s model=%s estimate=%s", rc == 0 ? "yes" : "no",
                 sim_same == 0 ? "yes" : "no", train_same == 0 ? "yes" : "no",
                 est_same == 0 ? "yes" : "no"));
    });

    std::printf("%d/14 criteria passed\n", 14 - g_failed);
    return g_failed;
}
