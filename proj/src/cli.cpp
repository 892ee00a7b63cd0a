#include "relaxsoh/cli.hpp"

#include "relaxsoh/baselines.hpp"
#include "relaxsoh/charge_session.hpp"
#include "relaxsoh/errors.hpp"
#include "relaxsoh/estimator.hpp"
#include "relaxsoh/fingerprint.hpp"
#include "relaxsoh/fitting.hpp"
#include "relaxsoh/preprocessing.hpp"
#include "relaxsoh/simulator.hpp"
#include "relaxsoh/storage.hpp"
#include "relaxsoh/trace.hpp"
#include "relaxsoh/usecases.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace relaxsoh {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Shortest decimal text that round-trips the double (same policy the JSON
// writers use), so CSV outputs stay byte-stable across runs.
std::string num_str(double v) { return json(v).dump(); }

ChargeSessionLog make_log(const std::string& path, double v_full, const std::string& battery) {
    ChargeSessionLog log;
    log.trace = parse_trace(read_file(path));
    log.full_charge_voltage = v_full;
    log.model_name = battery;
    return log;
}

// Segmentation knobs shared by every subcommand that reads a session log.
struct SegOpts {
    double v_full = 4.2;
    std::string battery = "unknown";
    double spike_mv = 5.0;
    double alpha = 0.3;
    double r2_threshold = 0.95;
    std::size_t min_keep = 10;
    double hold_s = 60.0;
    double i_cutoff_ma = -1.0; // negative: voltage-only full-charge detection

    SegmentationConfig config() const {
        SegmentationConfig c;
        c.spike_threshold_mv = spike_mv;
        c.alpha = alpha;
        c.r2_threshold = r2_threshold;
        c.min_keep_samples = min_keep;
        c.hold_s = hold_s;
        if (i_cutoff_ma >= 0.0) c.i_cutoff_ma = i_cutoff_ma;
        return c;
    }
};

void add_seg_flags(CLI::App* cmd, SegOpts& o) {
    cmd->add_option("--v-full", o.v_full, "Nominal full-charge voltage [V]")
        ->capture_default_str();
    cmd->add_option("--battery", o.battery, "Battery model name recorded with the log")
        ->capture_default_str();
    cmd->add_option("--spike-mv", o.spike_mv, "Filtered voltage jump marking a recharge [mV]")
        ->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "Low-pass coefficient for the delta signal")
        ->capture_default_str();
    cmd->add_option("--r2-threshold", o.r2_threshold, "Minimum power-fit R^2 to keep a segment")
        ->capture_default_str();
    cmd->add_option("--min-keep", o.min_keep, "Minimum samples for a usable segment")
        ->capture_default_str();
    cmd->add_option("--hold-s", o.hold_s, "Seconds the voltage must hold near full [s]")
        ->capture_default_str();
    cmd->add_option("--i-cutoff-ma", o.i_cutoff_ma,
                    "CV cutoff current for full-charge detection [mA]; negative: voltage-only")
        ->capture_default_str();
}

json goodness_json(const Goodness& g) {
    return json{{"rmse", g.rmse}, {"r_squared", g.r_squared}};
}

std::string baseline_model_to_json(const BaselineModel& m) {
    json j{{"schema", 1},
           {"kind", "baseline_model"},
           {"baseline", m.kind},
           {"coefficients", m.coefficients},
           {"fit_quality", goodness_json(m.fit_quality)}};
    return j.dump(2) + "\n";
}

BaselineModel baseline_model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("baseline model JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("schema") || !j.contains("kind"))
        throw ParseError("baseline model JSON: missing schema/kind");
    if (j["schema"] != 1) throw ParseError("baseline model JSON: unsupported schema version");
    if (j["kind"] != "baseline_model") throw ParseError("baseline model JSON: wrong kind");
    BaselineModel m;
    try {
        m.kind = j.at("baseline").get<std::string>();
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        m.fit_quality.rmse = j.at("fit_quality").at("rmse").get<double>();
        m.fit_quality.r_squared = j.at("fit_quality").at("r_squared").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("baseline model JSON: ") + e.what());
    }
    return m;
}

// --config support: pull `--config FILE` out of the token list, read the JSON
// object, and splice its entries back in as `--flag=value` tokens right after
// the subcommand path. Explicit command-line flags come later in the list and
// win because every option takes the last occurrence. The file is either a
// flat object of long-flag names, or nests such objects under subcommand
// names (`{"train": {"min-leaf": 2}}`).
std::string config_value_token(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_array()) {
        std::string joined;
        for (const auto& item : v) {
            if (!joined.empty()) joined += ",";
            joined += item.is_string() ? item.get<std::string>() : item.dump();
        }
        return joined;
    }
    return v.dump();
}

std::vector<std::string> expand_config_tokens(const std::vector<std::string>& args) {
    std::optional<std::string> cfg_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ValidationError("--config requires a file path");
            cfg_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            cfg_path = args[i].substr(std::string("--config=").size());
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!cfg_path) return rest;

    json root;
    try {
        root = json::parse(read_file(*cfg_path));
    } catch (const json::exception& e) {
        throw ParseError(std::string("config file: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("config file: top level must be a JSON object");

    // Leading non-dash tokens name the subcommand (possibly nested).
    std::size_t n_subs = 0;
    while (n_subs < rest.size() && !rest[n_subs].empty() && rest[n_subs][0] != '-') ++n_subs;

    json section = root;
    for (std::size_t k = 0; k < n_subs; ++k) {
        if (section.contains(rest[k]) && section[rest[k]].is_object())
            section = section[rest[k]];
        else
            break;
    }

    std::vector<std::string> injected;
    for (const auto& [key, val] : section.items()) {
        if (val.is_object()) continue; // a section for some other subcommand
        injected.push_back("--" + key + "=" + config_value_token(val));
    }

    std::vector<std::string> out(rest.begin(), rest.begin() + static_cast<long>(n_subs));
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), rest.begin() + static_cast<long>(n_subs), rest.end());
    return out;
}

json fit_json(const PowerFit& fit) { return json::parse(power_fit_to_json(fit)); }

json report_json(const FilterReport& report) { return json::parse(filter_report_to_json(report)); }

} // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"Battery state-of-health estimation from relaxing-voltage fingerprints"};
    app.name("relaxsoh-cli");
    app.require_subcommand(1);
    // Last occurrence of a flag wins, so --config injections can be overridden
    // by explicit flags.
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    json summary;

    // ---------------------------------------------------------------- simulate
    auto* sim = app.add_subcommand(
        "simulate", "Generate a synthetic cycling campaign or one overnight charge session");
    struct {
        std::string preset_name = "galaxy-s3";
        std::string out;
        std::uint32_t cycles = 100;
        std::uint64_t seed = 1;
        double initial_soh = 1.0;
        double fade = 0.001;
        double sigma_mv = 0.5;
        double outlier_prob = 0.0;
        bool list_presets = false;
        bool session = false;
        bool trickle = false;
        double soh = 1.0;
        double hours = 8.0;
        std::uint32_t session_index = 0;
    } so;
    sim->add_option("--preset", so.preset_name, "Battery preset name")->capture_default_str();
    sim->add_flag("--list-presets", so.list_presets, "Print the available preset names and exit");
    sim->add_option("-o,--out", so.out, "Output directory");
    sim->add_option("--cycles", so.cycles, "Number of charge/discharge cycles")
        ->capture_default_str();
    sim->add_option("--seed", so.seed, "Random seed")->capture_default_str();
    sim->add_option("--initial-soh", so.initial_soh, "State of health at the first cycle")
        ->capture_default_str();
    sim->add_option("--fade", so.fade, "Capacity fade per cycle (fraction of design capacity)");
    sim->add_option("--sigma-mv", so.sigma_mv, "Voltage noise standard deviation [mV]");
    sim->add_option("--outlier-prob", so.outlier_prob,
                    "Per-cycle probability of an injected outlier")
        ->capture_default_str();
    sim->add_flag("--session,!--campaign", so.session,
                  "Simulate one overnight charge session instead of a campaign");
    sim->add_flag("--trickle,!--no-trickle", so.trickle,
                  "Enable trickle recharges in session mode (default: preset setting)");
    sim->add_option("--soh", so.soh, "True state of health for session mode")
        ->capture_default_str();
    sim->add_option("--hours", so.hours, "Session duration [h]")->capture_default_str();
    sim->add_option("--session-index", so.session_index,
                    "Selects an independent noise stream for repeated sessions")
        ->capture_default_str();
    sim->callback([&] {
        if (so.list_presets) {
            summary = json{{"command", "simulate"}, {"presets", preset_names()}};
            return;
        }
        if (so.out.empty()) throw ValidationError("simulate requires -o/--out");
        SimBatteryConfig cfg = preset(so.preset_name);
        cfg.seed = so.seed;
        cfg.initial_soh = so.initial_soh;
        if (sim->count("--fade")) cfg.fade_per_cycle = so.fade;
        if (sim->count("--sigma-mv")) cfg.noise.sigma_v = so.sigma_mv * 1e-3;
        if (sim->count("--trickle")) {
            if (so.trickle && !cfg.trickle)
                throw ValidationError("preset '" + so.preset_name +
                                      "' has no trickle configuration");
            if (!so.trickle) cfg.trickle.reset();
        }
        fs::path out_dir(so.out);
        if (so.session) {
            bool with_trickle = sim->count("--trickle") ? so.trickle : cfg.trickle.has_value();
            SimulatedSession s =
                simulate_overnight_session(cfg, so.soh, with_trickle, so.hours, so.session_index);
            fs::create_directories(out_dir);
            save_session(out_dir / "session.csv", out_dir / "session_truth.json", s);
            summary = json{{"command", "simulate"},
                           {"mode", "session"},
                           {"preset", so.preset_name},
                           {"out", so.out},
                           {"samples", s.log.samples.size()},
                           {"true_soh", s.truth.true_soh},
                           {"trickle_events", s.truth.trickle_trigger_indices.size()},
                           {"hours", so.hours}};
        } else {
            SimCampaign c = simulate_campaign(cfg, so.cycles, so.outlier_prob);
            CycleDataset ds;
            ds.records = c.records;
            ds.spec = cfg.spec;
            save_dataset(out_dir, ds);
            save_campaign_truth(out_dir, c);
            summary = json{{"command", "simulate"},
                           {"mode", "campaign"},
                           {"preset", so.preset_name},
                           {"out", so.out},
                           {"cycles", c.records.size()},
                           {"outliers_injected", c.injected.size()},
                           {"soh_first", c.true_soh.empty() ? 0.0 : c.true_soh.front()},
                           {"soh_last", c.true_soh.empty() ? 0.0 : c.true_soh.back()}};
        }
    });

    // -------------------------------------------------------------- preprocess
    auto* pre = app.add_subcommand(
        "preprocess", "Filter outlier cycles and smooth a dataset for training");
    struct {
        std::string in, out, report;
        double max_soh_dev = 0.005;
        double worst_fraction = 0.05;
        int window = 5;
    } po;
    pre->add_option("-i,--in", po.in, "Input dataset directory")->required();
    pre->add_option("-o,--out", po.out, "Output dataset directory")->required();
    pre->add_option("--report", po.report, "Write the filter report JSON to this path");
    pre->add_option("--max-soh-dev", po.max_soh_dev,
                    "Max |residual| against the linear label trend before a cycle is dropped")
        ->capture_default_str();
    pre->add_option("--worst-fraction", po.worst_fraction,
                    "Fraction of worst power-fit cycles to drop")
        ->capture_default_str();
    pre->add_option("--window", po.window, "Moving-average window (odd; 1 disables smoothing)")
        ->capture_default_str();
    pre->callback([&] {
        CycleDataset ds = load_dataset(po.in);
        FilterReport soh_report = filter_soh_outliers(ds, po.max_soh_dev);
        FilterReport trace_report = filter_trace_outliers(ds, po.worst_fraction);
        CycleDataset kept = apply_filters(ds, {soh_report, trace_report});
        CycleDataset smoothed = smooth_dataset(kept, po.window);
        save_dataset(po.out, smoothed);
        json removed{{"soh_filter", report_json(soh_report)},
                     {"trace_filter", report_json(trace_report)}};
        if (!po.report.empty()) write_file_atomic(po.report, removed.dump(2) + "\n");
        summary = json{{"command", "preprocess"},
                       {"in", po.in},
                       {"out", po.out},
                       {"records_in", ds.records.size()},
                       {"records_out", smoothed.records.size()},
                       {"removed", removed},
                       {"smooth_window", po.window}};
    });

    // ------------------------------------------------------------------- train
    auto* trn = app.add_subcommand("train", "Train the voltage-to-SoH fingerprint map");
    struct {
        std::string in, out;
        double duration = 1800.0;
        double interval = 1.0;
        double variance_target = 0.99;
        int min_leaf = 5;
        int max_depth = 20;
        double soh_step = 0.001;
        bool raw_voltage = false;
    } to;
    trn->add_option("-i,--in", to.in, "Training dataset directory")->required();
    trn->add_option("-o,--out", to.out, "Output model JSON path")->required();
    trn->add_option("--duration", to.duration, "Reference grid span [s]")->capture_default_str();
    trn->add_option("--interval", to.interval, "Reference grid step [s]")->capture_default_str();
    trn->add_option("--variance-target", to.variance_target,
                    "Cumulative explained-variance target for kept components")
        ->capture_default_str();
    trn->add_option("--min-leaf", to.min_leaf, "Minimum rows per regression-tree leaf")
        ->capture_default_str();
    trn->add_option("--max-depth", to.max_depth, "Maximum regression-tree depth")
        ->capture_default_str();
    trn->add_option("--soh-step", to.soh_step, "Prediction rounding step")->capture_default_str();
    trn->add_flag("--raw-voltage,!--dropped-voltage", to.raw_voltage,
                  "Feed raw voltages instead of first-sample drops to the model");
    trn->callback([&] {
        CycleDataset ds = load_dataset(to.in);
        FingerprintConfig fc;
        fc.grid = GridSpec{to.duration, to.interval};
        fc.uses_dropped_voltage = !to.raw_voltage;
        fc.variance_target = to.variance_target;
        fc.min_leaf = to.min_leaf;
        fc.max_depth = to.max_depth;
        fc.soh_step = to.soh_step;
        FingerprintModel model = train_map(ds, fc);
        save_model(to.out, model);
        summary = json{{"command", "train"},
                       {"in", to.in},
                       {"model", to.out},
                       {"records", ds.records.size()},
                       {"grid_samples", fc.grid.size()},
                       {"components", model.pca.components.size()},
                       {"variance_retained", model.pca.variance_retained},
                       {"tree_nodes", model.tree.nodes.size()},
                       {"uses_dropped_voltage", model.uses_dropped_voltage},
                       {"battery", model.model_name}};
    });

    // ----------------------------------------------------------------- segment
    auto* seg = app.add_subcommand(
        "segment", "Split a charge-session log into relaxation sub-traces");
    struct {
        std::string session, out;
    } go;
    SegOpts seg_opts;
    seg->add_option("-s,--session", go.session, "Session log CSV")->required();
    seg->add_option("-o,--out", go.out, "Output directory for sub-trace CSVs and manifest")
        ->required();
    add_seg_flags(seg, seg_opts);
    seg->callback([&] {
        ChargeSessionLog log = make_log(go.session, seg_opts.v_full, seg_opts.battery);
        SegmentationResult res = segment_subtraces(log, seg_opts.config());
        fs::path out_dir(go.out);
        fs::create_directories(out_dir);
        json subs = json::array();
        for (std::size_t i = 0; i < res.subtraces.size(); ++i) {
            const RelaxSubTrace& sub = res.subtraces[i];
            char name[32];
            std::snprintf(name, sizeof name, "subtrace_%03zu.csv", i);
            write_file_atomic(out_dir / name, serialize_trace(sub.trace));
            subs.push_back(json{{"file", name},
                                {"start_index", sub.start_index},
                                {"end_index", sub.end_index},
                                {"start_s", sub.start_s},
                                {"end_s", sub.end_s},
                                {"fit", fit_json(sub.fit)}});
        }
        json dropped = json::array();
        for (const DroppedSubTrace& d : res.dropped)
            dropped.push_back(json{{"start_index", d.start_index},
                                   {"end_index", d.end_index},
                                   {"reason", d.reason}});
        json manifest{{"schema", 1},
                      {"kind", "segmentation"},
                      {"session", go.session},
                      {"full_charge_index", res.full_charge_index},
                      {"subtraces", subs},
                      {"dropped", dropped}};
        write_file_atomic(out_dir / "segments.json", manifest.dump(2) + "\n");
        summary = json{{"command", "segment"},
                       {"out", go.out},
                       {"full_charge_index", res.full_charge_index},
                       {"subtraces", res.subtraces.size()},
                       {"dropped", res.dropped.size()},
                       {"manifest", "segments.json"}};
    });

    // ---------------------------------------------------------------- estimate
    auto* est = app.add_subcommand(
        "estimate", "Estimate state of health from one charge-session log");
    struct {
        std::string model, session, history, session_id;
        double min_subtrace_s = 300.0;
        std::size_t smooth_window = 10;
        std::int64_t timestamp = 0;
    } eo;
    SegOpts est_seg;
    est->add_option("-m,--model", eo.model, "Trained model JSON")->required();
    est->add_option("-s,--session", eo.session, "Session log CSV")->required();
    est->add_option("--history", eo.history,
                    "History JSON-lines file; the new estimate is appended");
    est->add_option("--session-id", eo.session_id,
                    "Identifier stored with the estimate (default: session file stem)");
    est->add_option("--timestamp", eo.timestamp,
                    "Timestamp stored with the estimate (default: previous max + 1)");
    est->add_option("--min-subtrace-s", eo.min_subtrace_s,
                    "Shortest segment usable for recovery [s]")
        ->capture_default_str();
    est->add_option("--smooth-window", eo.smooth_window,
                    "Trailing window for the history smoother")
        ->capture_default_str();
    add_seg_flags(est, est_seg);
    est->callback([&] {
        FingerprintModel model = load_model(eo.model);
        ChargeSessionLog log = make_log(eo.session, est_seg.v_full, est_seg.battery);
        std::vector<SohEstimate> history;
        if (!eo.history.empty() && fs::exists(eo.history)) history = load_history(eo.history);
        SohEstimate e = estimate_session(model, log, est_seg.config(), eo.min_subtrace_s);
        e.session_id = eo.session_id.empty() ? fs::path(eo.session).stem().string()
                                             : eo.session_id;
        if (est->count("--timestamp")) {
            e.timestamp = eo.timestamp;
        } else {
            std::int64_t max_ts = 0;
            for (const SohEstimate& h : history) max_ts = std::max(max_ts, h.timestamp);
            e.timestamp = max_ts + 1;
        }
        history.push_back(e);
        e.smoothed = smooth_history(history, eo.smooth_window).back().smoothed;
        if (!eo.history.empty()) append_history(eo.history, e);
        summary = json{{"command", "estimate"},
                       {"session_id", e.session_id},
                       {"raw", e.raw},
                       {"smoothed", e.smoothed},
                       {"n_subtraces", e.n_subtraces},
                       {"timestamp", e.timestamp},
                       {"clamped", e.clamped},
                       {"history_size", history.size()}};
        if (!eo.history.empty()) summary["history"] = eo.history;
    });

    // ---------------------------------------------------------------- baseline
    auto* bas = app.add_subcommand(
        "baseline", "Fit or apply a published single-feature estimator");
    struct {
        std::string kind = "casals";
        std::string in, out, model, session;
    } bo;
    SegOpts bas_seg;
    bas->add_option("--kind", bo.kind, "One of: casals, bond, vbash")->capture_default_str();
    bas->add_option("-i,--in", bo.in, "Dataset directory to fit on");
    bas->add_option("-o,--out", bo.out, "Where to save the fitted baseline JSON");
    bas->add_option("-m,--model", bo.model, "Previously saved baseline JSON");
    bas->add_option("-s,--session", bo.session, "Session log CSV to predict on");
    add_seg_flags(bas, bas_seg);
    bas->callback([&] {
        BaselineModel bm;
        if (!bo.in.empty()) {
            CycleDataset ds = load_dataset(bo.in);
            if (bo.kind == "casals")
                bm = casals_fit(ds);
            else if (bo.kind == "bond")
                bm = bonds_fit(ds);
            else if (bo.kind == "vbash")
                bm = vbash_fit(ds);
            else
                throw ValidationError("unknown baseline kind '" + bo.kind + "'");
            if (!bo.out.empty()) write_file_atomic(bo.out, baseline_model_to_json(bm));
        } else if (!bo.model.empty()) {
            bm = baseline_model_from_json(read_file(bo.model));
        } else {
            throw ValidationError("baseline requires either -i (fit) or -m (load)");
        }
        summary = json{{"command", "baseline"},
                       {"kind", bm.kind},
                       {"coefficients", bm.coefficients},
                       {"fit_quality", goodness_json(bm.fit_quality)}};
        if (!bo.out.empty()) summary["model"] = bo.out;
        if (!bo.session.empty()) {
            ChargeSessionLog log = make_log(bo.session, bas_seg.v_full, bas_seg.battery);
            BaselinePrediction p = baseline_estimate_session(bm, log, bas_seg.config());
            summary["soh"] = p.soh;
            summary["out_of_range"] = p.out_of_range;
            summary["anchor_recovered"] = p.anchor_recovered;
        }
    });

    // ----------------------------------------------------------------- usecase
    auto* uc = app.add_subcommand("usecase", "Battery-health utilities built on the estimator");
    uc->require_subcommand(1);

    auto* uc_soc = uc->add_subcommand("soc", "Fade-compensated state of charge");
    struct {
        double c_remaining = 0.0;
        double soh = 1.0;
        double capacity = 0.0;
        std::string battery = "unknown";
    } co;
    uc_soc->add_option("--c-remaining-mah", co.c_remaining, "Remaining charge [mAh]")->required();
    uc_soc->add_option("--soh", co.soh, "Current state of health")->required();
    uc_soc->add_option("--capacity-mah", co.capacity, "Design capacity [mAh]")->required();
    uc_soc->add_option("--battery", co.battery, "Battery model name")->capture_default_str();
    uc_soc->callback([&] {
        SocResult r = compensated_soc(co.c_remaining, co.soh,
                                      BatterySpec{co.capacity, co.battery});
        summary = json{{"command", "usecase"},
                       {"usecase", "soc"},
                       {"soc", r.soc},
                       {"clamped", r.clamped}};
    });

    auto* uc_rem = uc->add_subcommand("remaining", "Health-adjusted remaining usage time");
    struct {
        double c_nominal = 0.0;
        double soh = 1.0;
        double current = 0.0;
    } ro;
    uc_rem->add_option("--c-remaining-mah", ro.c_nominal,
                       "Remaining charge assuming a fresh battery [mAh]")
        ->required();
    uc_rem->add_option("--soh", ro.soh, "Current state of health")->required();
    uc_rem->add_option("--avg-current-ma", ro.current, "Average drain [mA]")->required();
    uc_rem->callback([&] {
        double minutes = remaining_time_minutes(ro.c_nominal, ro.soh, ro.current);
        summary = json{{"command", "usecase"}, {"usecase", "remaining"}, {"minutes", minutes}};
    });

    auto* uc_ano = uc->add_subcommand("anomaly", "Flag abnormal health drops in a history");
    struct {
        std::string history;
        double threshold = 0.02;
    } ao;
    uc_ano->add_option("--history", ao.history, "History JSON-lines file")->required();
    uc_ano->add_option("--threshold", ao.threshold, "Smoothed drop that raises a flag")
        ->capture_default_str();
    uc_ano->callback([&] {
        if (!fs::exists(ao.history))
            throw ValidationError("history file not found: " + ao.history);
        std::vector<SohEstimate> history = load_history(ao.history);
        std::vector<std::size_t> flagged = detect_abnormal_drop(history, ao.threshold);
        summary = json{{"command", "usecase"},
                       {"usecase", "anomaly"},
                       {"n_records", history.size()},
                       {"flagged", flagged},
                       {"count", flagged.size()}};
    });

    auto* uc_res = uc->add_subcommand(
        "resistance", "Internal resistance from the relaxation voltage step");
    struct {
        std::string session;
        double i_before_ma = -1.0;
        double at_relax_s = 1.0;
        std::size_t subtrace = 0;
    } zo;
    SegOpts res_seg;
    uc_res->add_option("-s,--session", zo.session, "Session log CSV")->required();
    uc_res->add_option("--i-before-ma", zo.i_before_ma,
                       "Charge current just before the rest [mA] (default: from the log)");
    uc_res->add_option("--at-relax-s", zo.at_relax_s, "Rest time at which the step is read [s]")
        ->capture_default_str();
    uc_res->add_option("--subtrace", zo.subtrace, "Index of the sub-trace to use")
        ->capture_default_str();
    add_seg_flags(uc_res, res_seg);
    uc_res->callback([&] {
        ChargeSessionLog log = make_log(zo.session, res_seg.v_full, res_seg.battery);
        SegmentationResult res = segment_subtraces(log, res_seg.config());
        if (zo.subtrace >= res.subtraces.size())
            throw ValidationError("sub-trace index " + std::to_string(zo.subtrace) +
                                  " out of range; session has " +
                                  std::to_string(res.subtraces.size()));
        const RelaxSubTrace& sub = res.subtraces[zo.subtrace];
        double i_before = zo.i_before_ma;
        if (!uc_res->count("--i-before-ma")) {
            if (sub.start_index == 0 || !log.trace.has_current())
                throw ValidationError(
                    "--i-before-ma is required when the log has no current channel");
            const auto& prev = log.trace.samples[sub.start_index - 1];
            if (!prev.i_ma)
                throw ValidationError(
                    "--i-before-ma is required when the log has no current channel");
            i_before = std::abs(*prev.i_ma);
        }
        ResistanceEstimate r = estimate_resistance(sub, i_before, zo.at_relax_s);
        summary = json{{"command", "usecase"},
                       {"usecase", "resistance"},
                       {"r_mohm", r.r_mohm},
                       {"delta_v", r.delta_v},
                       {"i_before_ma", r.i_before_ma},
                       {"at_relax_s", r.at_relax_s},
                       {"suspect", r.suspect}};
    });

    auto* uc_rank = uc->add_subcommand("rank", "Percentile of a health value in a population");
    struct {
        double value = 0.0;
        std::vector<double> population;
    } ko;
    uc_rank->add_option("--value", ko.value, "Health value to rank")->required();
    uc_rank->add_option("--population", ko.population, "Comma-separated peer health values")
        ->required()
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    uc_rank->callback([&] {
        summary = json{{"command", "usecase"},
                       {"usecase", "rank"},
                       {"percentile", percentile_rank(ko.value, ko.population)},
                       {"n_population", ko.population.size()}};
    });

    // ---------------------------------------------------------------- evaluate
    auto* ev = app.add_subcommand(
        "evaluate", "Binned confusion matrix of a model against a labeled holdout");
    struct {
        std::string model, holdout;
        double bins = 0.04;
    } vo;
    ev->add_option("-m,--model", vo.model, "Trained model JSON")->required();
    ev->add_option("--holdout", vo.holdout, "Holdout dataset directory")->required();
    ev->add_option("--bins", vo.bins, "Bin width in SoH units")->capture_default_str();
    ev->callback([&] {
        FingerprintModel model = load_model(vo.model);
        CycleDataset holdout = load_dataset(vo.holdout);
        ConfusionResult cr = evaluate_confusion(model, holdout, vo.bins);
        summary = json{{"command", "evaluate"},
                       {"accuracy", cr.accuracy},
                       {"bin_width", cr.bin_width},
                       {"n_records", holdout.records.size()},
                       {"matrix", cr.matrix}};
    });

    // ---------------------------------------------------------------- plot-data
    auto* pd = app.add_subcommand(
        "plot-data", "Flatten a history or dataset into a tidy CSV for plotting");
    struct {
        std::string history, in, out;
    } do_;
    pd->add_option("--history", do_.history, "History JSON-lines file");
    pd->add_option("-i,--in", do_.in, "Dataset directory");
    pd->add_option("-o,--out", do_.out, "Output CSV path")->required();
    pd->callback([&] {
        if (do_.history.empty() == do_.in.empty())
            throw ValidationError("plot-data requires exactly one of --history or -i");
        std::string csv;
        std::size_t rows = 0;
        json columns;
        if (!do_.history.empty()) {
            if (!fs::exists(do_.history))
                throw ValidationError("history file not found: " + do_.history);
            std::vector<SohEstimate> history = load_history(do_.history);
            csv = "index,timestamp,session_id,raw,smoothed\n";
            for (std::size_t i = 0; i < history.size(); ++i) {
                const SohEstimate& e = history[i];
                csv += std::to_string(i) + "," + std::to_string(e.timestamp) + "," +
                       e.session_id + "," + num_str(e.raw) + "," + num_str(e.smoothed) + "\n";
            }
            rows = history.size();
            columns = json::array({"index", "timestamp", "session_id", "raw", "smoothed"});
        } else {
            CycleDataset ds = load_dataset(do_.in);
            csv = "cycle_index,soh,synthetic\n";
            for (const CycleRecord& r : ds.records)
                csv += std::to_string(r.cycle_index) + "," + num_str(r.soh) + "," +
                       (r.synthetic ? "1" : "0") + "\n";
            rows = ds.records.size();
            columns = json::array({"cycle_index", "soh", "synthetic"});
        }
        write_file_atomic(do_.out, csv);
        summary = json{{"command", "plot-data"},
                       {"out", do_.out},
                       {"rows", rows},
                       {"columns", columns}};
    });

    // ------------------------------------------------------------------- parse
    try {
        std::vector<std::string> tokens = expand_config_tokens(args);
        std::reverse(tokens.begin(), tokens.end());
        app.parse(tokens);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            std::cout << app.help();
            return 0;
        }
        json err{{"error", {{"type", "usage_error"}, {"message", e.what()}}}};
        std::cout << err.dump(2) << "\n";
        return 2;
    } catch (const ParseError& e) {
        json detail{{"type", "parse_error"}, {"message", e.what()}};
        if (e.line() >= 0) detail["line"] = e.line();
        std::cout << json{{"error", detail}}.dump(2) << "\n";
        return 1;
    } catch (const NotFullyChargedError& e) {
        std::cout << json{{"error", {{"type", "not_fully_charged"}, {"message", e.what()}}}}.dump(2)
                  << "\n";
        return 1;
    } catch (const TraceTooShortError& e) {
        std::cout << json{{"error", {{"type", "trace_too_short"}, {"message", e.what()}}}}.dump(2)
                  << "\n";
        return 1;
    } catch (const NoEstimateError& e) {
        std::cout << json{{"error", {{"type", "no_estimate"}, {"message", e.what()}}}}.dump(2)
                  << "\n";
        return 1;
    } catch (const FitDivergedError& e) {
        std::cout << json{{"error", {{"type", "fit_diverged"}, {"message", e.what()}}}}.dump(2)
                  << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cout << json{{"error", {{"type", "validation_error"}, {"message", e.what()}}}}.dump(2)
                  << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cout << json{{"error", {{"type", "numeric_error"}, {"message", e.what()}}}}.dump(2)
                  << "\n";
        return 1;
    } catch (const Error& e) {
        std::cout << json{{"error", {{"type", "error"}, {"message", e.what()}}}}.dump(2) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cout << json{{"error", {{"type", "internal_error"}, {"message", e.what()}}}}.dump(2)
                  << "\n";
        return 1;
    }

    std::cout << summary.dump(2) << "\n";
    return 0;
}

} // namespace relaxsoh
