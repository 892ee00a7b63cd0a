#include "relaxsoh/storage.hpp"

#include "relaxsoh/errors.hpp"
#include "relaxsoh/trace.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace relaxsoh {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json require_object(const std::string& text, const char* what) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
    return doc;
}

void check_schema(const json& doc, const char* kind) {
    if (!doc.contains("schema") || !doc["schema"].is_number_integer())
        throw ParseError(std::string(kind) + ": missing schema version");
    int version = doc["schema"].get<int>();
    if (version != kSchemaVersion)
        throw ParseError(std::string(kind) + ": unsupported schema version " +
                         std::to_string(version));
    if (doc.value("kind", std::string{}) != kind)
        throw ParseError(std::string(kind) + ": document kind mismatch");
}

json profile_to_json(const ChargeProfile& p) {
    return json{{"i_cc_ma", p.i_cc_ma},
                {"v_full", p.v_full},
                {"i_cutoff_ma", p.i_cutoff_ma},
                {"v_discharge_cutoff", p.v_discharge_cutoff},
                {"rest_minutes", p.rest_minutes}};
}

ChargeProfile profile_from_json(const json& j) {
    ChargeProfile p;
    p.i_cc_ma = j.at("i_cc_ma").get<double>();
    p.v_full = j.at("v_full").get<double>();
    p.i_cutoff_ma = j.at("i_cutoff_ma").get<double>();
    p.v_discharge_cutoff = j.at("v_discharge_cutoff").get<double>();
    p.rest_minutes = j.at("rest_minutes").get<double>();
    return p;
}

json tree_node_to_json(const RegressionTree& tree, int index) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    if (node.feature < 0) return json{{"value", node.value}};
    // Internal nodes keep their subset mean too; predictions only read leaf
    // values but the round-trip must be lossless.
    return json{{"feature", node.feature},
                {"threshold", node.threshold},
                {"value", node.value},
                {"left", tree_node_to_json(tree, node.left)},
                {"right", tree_node_to_json(tree, node.right)}};
}

// Rebuilds the node array in preorder, matching the order tree_train emits.
int tree_node_from_json(const json& j, RegressionTree& tree) {
    int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(index)].value = j.at("value").get<double>();
    if (j.contains("feature")) {
        tree.nodes[static_cast<std::size_t>(index)].feature = j.at("feature").get<int>();
        tree.nodes[static_cast<std::size_t>(index)].threshold =
            j.at("threshold").get<double>();
        int left = tree_node_from_json(j.at("left"), tree);
        int right = tree_node_from_json(j.at("right"), tree);
        tree.nodes[static_cast<std::size_t>(index)].left = left;
        tree.nodes[static_cast<std::size_t>(index)].right = right;
    }
    return index;
}

std::string cycle_file_name(std::size_t position) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "cycle_%05zu.csv", position);
    return buf;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out << content;
        if (!out) throw ValidationError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string model_to_json(const FingerprintModel& model) {
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["kind"] = "fingerprint_model";
    doc["model_name"] = model.model_name;
    doc["soh_step"] = model.soh_step;
    doc["uses_dropped_voltage"] = model.uses_dropped_voltage;
    doc["grid"] = json{{"duration_s", model.grid.duration_s}, {"interval_s", model.grid.interval_s}};
    doc["pca"] = json{{"mean", model.pca.mean},
                      {"components", model.pca.components},
                      {"explained_variance", model.pca.explained_variance},
                      {"variance_retained", model.pca.variance_retained}};
    json tree;
    tree["min_leaf"] = model.tree.min_leaf;
    tree["max_depth"] = model.tree.max_depth;
    if (!model.tree.nodes.empty()) tree["root"] = tree_node_to_json(model.tree, 0);
    doc["tree"] = tree;
    return doc.dump(2) + "\n";
}

FingerprintModel model_from_json(const std::string& text) {
    json doc = require_object(text, "fingerprint_model");
    check_schema(doc, "fingerprint_model");
    FingerprintModel model;
    try {
        model.model_name = doc.at("model_name").get<std::string>();
        model.soh_step = doc.at("soh_step").get<double>();
        model.uses_dropped_voltage = doc.at("uses_dropped_voltage").get<bool>();
        model.grid.duration_s = doc.at("grid").at("duration_s").get<double>();
        model.grid.interval_s = doc.at("grid").at("interval_s").get<double>();
        const json& pca = doc.at("pca");
        model.pca.mean = pca.at("mean").get<std::vector<double>>();
        model.pca.components = pca.at("components").get<std::vector<std::vector<double>>>();
        model.pca.explained_variance = pca.at("explained_variance").get<std::vector<double>>();
        model.pca.variance_retained = pca.at("variance_retained").get<double>();
        const json& tree = doc.at("tree");
        model.tree.min_leaf = tree.at("min_leaf").get<int>();
        model.tree.max_depth = tree.at("max_depth").get<int>();
        if (tree.contains("root")) tree_node_from_json(tree.at("root"), model.tree);
    } catch (const json::exception& e) {
        throw ParseError(std::string("fingerprint_model: ") + e.what());
    }
    return model;
}

void save_model(const std::filesystem::path& path, const FingerprintModel& model) {
    write_file_atomic(path, model_to_json(model));
}

FingerprintModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_file(path));
}

void save_dataset(const std::filesystem::path& dir, const CycleDataset& ds) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["schema"] = kSchemaVersion;
    manifest["kind"] = "cycle_dataset";
    manifest["spec"] = json{{"design_capacity_mah", ds.spec.design_capacity_mah},
                            {"model_name", ds.spec.model_name}};
    json records = json::array();
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const CycleRecord& r = ds.records[i];
        std::string name = cycle_file_name(i);
        write_file_atomic(dir / name, serialize_trace(r.relax_trace));
        records.push_back(json{{"cycle_index", r.cycle_index},
                               {"soh", r.soh},
                               {"synthetic", r.synthetic},
                               {"profile", profile_to_json(r.profile)},
                               {"trace_csv", name}});
    }
    manifest["records"] = records;
    write_file_atomic(dir / "dataset.json", manifest.dump(2) + "\n");
}

CycleDataset load_dataset(const std::filesystem::path& dir) {
    json manifest = require_object(read_file(dir / "dataset.json"), "cycle_dataset");
    check_schema(manifest, "cycle_dataset");
    CycleDataset ds;
    try {
        ds.spec.design_capacity_mah = manifest.at("spec").at("design_capacity_mah").get<double>();
        ds.spec.model_name = manifest.at("spec").at("model_name").get<std::string>();
        for (const json& j : manifest.at("records")) {
            CycleRecord r;
            r.cycle_index = j.at("cycle_index").get<std::uint32_t>();
            r.soh = j.at("soh").get<double>();
            r.synthetic = j.at("synthetic").get<bool>();
            r.profile = profile_from_json(j.at("profile"));
            r.relax_trace = parse_trace(read_file(dir / j.at("trace_csv").get<std::string>()));
            ds.records.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("cycle_dataset: ") + e.what());
    }
    return ds;
}

void save_campaign_truth(const std::filesystem::path& dir, const SimCampaign& campaign) {
    std::filesystem::create_directories(dir);
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["kind"] = "campaign_truth";
    doc["true_soh"] = campaign.true_soh;
    json injected = json::array();
    for (const OutlierInjection& inj : campaign.injected)
        injected.push_back(json{{"cycle_index", inj.cycle_index}, {"kind", inj.kind}});
    doc["injected"] = injected;
    write_file_atomic(dir / "truth.json", doc.dump(2) + "\n");
}

void save_session(const std::filesystem::path& csv_path,
                  const std::filesystem::path& truth_path, const SimulatedSession& session) {
    write_file_atomic(csv_path, serialize_trace(session.log));
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["kind"] = "session_truth";
    doc["true_soh"] = session.truth.true_soh;
    doc["full_charge_index"] = session.truth.full_charge_index;
    doc["trickle_trigger_indices"] = session.truth.trickle_trigger_indices;
    doc["relax_start_indices"] = session.truth.relax_start_indices;
    write_file_atomic(truth_path, doc.dump(2) + "\n");
}

std::string estimate_to_json(const SohEstimate& estimate) {
    json doc{{"session_id", estimate.session_id}, {"raw", estimate.raw},
             {"smoothed", estimate.smoothed},    {"n_subtraces", estimate.n_subtraces},
             {"timestamp", estimate.timestamp},  {"clamped", estimate.clamped}};
    return doc.dump();
}

SohEstimate estimate_from_json(const std::string& line) {
    json doc = require_object(line, "soh_estimate");
    SohEstimate e;
    try {
        e.session_id = doc.at("session_id").get<std::string>();
        e.raw = doc.at("raw").get<double>();
        e.smoothed = doc.at("smoothed").get<double>();
        e.n_subtraces = doc.at("n_subtraces").get<std::size_t>();
        e.timestamp = doc.at("timestamp").get<std::int64_t>();
        e.clamped = doc.at("clamped").get<bool>();
    } catch (const json::exception& ex) {
        throw ParseError(std::string("soh_estimate: ") + ex.what());
    }
    return e;
}

void append_history(const std::filesystem::path& path, const SohEstimate& estimate) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw ValidationError("cannot append to " + path.string());
    out << estimate_to_json(estimate) << "\n";
    if (!out) throw ValidationError("append failed for " + path.string());
}

std::vector<SohEstimate> load_history(const std::filesystem::path& path) {
    std::vector<SohEstimate> history;
    std::ifstream in(path, std::ios::binary);
    if (!in) return history;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            history.push_back(estimate_from_json(line));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return history;
}

std::string filter_report_to_json(const FilterReport& report) {
    json removed = json::array();
    for (const auto& [cycle, reason] : report.removed)
        removed.push_back(json{{"cycle_index", cycle}, {"reason", reason}});
    return json{{"removed", removed}}.dump();
}

std::string power_fit_to_json(const PowerFit& fit) {
    return json{{"a", fit.a},
                {"b", fit.b},
                {"c", fit.c},
                {"rmse", fit.rmse},
                {"r_squared", fit.r_squared}}
        .dump();
}

}  // namespace relaxsoh
