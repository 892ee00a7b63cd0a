#pragma once

#include "relaxsoh/estimator.hpp"
#include "relaxsoh/fingerprint.hpp"
#include "relaxsoh/fitting.hpp"
#include "relaxsoh/preprocessing.hpp"
#include "relaxsoh/simulator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace relaxsoh {

// Reads a whole file; throws ParseError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes content to a sibling temp file and renames it into place, so readers
// never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Fingerprint models persist as a versioned JSON document ("schema": 1) with
// the PCA arrays at full double precision and the tree as nested nodes.
// Round-trips are lossless. model_from_json throws ParseError on malformed
// documents or a schema version it does not understand.
std::string model_to_json(const FingerprintModel& model);
FingerprintModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const FingerprintModel& model);
FingerprintModel load_model(const std::filesystem::path& path);

// Datasets persist as a directory: one trace CSV per cycle plus a
// dataset.json manifest (battery spec, per-record label/profile/flags and the
// CSV file names).
void save_dataset(const std::filesystem::path& dir, const CycleDataset& ds);
CycleDataset load_dataset(const std::filesystem::path& dir);

// Simulator ground truth lives next to the dataset in truth.json: true SoH
// per cycle and the injected-outlier list. Sessions store their trace as a
// plain CSV plus a truth sidecar with the event indices.
void save_campaign_truth(const std::filesystem::path& dir, const SimCampaign& campaign);
void save_session(const std::filesystem::path& csv_path,
                  const std::filesystem::path& truth_path, const SimulatedSession& session);

// Estimate history is an append-only JSON-lines file, one SohEstimate per
// line. load_history returns an empty history for a missing file.
std::string estimate_to_json(const SohEstimate& estimate);
SohEstimate estimate_from_json(const std::string& line);
void append_history(const std::filesystem::path& path, const SohEstimate& estimate);
std::vector<SohEstimate> load_history(const std::filesystem::path& path);

// JSON fragments used by CLI summaries.
std::string filter_report_to_json(const FilterReport& report);
std::string power_fit_to_json(const PowerFit& fit);

}  // namespace relaxsoh
