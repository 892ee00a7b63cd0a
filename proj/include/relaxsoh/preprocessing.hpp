#pragma once

#include "relaxsoh/trace.hpp"

#include <map>
#include <string>
#include <vector>

namespace relaxsoh {

// A cycling dataset: labeled cycles of one battery, ordered by cycle index.
struct CycleDataset {
    std::vector<CycleRecord> records;
    BatterySpec spec;
};

// Which cycles a filter flags, and why.
struct FilterReport {
    // cycle_index -> reason ("soh_outlier" | "trace_outlier" | "paired_removal")
    std::map<std::uint32_t, std::string> removed;
};

// Flags records whose SoH label deviates from the dataset's linear
// degradation fit by more than max_dev. Needs >= 10 records.
FilterReport filter_soh_outliers(const CycleDataset& ds, double max_dev = 0.005);

// Power-fits every relaxation trace and flags the worst_fraction (ceiling
// count) lowest-r-squared traces; unfittable traces are flagged outright and
// count toward the quota. Needs >= 20 records. Note the quota semantics: on
// clean data this still removes the configured fraction.
FilterReport filter_trace_outliers(const CycleDataset& ds, double worst_fraction = 0.05);

// Removes the union of all flagged cycle indices (a flagged label removes its
// trace and vice versa). Retained records are untouched.
CycleDataset apply_filters(const CycleDataset& ds, const std::vector<FilterReport>& reports);

// Centered moving average whose window clips at the boundaries (output keeps
// the input length). Window must be odd; window 1 is the identity.
std::vector<double> moving_average(const std::vector<double>& values, int window = 5);

// Smooths SoH labels across cycles with moving_average, and smooths the
// traces pointwise across the same sliding cycle window (all traces must
// share one sample count and time base).
CycleDataset smooth_dataset(const CycleDataset& ds, int window = 5);

} // namespace relaxsoh
