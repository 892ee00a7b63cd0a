#pragma once

#include "relaxsoh/preprocessing.hpp"
#include "relaxsoh/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace relaxsoh {

// Principal-component model: mean vector plus orthonormal components, kept up
// to the configured explained-variance target.
struct PcaModel {
    std::vector<double> mean;                     // d
    std::vector<std::vector<double>> components;  // k rows of d
    std::vector<double> explained_variance;       // k, non-increasing
    double variance_retained = 1.0;
};

// Fit on n x d rows: mean-centers, eigendecomposes (Gram route when n <= d),
// keeps the smallest k with cumulative variance >= variance_target. Each
// component's largest-magnitude entry is made positive so models serialize
// deterministically. Zero-variance data yields k=0, variance_retained=1.
PcaModel pca_fit(const std::vector<std::vector<double>>& rows, double variance_target = 0.99);

// (vector - mean) projected onto each component.
std::vector<double> pca_project(const PcaModel& model, const std::vector<double>& vec);

// Binary regression tree stored as an index-linked node array (root at 0).
// Leaves have feature = -1 and carry the mean label of their region.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};
struct RegressionTree {
    std::vector<TreeNode> nodes;
    int min_leaf = 5;
    int max_depth = 20;
};

// CART-style training: each split maximizes the decrease in sum of squared
// errors over candidate thresholds (midpoints between distinct sorted feature
// values), requiring min_leaf rows per child; ties prefer the lower feature
// index, then the lower threshold. No pruning.
RegressionTree tree_train(const std::vector<std::vector<double>>& features,
                          const std::vector<double>& labels, int min_leaf = 5,
                          int max_depth = 20);

// Leaf mean for the feature vector, rounded to step (half away from zero).
double tree_predict(const RegressionTree& tree, const std::vector<double>& feature,
                    double step = 0.001);

// Options for building a fingerprint model.
struct FingerprintConfig {
    GridSpec grid;
    bool uses_dropped_voltage = true;
    double variance_target = 0.99;
    int min_leaf = 5;
    int max_depth = 20;
    double soh_step = 0.001;
};

// The trained voltage-to-SoH map.
struct FingerprintModel {
    PcaModel pca;
    RegressionTree tree;
    GridSpec grid;
    bool uses_dropped_voltage = true;
    std::string model_name;
    double soh_step = 0.001;
};

// Resamples a relaxation trace onto the model grid and converts to the
// feature-space vector (drop relative to the trace's own first grid sample
// when uses_dropped_voltage is set, raw volts otherwise).
std::vector<double> grid_vector(const VoltageTrace& trace, const GridSpec& grid,
                                bool uses_dropped_voltage);

// Full training pipeline over an already filtered/smoothed dataset:
// grid vectors -> pca_fit -> tree_train.
FingerprintModel train_map(const CycleDataset& ds, const FingerprintConfig& config = {});

// Predict one relaxation trace with a trained model.
double predict_trace(const FingerprintModel& model, const VoltageTrace& trace);

// Binned-category evaluation: true and predicted SoH fall into bin_width-wide
// categories; accuracy is the diagonal fraction.
struct ConfusionResult {
    std::vector<std::vector<std::size_t>> matrix; // [true_bin][pred_bin]
    double accuracy = 0.0;
    double bin_width = 0.04;
};
ConfusionResult evaluate_confusion(const FingerprintModel& model, const CycleDataset& holdout,
                                   double bin_width = 0.04);

// Pearson correlation over dimension pairs of n x d rows: the fraction of
// defined pairs with |rho| > 0.8. Zero-variance dimensions are excluded.
struct CorrelationSummary {
    double fraction_above = 0.0;
    std::size_t pairs_defined = 0;
    std::size_t dims_excluded = 0;
    std::vector<std::vector<double>> matrix; // filled only when requested
};
CorrelationSummary dimension_correlation(const std::vector<std::vector<double>>& rows,
                                         double rho_threshold = 0.8,
                                         bool include_matrix = false);

// Dynamic time warping with steps {(1,0),(0,1),(1,1)} and |a_i - b_j| local
// cost; returns the minimal cost and one optimal index path (ties prefer the
// diagonal step).
struct DtwResult {
    double cost = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> path;
};
DtwResult dtw_distance(const std::vector<double>& seq_a, const std::vector<double>& seq_b);

// Dataset extension along the drop-vs-SoH linearity: fits drop(t) = alpha(t) *
// SoH + beta(t) at every grid time, then synthesizes traces for SoH values in
// [soh_lo, soh_hi) at soh_step that fall outside the measured label range.
// Synthesized records are flagged synthetic; values inside the measured range
// are skipped and reported.
struct ExtendResult {
    CycleDataset dataset;            // original + synthetic records
    std::vector<double> skipped_soh; // requested values already covered
    std::vector<double> per_time_rmse;
};
ExtendResult extend_dataset(const CycleDataset& ds, double soh_lo, double soh_hi,
                            double soh_step = 0.001, const GridSpec& grid = {});

} // namespace relaxsoh
