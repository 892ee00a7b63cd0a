#include "relaxsoh/fingerprint.hpp"

#include "relaxsoh/errors.hpp"
#include "relaxsoh/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace relaxsoh {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ValidationError("need at least one row");
    const std::size_t d = rows.front().size();
    Eigen::MatrixXd x(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) throw ValidationError("rows must share one dimension");
        for (std::size_t j = 0; j < d; ++j) x(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    }
    return x;
}

void fix_sign(std::vector<double>& component) {
    double best = 0.0;
    for (double v : component)
        if (std::abs(v) > std::abs(best)) best = v;
    if (best < 0.0)
        for (double& v : component) v = -v;
}

} // namespace

PcaModel pca_fit(const std::vector<std::vector<double>>& rows, double variance_target) {
    if (rows.size() < 2) throw ValidationError("pca needs at least 2 rows");
    if (rows.front().empty()) throw ValidationError("pca needs at least 1 dimension");
    if (variance_target <= 0.0 || variance_target > 1.0)
        throw ValidationError("variance target must be in (0, 1]");

    Eigen::MatrixXd x = to_matrix(rows);
    const long n = x.rows(), d = x.cols();
    Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd xc = x.rowwise() - mean;

    PcaModel model;
    model.mean.assign(mean.data(), mean.data() + d);

    const double total_var = xc.squaredNorm() / static_cast<double>(n - 1);
    if (total_var <= 0.0) {
        model.variance_retained = 1.0;
        return model;
    }

    // Eigen-decompose the smaller of the covariance (d x d) and Gram (n x n)
    // matrices; both routes yield identical principal directions.
    std::vector<std::pair<double, Eigen::VectorXd>> eig; // (eigenvalue, direction in R^d)
    if (n <= d) {
        Eigen::MatrixXd gram = xc * xc.transpose() / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        for (long i = n - 1; i >= 0; --i) {
            double lambda = solver.eigenvalues()(i);
            if (lambda <= 1e-12 * total_var) continue;
            Eigen::VectorXd dir = xc.transpose() * solver.eigenvectors().col(i);
            dir.normalize();
            eig.emplace_back(lambda, std::move(dir));
        }
    } else {
        Eigen::MatrixXd cov = xc.transpose() * xc / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        for (long i = d - 1; i >= 0; --i) {
            double lambda = solver.eigenvalues()(i);
            if (lambda <= 1e-12 * total_var) continue;
            eig.emplace_back(lambda, solver.eigenvectors().col(i));
        }
    }

    double cumulative = 0.0;
    for (const auto& [lambda, dir] : eig) {
        cumulative += lambda;
        std::vector<double> comp(dir.data(), dir.data() + d);
        fix_sign(comp);
        model.components.push_back(std::move(comp));
        model.explained_variance.push_back(lambda);
        if (cumulative / total_var >= variance_target) break;
    }
    model.variance_retained = cumulative / total_var;
    return model;
}

std::vector<double> pca_project(const PcaModel& model, const std::vector<double>& vec) {
    if (vec.size() != model.mean.size())
        throw ValidationError("projection dimension mismatch: got " +
                              std::to_string(vec.size()) + ", model has " +
                              std::to_string(model.mean.size()));
    std::vector<double> out;
    out.reserve(model.components.size());
    for (const auto& comp : model.components) {
        double acc = 0.0;
        for (std::size_t j = 0; j < vec.size(); ++j)
            acc += (vec[j] - model.mean[j]) * comp[j];
        out.push_back(acc);
    }
    return out;
}

namespace {

struct TreeBuilder {
    const std::vector<std::vector<double>>& features;
    const std::vector<double>& labels;
    int min_leaf;
    int max_depth;
    std::vector<TreeNode> nodes;

    int build(std::vector<std::size_t>& idx, int depth) {
        const std::size_t n = idx.size();
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t i : idx) {
            sum += labels[i];
            sumsq += labels[i] * labels[i];
        }
        const double mean = sum / static_cast<double>(n);
        const double sse = sumsq - sum * sum / static_cast<double>(n);

        int node_id = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[node_id].value = mean;

        bool all_equal = true;
        for (std::size_t i : idx) all_equal &= (labels[i] == labels[idx.front()]);
        const std::size_t k = features.empty() ? 0 : features.front().size();
        if (all_equal || depth >= max_depth || n < 2 * static_cast<std::size_t>(min_leaf) ||
            k == 0)
            return node_id;

        int best_feature = -1;
        double best_threshold = 0.0, best_gain = 0.0;
        std::vector<std::size_t> order(idx);
        for (std::size_t f = 0; f < k; ++f) {
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return features[a][f] < features[b][f];
            });
            double lsum = 0.0, lsq = 0.0;
            for (std::size_t pos = 0; pos + 1 < n; ++pos) {
                double y = labels[order[pos]];
                lsum += y;
                lsq += y * y;
                double xl = features[order[pos]][f], xr = features[order[pos + 1]][f];
                if (!(xl < xr)) continue;
                std::size_t nl = pos + 1, nr = n - nl;
                if (nl < static_cast<std::size_t>(min_leaf) ||
                    nr < static_cast<std::size_t>(min_leaf))
                    continue;
                double rsum = sum - lsum, rsq = sumsq - lsq;
                double sse_l = lsq - lsum * lsum / static_cast<double>(nl);
                double sse_r = rsq - rsum * rsum / static_cast<double>(nr);
                double gain = sse - sse_l - sse_r;
                if (gain > best_gain) { // strict: first (lowest f, threshold) wins ties
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (xl + xr);
                }
            }
        }
        if (best_feature < 0) return node_id;

        std::vector<std::size_t> left, right;
        for (std::size_t i : idx)
            (features[i][best_feature] <= best_threshold ? left : right).push_back(i);
        nodes[node_id].feature = best_feature;
        nodes[node_id].threshold = best_threshold;
        int l = build(left, depth + 1);
        int r = build(right, depth + 1);
        nodes[node_id].left = l;
        nodes[node_id].right = r;
        return node_id;
    }
};

} // namespace

RegressionTree tree_train(const std::vector<std::vector<double>>& features,
                          const std::vector<double>& labels, int min_leaf, int max_depth) {
    if (features.size() != labels.size())
        throw ValidationError("feature/label count mismatch");
    if (labels.empty()) throw ValidationError("tree needs training rows");
    if (min_leaf < 1 || max_depth < 0) throw ValidationError("bad tree hyperparameters");
    bool all_equal = std::all_of(labels.begin(), labels.end(),
                                 [&](double y) { return y == labels.front(); });
    if (!all_equal && labels.size() < 2 * static_cast<std::size_t>(min_leaf))
        throw ValidationError("tree needs at least 2*min_leaf rows, got " +
                              std::to_string(labels.size()));

    TreeBuilder builder{features, labels, min_leaf, max_depth, {}};
    std::vector<std::size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(idx, 0);
    RegressionTree tree;
    tree.nodes = std::move(builder.nodes);
    tree.min_leaf = min_leaf;
    tree.max_depth = max_depth;
    return tree;
}

double tree_predict(const RegressionTree& tree, const std::vector<double>& feature,
                    double step) {
    if (tree.nodes.empty()) throw ValidationError("empty tree");
    if (step <= 0.0) throw ValidationError("soh step must be positive");
    int cur = 0;
    while (tree.nodes[cur].feature >= 0) {
        const TreeNode& node = tree.nodes[cur];
        if (static_cast<std::size_t>(node.feature) >= feature.size())
            throw ValidationError("feature dimension mismatch");
        cur = feature[node.feature] <= node.threshold ? node.left : node.right;
    }
    double v = tree.nodes[cur].value;
    return step * std::round(v / step);
}

std::vector<double> grid_vector(const VoltageTrace& trace, const GridSpec& grid,
                                bool uses_dropped_voltage) {
    std::vector<double> g = resample_to_grid(trace, grid);
    if (uses_dropped_voltage) {
        double v0 = g.front();
        for (double& v : g) v = v0 - v;
    }
    return g;
}

FingerprintModel train_map(const CycleDataset& ds, const FingerprintConfig& config) {
    if (ds.records.size() < 2 * static_cast<std::size_t>(config.min_leaf))
        throw ValidationError("training needs at least " +
                              std::to_string(2 * config.min_leaf) + " records, got " +
                              std::to_string(ds.records.size()));
    std::vector<std::vector<double>> vectors;
    std::vector<double> labels;
    vectors.reserve(ds.records.size());
    for (const auto& r : ds.records) {
        vectors.push_back(grid_vector(r.relax_trace, config.grid, config.uses_dropped_voltage));
        labels.push_back(r.soh);
    }
    FingerprintModel model;
    model.pca = pca_fit(vectors, config.variance_target);
    std::vector<std::vector<double>> projected;
    projected.reserve(vectors.size());
    for (const auto& v : vectors) projected.push_back(pca_project(model.pca, v));
    model.tree = tree_train(projected, labels, config.min_leaf, config.max_depth);
    model.grid = config.grid;
    model.uses_dropped_voltage = config.uses_dropped_voltage;
    model.model_name = ds.spec.model_name;
    model.soh_step = config.soh_step;
    return model;
}

double predict_trace(const FingerprintModel& model, const VoltageTrace& trace) {
    auto vec = grid_vector(trace, model.grid, model.uses_dropped_voltage);
    return tree_predict(model.tree, pca_project(model.pca, vec), model.soh_step);
}

ConfusionResult evaluate_confusion(const FingerprintModel& model, const CycleDataset& holdout,
                                   double bin_width) {
    if (holdout.records.empty()) throw ValidationError("holdout is empty");
    if (bin_width <= 0.0) throw ValidationError("bin width must be positive");
    auto bin_of = [bin_width](double soh) {
        return static_cast<std::size_t>(std::max(0.0, std::floor(soh / bin_width + 1e-9)));
    };
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    std::size_t n_bins = 0, hits = 0;
    for (const auto& r : holdout.records) {
        std::size_t tb = bin_of(r.soh);
        std::size_t pb = bin_of(predict_trace(model, r.relax_trace));
        cells.emplace_back(tb, pb);
        n_bins = std::max({n_bins, tb + 1, pb + 1});
        if (tb == pb) ++hits;
    }
    ConfusionResult out;
    out.bin_width = bin_width;
    out.matrix.assign(n_bins, std::vector<std::size_t>(n_bins, 0));
    for (auto [tb, pb] : cells) ++out.matrix[tb][pb];
    out.accuracy = static_cast<double>(hits) / static_cast<double>(holdout.records.size());
    return out;
}

CorrelationSummary dimension_correlation(const std::vector<std::vector<double>>& rows,
                                         double rho_threshold, bool include_matrix) {
    if (rows.size() < 3) throw ValidationError("correlation needs at least 3 rows");
    Eigen::MatrixXd x = to_matrix(rows);
    const long n = x.rows(), d = x.cols();
    Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd xc = x.rowwise() - mean;
    Eigen::RowVectorXd sd = (xc.colwise().squaredNorm() / static_cast<double>(n - 1)).cwiseSqrt();

    std::vector<long> defined;
    for (long j = 0; j < d; ++j)
        if (sd(j) > 0.0) defined.push_back(j);

    Eigen::MatrixXd z(n, static_cast<long>(defined.size()));
    for (std::size_t jj = 0; jj < defined.size(); ++jj)
        z.col(static_cast<long>(jj)) = xc.col(defined[jj]) / sd(defined[jj]);
    Eigen::MatrixXd corr = z.transpose() * z / static_cast<double>(n - 1);

    CorrelationSummary out;
    out.dims_excluded = static_cast<std::size_t>(d) - defined.size();
    std::size_t above = 0, total = 0;
    for (long a = 0; a < corr.rows(); ++a)
        for (long b = a + 1; b < corr.cols(); ++b) {
            ++total;
            if (std::abs(corr(a, b)) > rho_threshold) ++above;
        }
    out.pairs_defined = total;
    out.fraction_above = total ? static_cast<double>(above) / static_cast<double>(total) : 0.0;

    if (include_matrix) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.matrix.assign(d, std::vector<double>(d, nan));
        for (std::size_t aa = 0; aa < defined.size(); ++aa)
            for (std::size_t bb = 0; bb < defined.size(); ++bb)
                out.matrix[defined[aa]][defined[bb]] =
                    corr(static_cast<long>(aa), static_cast<long>(bb));
    }
    return out;
}

DtwResult dtw_distance(const std::vector<double>& seq_a, const std::vector<double>& seq_b) {
    if (seq_a.empty() || seq_b.empty()) throw ValidationError("dtw needs nonempty sequences");
    const std::size_t m = seq_a.size(), n = seq_b.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> dp(m, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double local = std::abs(seq_a[i] - seq_b[j]);
            if (i == 0 && j == 0)
                dp[i][j] = local;
            else {
                double prev = inf;
                if (i > 0 && j > 0) prev = std::min(prev, dp[i - 1][j - 1]);
                if (i > 0) prev = std::min(prev, dp[i - 1][j]);
                if (j > 0) prev = std::min(prev, dp[i][j - 1]);
                dp[i][j] = local + prev;
            }
        }

    DtwResult out;
    out.cost = dp[m - 1][n - 1];
    std::size_t i = m - 1, j = n - 1;
    out.path.emplace_back(i, j);
    while (i > 0 || j > 0) {
        double diag = (i > 0 && j > 0) ? dp[i - 1][j - 1] : inf;
        double up = i > 0 ? dp[i - 1][j] : inf;
        double left = j > 0 ? dp[i][j - 1] : inf;
        if (diag <= up && diag <= left) {
            --i;
            --j;
        } else if (up <= left) {
            --i;
        } else {
            --j;
        }
        out.path.emplace_back(i, j);
    }
    std::reverse(out.path.begin(), out.path.end());
    return out;
}

ExtendResult extend_dataset(const CycleDataset& ds, double soh_lo, double soh_hi,
                            double soh_step, const GridSpec& grid) {
    if (ds.records.size() < 2) throw ValidationError("extension needs at least 2 records");
    if (soh_step <= 0.0 || soh_hi <= soh_lo)
        throw ValidationError("extension needs soh_lo < soh_hi and a positive step");

    std::vector<double> labels;
    for (const auto& r : ds.records) labels.push_back(r.soh);
    const double min_s = *std::min_element(labels.begin(), labels.end());
    const double max_s = *std::max_element(labels.begin(), labels.end());
    if (max_s - min_s < 0.10)
        throw ValidationError("extension needs a dataset spanning at least 10% SoH");

    std::vector<std::vector<double>> volts;
    std::vector<double> v0s;
    for (const auto& r : ds.records) {
        volts.push_back(grid_vector(r.relax_trace, grid, false));
        v0s.push_back(volts.back().front());
    }
    const std::size_t gsize = grid.size();

    // drop(t) = alpha(t) * SoH + beta(t) at every grid time, plus the
    // start-of-rest voltage as a linear function of SoH.
    std::vector<double> alpha(gsize), beta(gsize), rmse(gsize);
    for (std::size_t k = 0; k < gsize; ++k) {
        std::vector<double> drops;
        drops.reserve(volts.size());
        for (std::size_t i = 0; i < volts.size(); ++i) drops.push_back(v0s[i] - volts[i][k]);
        LinearFit fit = fit_linear(labels, drops);
        alpha[k] = fit.slope;
        beta[k] = fit.intercept;
        rmse[k] = fit.rmse;
    }
    LinearFit v0_fit = fit_linear(labels, v0s);

    ExtendResult out;
    out.dataset = ds;
    out.per_time_rmse = std::move(rmse);

    std::uint32_t next_index = 0;
    for (const auto& r : ds.records) next_index = std::max(next_index, r.cycle_index + 1);

    const long steps = std::lround((soh_hi - soh_lo) / soh_step);
    for (long q = 0; q < steps; ++q) {
        double s = soh_lo + static_cast<double>(q) * soh_step;
        if (s >= min_s - 1e-12 && s <= max_s + 1e-12) {
            out.skipped_soh.push_back(s);
            continue;
        }
        CycleRecord rec;
        rec.cycle_index = next_index++;
        rec.soh = s;
        rec.synthetic = true;
        if (!ds.records.empty()) rec.profile = ds.records.front().profile;
        double v0 = v0_fit.slope * s + v0_fit.intercept;
        rec.relax_trace.sample_interval_s = grid.interval_s;
        for (std::size_t k = 0; k < gsize; ++k) {
            double t = static_cast<double>(k) * grid.interval_s;
            rec.relax_trace.samples.push_back({t, v0 - (alpha[k] * s + beta[k]), {}, {}});
        }
        out.dataset.records.push_back(std::move(rec));
    }
    return out;
}

} // namespace relaxsoh
