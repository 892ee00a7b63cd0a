#include "relaxsoh/baselines.hpp"

#include "relaxsoh/errors.hpp"
#include "relaxsoh/estimator.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace relaxsoh {

namespace {

constexpr double kCasalsAnchorS = 300.0;
constexpr double kBondAnchorS = 1800.0;

double interpolate_at(const VoltageTrace& trace, double t_s) {
    const auto& s = trace.samples;
    const double target = s.front().t_s + t_s;
    std::size_t seg = 0;
    while (seg + 2 < s.size() && s[seg + 1].t_s < target) ++seg;
    const double w = (target - s[seg].t_s) / (s[seg + 1].t_s - s[seg].t_s);
    return s[seg].v + w * (s[seg + 1].v - s[seg].v);
}

double eval_kind(const BaselineModel& model, double anchor_or_exponent) {
    const auto& c = model.coefficients;
    if (model.kind == "casals" || model.kind == "vbash") {
        if (c.size() != 2) throw ValidationError("model needs 2 coefficients");
        return c[0] * anchor_or_exponent + c[1];
    }
    if (model.kind == "bond") {
        if (c.size() != 3) throw ValidationError("model needs 3 coefficients");
        return (c[0] * anchor_or_exponent + c[1]) * anchor_or_exponent + c[2];
    }
    throw ValidationError("unknown baseline kind: " + model.kind);
}

double feature_of(const BaselineModel& model, const RelaxSubTrace& sub, bool& recovered) {
    if (model.kind == "vbash") {
        recovered = false;
        return sub.fit.b;
    }
    const double anchor_s = model.kind == "casals" ? kCasalsAnchorS : kBondAnchorS;
    AnchorValue a = anchor_voltage(sub, anchor_s);
    recovered = a.recovered;
    return a.v;
}

Goodness quality(const std::vector<double>& labels, const std::vector<double>& predicted) {
    return goodness(labels, predicted);
}

} // namespace

AnchorValue anchor_voltage(const VoltageTrace& trace, double t_s) {
    if (trace.samples.size() < 2) throw ValidationError("anchor needs at least 2 samples");
    if (t_s < 0.0) throw ValidationError("anchor time must be nonnegative");
    if (trace.duration_s() + 1e-9 >= t_s) return {interpolate_at(trace, t_s), false};
    PowerFit fit;
    try {
        fit = fit_power(trace);
    } catch (const FitDivergedError& e) {
        if (!e.power_best()) throw;
        fit = *e.power_best();
    }
    return {eval_power(fit, t_s), true};
}

AnchorValue anchor_voltage(const RelaxSubTrace& sub, double t_s) {
    if (sub.trace.samples.size() < 2) throw ValidationError("anchor needs at least 2 samples");
    if (t_s < 0.0) throw ValidationError("anchor time must be nonnegative");
    if (sub.trace.duration_s() + 1e-9 >= t_s) return {interpolate_at(sub.trace, t_s), false};
    return {eval_power(sub.fit, t_s), true};
}

BaselineModel casals_fit(const CycleDataset& ds) {
    if (ds.records.size() < 2) throw ValidationError("fit needs at least 2 records");
    std::vector<double> anchors, labels;
    for (const auto& r : ds.records) {
        anchors.push_back(anchor_voltage(r.relax_trace, kCasalsAnchorS).v);
        labels.push_back(r.soh);
    }
    LinearFit fit = fit_linear(anchors, labels);
    BaselineModel model{"casals", {fit.slope, fit.intercept}, {fit.rmse, fit.r_squared}};
    return model;
}

BaselineModel bonds_fit(const CycleDataset& ds) {
    if (ds.records.size() < 3) throw ValidationError("fit needs at least 3 records");
    const long n = static_cast<long>(ds.records.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd y(n);
    std::vector<double> labels;
    for (long i = 0; i < n; ++i) {
        double v = anchor_voltage(ds.records[i].relax_trace, kBondAnchorS).v;
        a(i, 0) = v * v;
        a(i, 1) = v;
        a(i, 2) = 1.0;
        y(i) = ds.records[i].soh;
        labels.push_back(ds.records[i].soh);
    }
    Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
    if (!coef.allFinite()) throw NumericError("quadratic fit failed");
    BaselineModel model{"bond", {coef(0), coef(1), coef(2)}, {}};
    std::vector<double> predicted;
    for (long i = 0; i < n; ++i)
        predicted.push_back((coef(0) * a(i, 1) + coef(1)) * a(i, 1) + coef(2));
    model.fit_quality = quality(labels, predicted);
    return model;
}

BaselineModel vbash_fit(const CycleDataset& ds) {
    if (ds.records.size() < 2) throw ValidationError("fit needs at least 2 records");
    std::vector<double> exponents, labels;
    for (const auto& r : ds.records) {
        PowerFit fit;
        try {
            fit = fit_power(r.relax_trace);
        } catch (const FitDivergedError& e) {
            if (!e.power_best()) throw;
            fit = *e.power_best();
        }
        exponents.push_back(fit.b);
        labels.push_back(r.soh);
    }
    LinearFit fit = fit_linear(exponents, labels);
    BaselineModel model{"vbash", {fit.slope, fit.intercept}, {fit.rmse, fit.r_squared}};
    return model;
}

BaselinePrediction baseline_predict(const BaselineModel& model, const VoltageTrace& trace) {
    BaselinePrediction out;
    double feature;
    if (model.kind == "vbash") {
        PowerFit fit;
        try {
            fit = fit_power(trace);
        } catch (const FitDivergedError& e) {
            if (!e.power_best()) throw;
            fit = *e.power_best();
        }
        feature = fit.b;
    } else {
        const double anchor_s = model.kind == "casals" ? kCasalsAnchorS : kBondAnchorS;
        AnchorValue a = anchor_voltage(trace, anchor_s);
        feature = a.v;
        out.anchor_recovered = a.recovered;
    }
    out.soh = eval_kind(model, feature);
    out.out_of_range = out.soh < 0.0 || out.soh > 1.0;
    return out;
}

BaselinePrediction baseline_predict(const BaselineModel& model, const RelaxSubTrace& sub) {
    BaselinePrediction out;
    bool recovered = false;
    const double feature = feature_of(model, sub, recovered);
    out.anchor_recovered = recovered;
    out.soh = eval_kind(model, feature);
    out.out_of_range = out.soh < 0.0 || out.soh > 1.0;
    return out;
}

BaselinePrediction baseline_estimate_session(const BaselineModel& model,
                                             const ChargeSessionLog& log,
                                             const SegmentationConfig& config) {
    SegmentationResult seg = segment_subtraces(log, config);
    if (seg.subtraces.empty())
        throw NoEstimateError("no relaxation segment was usable in this session");
    BaselinePrediction out;
    double sum = 0.0;
    for (const auto& sub : seg.subtraces) {
        BaselinePrediction p = baseline_predict(model, sub);
        sum += p.soh;
        out.anchor_recovered |= p.anchor_recovered;
    }
    out.soh = sum / static_cast<double>(seg.subtraces.size());
    out.out_of_range = out.soh < 0.0 || out.soh > 1.0;
    return out;
}

} // namespace relaxsoh
