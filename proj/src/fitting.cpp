#include "relaxsoh/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace relaxsoh {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kInitialLambda = 1e-3;
constexpr double kStepTolerance = 1e-10;

double safe_exp(double x) { return std::exp(std::clamp(x, -350.0, 350.0)); }

struct LmOutcome {
    Eigen::VectorXd params;
    bool converged = false;
};

// Damped Gauss-Newton over params p minimizing ||y - f(p)||^2.
// `model` fills predicted values and the model Jacobian for the current p.
LmOutcome run_lm(Eigen::VectorXd p,
                 const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                                          Eigen::MatrixXd&)>& model,
                 const Eigen::VectorXd& y,
                 const std::function<void(Eigen::VectorXd&)>& clamp_params) {
    const auto n = y.size();
    Eigen::VectorXd pred(n);
    Eigen::MatrixXd jac(n, p.size());
    model(p, pred, jac);
    double cost = (y - pred).squaredNorm();

    Eigen::VectorXd best_p = p;
    double best_cost = cost;
    double lambda = kInitialLambda;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        Eigen::VectorXd resid = y - pred;
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd jtr = jac.transpose() * resid;
        Eigen::MatrixXd damped = jtj;
        for (Eigen::Index k = 0; k < p.size(); ++k)
            damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);

        Eigen::VectorXd delta = damped.ldlt().solve(jtr);
        if (!delta.allFinite()) {
            lambda *= 10.0;
            continue;
        }
        Eigen::VectorXd trial = p + delta;
        clamp_params(trial);
        double max_rel = 0.0;
        for (Eigen::Index k = 0; k < p.size(); ++k)
            max_rel = std::max(max_rel, std::abs(trial(k) - p(k)) / (std::abs(p(k)) + 1e-12));

        Eigen::VectorXd trial_pred(n);
        Eigen::MatrixXd trial_jac(n, p.size());
        model(trial, trial_pred, trial_jac);
        double trial_cost = (y - trial_pred).squaredNorm();

        bool better = std::isfinite(trial_cost) && trial_cost < cost;
        // A negligible proposed step means the iteration has settled whether
        // or not it still shaves cost below representable precision.
        if (max_rel < kStepTolerance) {
            if (better && trial_cost < best_cost) return {trial, true};
            return {best_cost <= cost ? best_p : p, true};
        }
        if (better) {
            p = trial;
            pred = trial_pred;
            jac = trial_jac;
            cost = trial_cost;
            lambda *= 0.3;
            if (cost < best_cost) {
                best_cost = cost;
                best_p = p;
            }
        } else {
            lambda *= 10.0;
        }
    }
    return {best_p, false};
}

Goodness goodness_at(const std::vector<double>& observed,
                     const std::function<double(double)>& predict,
                     const std::vector<double>& ts) {
    std::vector<double> pred(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) pred[i] = predict(ts[i]);
    return goodness(observed, pred);
}

bool is_constant(const std::vector<double>& vs) {
    return std::all_of(vs.begin(), vs.end(), [&](double v) { return v == vs.front(); });
}

double mean_of(const std::vector<double>& vs) {
    double s = 0.0;
    for (double v : vs) s += v;
    return s / static_cast<double>(vs.size());
}

void check_fit_preconditions(const VoltageTrace& trace) {
    if (trace.samples.size() < 10)
        throw ValidationError("fit needs at least 10 samples, got " +
                              std::to_string(trace.samples.size()));
    for (const auto& s : trace.samples)
        if (s.t_s < 0.0)
            throw ValidationError("fit requires non-negative times");
}

} // namespace

PowerFit fit_power(const VoltageTrace& trace) {
    check_fit_preconditions(trace);
    std::vector<double> ts = trace.times();
    std::vector<double> vs = trace.voltages();
    const std::size_t n = ts.size();

    if (is_constant(vs)) return {0.0, -1.0, vs.front(), 0.0, 1.0};

    std::vector<double> logw(n);
    for (std::size_t i = 0; i < n; ++i) logw[i] = std::log(ts[i] + 1.0);

    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(vs.data(), static_cast<long>(n));
    auto model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& pred, Eigen::MatrixXd& jac) {
        double a = p(0), b = p(1), c = p(2);
        for (std::size_t i = 0; i < n; ++i) {
            double wb = safe_exp(b * logw[i]);
            pred(static_cast<long>(i)) = a * wb + c;
            jac(static_cast<long>(i), 0) = wb;
            jac(static_cast<long>(i), 1) = a * logw[i] * wb;
            jac(static_cast<long>(i), 2) = 1.0;
        }
    };
    auto clamp_params = [](Eigen::VectorXd& p) { p(1) = std::clamp(p(1), -50.0, 50.0); };

    Eigen::VectorXd p0(3);
    p0 << vs.front() - vs.back(), -0.5, vs.back();
    LmOutcome out = run_lm(p0, model, y, clamp_params);

    PowerFit fit{out.params(0), out.params(1), out.params(2), 0.0, 1.0};
    Goodness g = goodness_at(vs, [&](double t) { return eval_power(fit, t); }, ts);
    fit.rmse = g.rmse;
    fit.r_squared = g.r_squared;

    // Guarantee the result is never worse than the best constant model.
    PowerFit flat{0.0, -1.0, mean_of(vs), 0.0, 1.0};
    Goodness gflat = goodness_at(vs, [&](double t) { return eval_power(flat, t); }, ts);
    flat.rmse = gflat.rmse;
    flat.r_squared = gflat.r_squared;

    if (!out.converged)
        throw FitDivergedError("power fit did not converge within " +
                                   std::to_string(kMaxIterations) + " iterations",
                               fit.rmse <= flat.rmse ? fit : flat);
    return fit.rmse <= flat.rmse ? fit : flat;
}

double eval_power(const PowerFit& fit, double t) {
    return fit.a * safe_exp(fit.b * std::log(t + 1.0)) + fit.c;
}

LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw ValidationError("fit_linear needs equal-length vectors");
    if (xs.size() < 2)
        throw ValidationError("fit_linear needs at least 2 points");
    const double n = static_cast<double>(xs.size());
    double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0)
        throw NumericError("fit_linear: xs are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss_res += r * r;
        ss_tot += (ys[i] - my) * (ys[i] - my);
    }
    fit.rmse = std::sqrt(ss_res / n);
    fit.r_squared = (ss_tot == 0.0) ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

ExpFit fit_exponential(const VoltageTrace& trace, int terms) {
    if (terms != 1 && terms != 2)
        throw ValidationError("fit_exponential supports 1 or 2 terms");
    check_fit_preconditions(trace);
    std::vector<double> ts = trace.times();
    std::vector<double> vs = trace.voltages();
    const std::size_t n = ts.size();

    if (is_constant(vs)) {
        ExpFit fit;
        fit.terms.push_back({vs.front(), 0.0});
        if (terms == 2) fit.terms.push_back({0.0, 0.0});
        return fit;
    }

    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(vs.data(), static_cast<long>(n));
    Eigen::VectorXd p0;
    if (terms == 1) {
        // Log-linear initialization (valid: trace voltages are positive).
        std::vector<double> logv(n);
        bool positive = std::all_of(vs.begin(), vs.end(), [](double v) { return v > 0.0; });
        double a0 = vs.front(), b0 = 0.0;
        if (positive) {
            for (std::size_t i = 0; i < n; ++i) logv[i] = std::log(vs[i]);
            LinearFit ll = fit_linear(ts, logv);
            a0 = std::exp(ll.intercept);
            b0 = ll.slope;
        }
        p0 = Eigen::VectorXd(2);
        p0 << a0, b0;
    } else {
        p0 = Eigen::VectorXd(4);
        p0 << vs.front() - vs.back(), -0.01, vs.back(), -1e-5;
    }

    auto model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& pred, Eigen::MatrixXd& jac) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k + 1 < p.size() + 1; k += 2) {
                double amp = p(k), rate = p(k + 1);
                double e = safe_exp(rate * ts[i]);
                acc += amp * e;
                jac(static_cast<long>(i), k) = e;
                jac(static_cast<long>(i), k + 1) = amp * ts[i] * e;
            }
            pred(static_cast<long>(i)) = acc;
        }
    };
    auto clamp_params = [&](Eigen::VectorXd& p) {
        for (Eigen::Index k = 1; k < p.size(); k += 2) p(k) = std::clamp(p(k), -10.0, 10.0);
    };

    LmOutcome out = run_lm(p0, model, y, clamp_params);
    ExpFit fit;
    for (Eigen::Index k = 0; k + 1 < out.params.size() + 1; k += 2)
        fit.terms.push_back({out.params(k), out.params(k + 1)});
    Goodness g = goodness_at(vs, [&](double t) { return eval_exponential(fit, t); }, ts);
    fit.rmse = g.rmse;
    fit.r_squared = g.r_squared;
    if (!out.converged)
        throw FitDivergedError("exponential fit did not converge within " +
                                   std::to_string(kMaxIterations) + " iterations",
                               fit);
    return fit;
}

double eval_exponential(const ExpFit& fit, double t) {
    double acc = fit.offset;
    for (const auto& term : fit.terms) acc += term.amplitude * safe_exp(term.rate * t);
    return acc;
}

Goodness goodness(const std::vector<double>& observed, const std::vector<double>& predicted) {
    if (observed.size() != predicted.size())
        throw ValidationError("goodness needs equal-length vectors");
    if (observed.empty())
        throw ValidationError("goodness needs nonempty vectors");
    const double n = static_cast<double>(observed.size());
    double mo = mean_of(observed);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double r = observed[i] - predicted[i];
        ss_res += r * r;
        ss_tot += (observed[i] - mo) * (observed[i] - mo);
    }
    Goodness g;
    g.rmse = std::sqrt(ss_res / n);
    if (ss_tot == 0.0)
        g.r_squared = (ss_res == 0.0) ? 1.0 : -std::numeric_limits<double>::infinity();
    else
        g.r_squared = 1.0 - ss_res / ss_tot;
    return g;
}

} // namespace relaxsoh
