#pragma once

#include "relaxsoh/errors.hpp"
#include "relaxsoh/trace.hpp"

#include <optional>
#include <vector>

namespace relaxsoh {

// RMSE / R-squared pair for a model evaluated against observations.
struct Goodness {
    double rmse = 0.0;
    double r_squared = 1.0;
};

// Parameters of v(t) = a*(t+1)^b + c (the +1 shift avoids the t=0 singularity).
struct PowerFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double rmse = 0.0;
    double r_squared = 1.0;
};

// Ordinary least squares line y = slope*x + intercept.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rmse = 0.0;
    double r_squared = 1.0;
};

// Sum-of-exponentials model: sum_k amplitude_k * exp(rate_k * t) + offset.
// The supported forms carry one or two terms and no offset (offset stays 0).
struct ExpTerm {
    double amplitude = 0.0;
    double rate = 0.0;
};
struct ExpFit {
    std::vector<ExpTerm> terms;
    double offset = 0.0;
    double rmse = 0.0;
    double r_squared = 1.0;
};

// Thrown when an iterative fit fails to converge; carries the best iterate so
// callers can still inspect (or discard) the partial result.
class FitDivergedError : public NumericError {
public:
    FitDivergedError(const std::string& msg, PowerFit best)
        : NumericError(msg), power_(std::move(best)) {}
    FitDivergedError(const std::string& msg, ExpFit best)
        : NumericError(msg), exp_(std::move(best)) {}
    const std::optional<PowerFit>& power_best() const { return power_; }
    const std::optional<ExpFit>& exp_best() const { return exp_; }

private:
    std::optional<PowerFit> power_;
    std::optional<ExpFit> exp_;
};

// Least-squares fit of v(t) = a*(t+1)^b + c via damped Gauss-Newton
// (init a = v0 - v_end, b = -0.5, c = v_end; at most 200 iterations,
// relative step < 1e-10 to converge). Requires >= 10 samples, all t >= 0.
// A constant trace returns (a=0, b=-1, c=mean, rmse=0, r_squared=1); if the
// iteration cannot beat the best constant model, the constant model is
// returned, so the result's RMSE never exceeds the constant-model RMSE.
// Throws FitDivergedError (carrying the best iterate) on non-convergence.
PowerFit fit_power(const VoltageTrace& trace);

// Evaluate a power fit at time t (same t+1 domain shift as fit_power).
double eval_power(const PowerFit& fit, double t);

// Ordinary least squares. Requires >= 2 points and non-degenerate xs.
// Zero-variance ys yield r_squared = 1 by convention.
LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys);

// Least-squares fit of a*exp(b*t) (terms=1) or a*exp(b*t) + c*exp(d*t)
// (terms=2). Same preconditions and divergence behavior as fit_power.
// A constant trace returns amplitude=mean, rate=0.
ExpFit fit_exponential(const VoltageTrace& trace, int terms);

// Evaluate an exponential fit at time t.
double eval_exponential(const ExpFit& fit, double t);

// rmse = sqrt(mean squared residual); r_squared = 1 - SS_res/SS_tot.
// Both zero sums conventionally give r_squared = 1. Equal nonzero lengths
// required.
Goodness goodness(const std::vector<double>& observed, const std::vector<double>& predicted);

} // namespace relaxsoh
