#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lobflux/model.hpp"

namespace lobflux {

// Truncated, normalized invariant measure over the spread, k = 1..k_max().
// `values` and `tail_bound` sum to 1 exactly; tail_bound majorizes the mass
// beyond the truncation point.
struct StationaryTable {
    enum class Kind { mu, pi };  // continuous-time vs embedded chain

    Kind kind;
    std::vector<double> values;  // values[i] is the mass at spread k = i+1
    double tail_bound;
    HcParams params;

    std::int64_t k_max() const { return static_cast<std::int64_t>(values.size()); }
    double at(std::int64_t k) const {
        return (k >= 1 && k <= k_max()) ? values[static_cast<std::size_t>(k - 1)] : 0.0;
    }
};

// Invariant measure of the continuous-time spread chain,
// mu(k) proportional to k p^{k-1} / prod_{i<k} (1 + q/i).
StationaryTable stationary_mu(const HcParams& params, double eps);

// Invariant measure of the embedded jump chain,
// pi(n) proportional to n p^{n-2} / prod_{i<n} (1 + q/i) for n >= 2.
// Cross-checked against the mu-times-exit-rate construction on every call.
StationaryTable stationary_pi(const HcParams& params, double eps);

// pi built by renormalizing mu(k) * exit_rate(k); second route for the
// measure-consistency check.
StationaryTable stationary_pi_from_mu(const HcParams& params, double eps);

// E_mu[spread]
double mean_spread(const StationaryTable& mu);

// stationary jump intensity sum_k mu(k) r(k), with r(1) = gamma_plus and
// r(k>=2) = gamma
double stationary_event_rate(const HcParams& params, const StationaryTable& mu);

// almost-sure limit of p_n / n for the embedded bid price
double embedded_drift_v(const HcParams& params);

enum class DriftMethod {
    theorem,            // mu-form as printed in the LLN theorem statement
    lemma_times_gamma,  // v * gamma, the proof's conversion
    generator,          // (alpha+ beta+ - alpha- beta-) / gamma-; ground truth
};

// almost-sure limit of P_b(t) / t
double drift_D(const HcParams& params, DriftMethod method);

// Var of the embedded price increment under the stationary law. The variant
// flag substitutes mu(1) for pi(1) in the bracket term, as printed.
double clt_variance_embedded(const HcParams& params, bool mu1_variant = false);

// sigma_n = sqrt(n * Var)
double volatility_sigma_n(const HcParams& params, std::int64_t n);

// (sigma^2 + v^2) * gamma; continuous-time CLT limit as printed
double clt_variance_continuous(const HcParams& params);

// probability that the next price-changing move raises the mid price
double next_move_prob(const HcParams& params);

// Continuous trajectory on [0,1] given by breakpoints; used both for rate
// function inputs and optimal trajectories.
struct PiecewiseLinearTrajectory {
    std::vector<double> t;  // strictly increasing, t.front() == 0, t.back() == 1
    std::vector<double> y;

    void validate() const;
    double value(double tt) const;
    std::vector<double> slopes() const;
};

// Large-deviation cost of a trajectory: gamma- plus the Poisson excess-growth
// integral over segments whose positive slope strictly exceeds gamma+.
double rate_function(const PiecewiseLinearTrajectory& f, const HcParams& params);

// inf of rate_function over trajectories with terminal level x > 0
double ldp_exponent(double x, const HcParams& params);

// Minimizing spread trajectory for terminal level x: flat-then-slope-gamma+
// when x < gamma+, straight line of slope x otherwise.
PiecewiseLinearTrajectory optimal_spread_trajectory(double x, const HcParams& params);

// Bid/ask trajectories accompanying the optimal spread excursion; the opening
// is split proportionally to alpha+ (ask) and beta- (bid).
std::pair<PiecewiseLinearTrajectory, PiecewiseLinearTrajectory>
optimal_price_trajectories(double x, const HcParams& params);

}  // namespace lobflux
