#include "lobflux/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lobflux {

namespace {

// Tail majorant for the unnormalized embedded measure: pi(n) < n p^{n-2},
// summed from n = K+1. Closed form of sum_{n>K} n x^n is
// x^{K+1}((K+1)(1-x)+x)/(1-x)^2.
double pi_tail_majorant(double p, std::int64_t k) {
    const double n1 = static_cast<double>(k + 1);
    return std::pow(p, static_cast<double>(k - 1)) * (n1 * (1.0 - p) + p) /
           ((1.0 - p) * (1.0 - p));
}

// smallest K whose majorant tail drops below eps, doubled once for safety
std::int64_t truncation_k(double p, double eps) {
    std::int64_t k = 2;
    while (pi_tail_majorant(p, k) >= eps) {
        ++k;
        if (k > 100000000) throw std::runtime_error("truncation_k: did not converge");
    }
    return 2 * k;
}

void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 1e-2))
        throw std::invalid_argument("stationary table: eps must lie in (0, 1e-2]");
}

// unnormalized mu(n), mu(1) = 1; mu(n)/mu(n-1) = (n/(n-1)) p / (1 + q/(n-1))
std::vector<double> unnormalized_mu(const HcParams& params, std::int64_t k_max) {
    const double p = params.p();
    const double q = params.q();
    std::vector<double> u(static_cast<std::size_t>(k_max));
    u[0] = 1.0;
    for (std::int64_t n = 2; n <= k_max; ++n) {
        const double nn = static_cast<double>(n);
        u[static_cast<std::size_t>(n - 1)] = u[static_cast<std::size_t>(n - 2)] *
                                             (nn / (nn - 1.0)) * p / (1.0 + q / (nn - 1.0));
    }
    return u;
}

}  // namespace

StationaryTable stationary_mu(const HcParams& params, double eps) {
    check_eps(eps);
    const double p = params.p();
    const std::int64_t k_max = truncation_k(p, eps);
    std::vector<double> u = unnormalized_mu(params, k_max);
    // mu majorant carries one extra factor of p relative to the pi majorant
    const double tail = p * pi_tail_majorant(p, k_max);
    double total = tail;
    for (double v : u) total += v;
    for (auto& v : u) v /= total;
    return StationaryTable{StationaryTable::Kind::mu, std::move(u), tail / total, params};
}

StationaryTable stationary_pi_from_mu(const HcParams& params, double eps) {
    check_eps(eps);
    StationaryTable mu = stationary_mu(params, eps);
    std::vector<double> u = std::move(mu.values);
    u[0] *= params.gamma_plus();
    for (std::size_t i = 1; i < u.size(); ++i) u[i] *= params.gamma();
    const double tail = mu.tail_bound * params.gamma();
    double total = tail;
    for (double v : u) total += v;
    for (auto& v : u) v /= total;
    return StationaryTable{StationaryTable::Kind::pi, std::move(u), tail / total, params};
}

StationaryTable stationary_pi(const HcParams& params, double eps) {
    check_eps(eps);
    const double p = params.p();
    const double q = params.q();
    const std::int64_t k_max = truncation_k(p, eps);
    // pi(n) = mu(n)/p for n >= 2, pi(1) = 1 in unnormalized form
    std::vector<double> u = unnormalized_mu(params, k_max);
    u[0] = 1.0;
    u[1] = 2.0 / (1.0 + q);
    for (std::int64_t n = 3; n <= k_max; ++n) {
        const double nn = static_cast<double>(n);
        u[static_cast<std::size_t>(n - 1)] = u[static_cast<std::size_t>(n - 2)] *
                                             (nn / (nn - 1.0)) * p / (1.0 + q / (nn - 1.0));
    }
    const double tail = pi_tail_majorant(p, k_max);
    double total = tail;
    for (double v : u) total += v;
    for (auto& v : u) v /= total;
    StationaryTable table{StationaryTable::Kind::pi, std::move(u), tail / total, params};

    // the recursion and the mu-times-exit-rate route must agree
    const StationaryTable alt = stationary_pi_from_mu(params, eps);
    double tv = 0.0;
    for (std::size_t i = 0; i < table.values.size(); ++i)
        tv += std::abs(table.values[i] - alt.at(static_cast<std::int64_t>(i + 1)));
    if (0.5 * tv > 1e-12)
        throw std::logic_error("stationary_pi: constructions disagree beyond tolerance");
    return table;
}

double mean_spread(const StationaryTable& mu) {
    double m = 0.0;
    for (std::int64_t k = mu.k_max(); k >= 1; --k) m += static_cast<double>(k) * mu.at(k);
    return m;
}

double stationary_event_rate(const HcParams& params, const StationaryTable& mu) {
    return mu.at(1) * params.gamma_plus() + (1.0 - mu.at(1) - mu.tail_bound) * params.gamma();
}

namespace {

constexpr double kSeriesEps = 1e-10;

double first_moment(const StationaryTable& t) {
    double m = 0.0;
    for (std::int64_t k = t.k_max(); k >= 1; --k) m += static_cast<double>(k) * t.at(k);
    return m;
}

// sum_s s(2s-1) pi(s)
double second_moment_weighted(const StationaryTable& t) {
    double m = 0.0;
    for (std::int64_t k = t.k_max(); k >= 1; --k) {
        const double s = static_cast<double>(k);
        m += s * (2.0 * s - 1.0) * t.at(k);
    }
    return m;
}

}  // namespace

double embedded_drift_v(const HcParams& params) {
    const StationaryTable pi = stationary_pi(params, kSeriesEps);
    const double g = params.gamma();
    return -params.beta_minus / g -
           (pi.at(1) / g) *
               (params.beta_minus * params.gamma_minus() / params.gamma_plus() +
                params.beta_plus / 2.0) +
           (params.beta_plus / (2.0 * g)) * first_moment(pi);
}

double drift_D(const HcParams& params, DriftMethod method) {
    switch (method) {
        case DriftMethod::generator:
            return (params.alpha_plus * params.beta_plus -
                    params.alpha_minus * params.beta_minus) /
                   params.gamma_minus();
        case DriftMethod::lemma_times_gamma:
            return embedded_drift_v(params) * params.gamma();
        case DriftMethod::theorem: {
            const StationaryTable mu = stationary_mu(params, kSeriesEps);
            const double g = params.gamma();
            return -params.beta_minus -
                   mu.at(1) * g *
                       (params.beta_minus * params.gamma_minus() / params.gamma_plus() +
                        params.beta_plus / 2.0) +
                   (params.beta_plus * g / 2.0) * first_moment(mu);
        }
    }
    throw std::invalid_argument("drift_D: unknown method");
}

double clt_variance_embedded(const HcParams& params, bool mu1_variant) {
    const StationaryTable pi = stationary_pi(params, kSeriesEps);
    const double g = params.gamma();
    const double state1_mass =
        mu1_variant ? stationary_mu(params, kSeriesEps).at(1) : pi.at(1);
    const double second_moment =
        params.beta_minus / g +
        (state1_mass / g) * (params.beta_minus * params.gamma_minus() / params.gamma_plus() -
                             params.beta_plus / 6.0) +
        (params.beta_plus / (6.0 * g)) * second_moment_weighted(pi);
    const double v = embedded_drift_v(params);
    return second_moment - v * v;
}

double volatility_sigma_n(const HcParams& params, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("volatility_sigma_n: needs n >= 1");
    return std::sqrt(static_cast<double>(n) * clt_variance_embedded(params));
}

double clt_variance_continuous(const HcParams& params) {
    const double v = embedded_drift_v(params);
    return (clt_variance_embedded(params) + v * v) * params.gamma();
}

double next_move_prob(const HcParams& params) {
    return (params.alpha_plus + params.beta_plus) / params.gamma();
}

// -------------------------------------------------------------- trajectories

void PiecewiseLinearTrajectory::validate() const {
    if (t.size() < 2 || t.size() != y.size())
        throw std::invalid_argument("trajectory: needs matching breakpoint lists, >= 2 points");
    if (t.front() != 0.0 || t.back() != 1.0)
        throw std::invalid_argument("trajectory: must span [0, 1]");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw std::invalid_argument("trajectory: breakpoints must be strictly increasing");
}

double PiecewiseLinearTrajectory::value(double tt) const {
    if (tt <= t.front()) return y.front();
    if (tt >= t.back()) return y.back();
    const auto it = std::upper_bound(t.begin(), t.end(), tt);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (tt - t[i - 1]) / (t[i] - t[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}

std::vector<double> PiecewiseLinearTrajectory::slopes() const {
    std::vector<double> s(t.size() - 1);
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        s[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
    return s;
}

double rate_function(const PiecewiseLinearTrajectory& f, const HcParams& params) {
    f.validate();
    const double gp = params.gamma_plus();
    double cost = params.gamma_minus();
    const std::vector<double> s = f.slopes();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double up = std::max(s[i], 0.0);  // positive variation only
        if (up > gp) {
            const double len = f.t[i + 1] - f.t[i];
            cost += len * (up * std::log(up / gp) - (up - gp));
        }
    }
    return cost;
}

double ldp_exponent(double x, const HcParams& params) {
    if (!(x > 0.0)) throw std::invalid_argument("ldp_exponent: needs x > 0");
    const double gp = params.gamma_plus();
    if (x < gp) return params.gamma_minus();
    return params.gamma_minus() + x * std::log(x / gp) - (x - gp);
}

PiecewiseLinearTrajectory optimal_spread_trajectory(double x, const HcParams& params) {
    if (!(x > 0.0)) throw std::invalid_argument("optimal_spread_trajectory: needs x > 0");
    const double gp = params.gamma_plus();
    if (x < gp) {
        const double t_x = 1.0 - x / gp;
        return PiecewiseLinearTrajectory{{0.0, t_x, 1.0}, {0.0, 0.0, x}};
    }
    return PiecewiseLinearTrajectory{{0.0, 1.0}, {0.0, x}};
}

std::pair<PiecewiseLinearTrajectory, PiecewiseLinearTrajectory>
optimal_price_trajectories(double x, const HcParams& params) {
    if (!(x > 0.0)) throw std::invalid_argument("optimal_price_trajectories: needs x > 0");
    const double gp = params.gamma_plus();
    const double m = x < gp ? 1.0 : x / gp;
    const double climb = x < gp ? x / gp : 1.0;  // duration of the opening phase
    const double ask_end = params.alpha_plus * m * climb;
    const double bid_end = -params.beta_minus * m * climb;
    if (x < gp) {
        const double t_x = 1.0 - climb;
        return {PiecewiseLinearTrajectory{{0.0, t_x, 1.0}, {0.0, 0.0, bid_end}},
                PiecewiseLinearTrajectory{{0.0, t_x, 1.0}, {0.0, 0.0, ask_end}}};
    }
    return {PiecewiseLinearTrajectory{{0.0, 1.0}, {0.0, bid_end}},
            PiecewiseLinearTrajectory{{0.0, 1.0}, {0.0, ask_end}}};
}

}  // namespace lobflux
