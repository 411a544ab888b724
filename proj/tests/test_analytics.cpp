#include <doctest.h>

#include <cmath>
#include <vector>

#include "lobflux/analytics.hpp"
#include "lobflux/rng.hpp"

using namespace lobflux;

namespace {

const HcParams kFitted(5.0, 3.0, 2.0, 4.0);

// Independent oracle for stationary moments: per-state conditional moments of
// the price increment under the jump skeleton (up probability 1 at spread 1,
// p elsewhere; catastrophe target uniform on {1..k-1}).
struct EmbeddedMoments {
    double mean = 0.0;
    double second = 0.0;
};

EmbeddedMoments brute_force_F_moments(const HcParams& params) {
    const StationaryTable pi = stationary_pi(params, 1e-12);
    EmbeddedMoments m;
    for (std::int64_t k = 1; k <= pi.k_max(); ++k) {
        const double up_prob = k == 1 ? 1.0 : params.p();
        const double down_prob = 1.0 - up_prob;
        const double s = static_cast<double>(k);
        // E[d] = s/2 and E[d^2] = s(2s-1)/6 for d uniform on {1..s-1}
        const double mean_k = up_prob * (-params.beta_minus / params.gamma_plus()) +
                              down_prob * (params.beta_plus / params.gamma_minus()) * s / 2.0;
        const double second_k =
            up_prob * (params.beta_minus / params.gamma_plus()) +
            down_prob * (params.beta_plus / params.gamma_minus()) * s * (2.0 * s - 1.0) / 6.0;
        m.mean += pi.at(k) * mean_k;
        m.second += pi.at(k) * second_k;
    }
    return m;
}

}  // namespace

TEST_CASE("stationary mu satisfies truncated global balance") {
    const StationaryTable mu = stationary_mu(kFitted, 1e-12);
    const double gp = kFitted.gamma_plus();
    const double gm = kFitted.gamma_minus();
    // suffix sums of mu(m)/(m-1) give each state's catastrophe inflow
    std::vector<double> inflow_from_above(static_cast<std::size_t>(mu.k_max()) + 2, 0.0);
    for (std::int64_t n = mu.k_max(); n >= 2; --n)
        inflow_from_above[static_cast<std::size_t>(n) - 1] =
            inflow_from_above[static_cast<std::size_t>(n)] +
            gm * mu.at(n) / static_cast<double>(n - 1);
    const std::int64_t top = mu.k_max() / 2;  // keep clear of the truncation edge
    for (std::int64_t n = 1; n <= top; ++n) {
        const double outflow = mu.at(n) * (n == 1 ? gp : kFitted.gamma());
        const double inflow =
            (n >= 2 ? gp * mu.at(n - 1) : 0.0) + inflow_from_above[static_cast<std::size_t>(n)];
        CHECK(std::abs(inflow - outflow) < 1e-10);
    }
}

TEST_CASE("closed-form identity: sum k mu(k) over k >= 2 equals 2 gamma+/gamma-") {
    const StationaryTable mu = stationary_mu(kFitted, 1e-12);
    double s = 0.0;
    for (std::int64_t k = mu.k_max(); k >= 2; --k) s += static_cast<double>(k) * mu.at(k);
    CHECK(std::abs(s - 3.6) < 1e-8);
    CHECK(mean_spread(mu) == doctest::Approx(mu.at(1) + 3.6).epsilon(1e-10));
}

TEST_CASE("mu recursion ratio") {
    const StationaryTable mu = stationary_mu(kFitted, 1e-10);
    const double p = kFitted.p(), q = kFitted.q();
    CHECK(mu.at(2) / mu.at(1) == doctest::Approx(2.0 * p / (1.0 + q)).epsilon(1e-13));
    CHECK(mu.at(3) / mu.at(2) == doctest::Approx(1.5 * p / (1.0 + q / 2.0)).epsilon(1e-13));
}

TEST_CASE("pi matches its closed form and tail bound") {
    const StationaryTable pi = stationary_pi(kFitted, 1e-12);
    const double p = kFitted.p(), q = kFitted.q();
    double prod = 1.0;
    for (std::int64_t n = 2; n <= 30; ++n) {
        prod *= 1.0 + q / static_cast<double>(n - 1);
        const double want = static_cast<double>(n) *
                            std::pow(p, static_cast<double>(n - 2)) / prod * pi.at(1);
        CHECK(pi.at(n) == doctest::Approx(want).epsilon(1e-12));
        CHECK(pi.at(n) <
              static_cast<double>(n) * std::pow(p, static_cast<double>(n - 2)) * pi.at(1) *
                  (1.0 + 1e-12));
    }
}

TEST_CASE("table normalization: values plus tail bound sum to one") {
    for (const auto& t : {stationary_mu(kFitted, 1e-8), stationary_pi(kFitted, 1e-8)}) {
        double total = t.tail_bound;
        for (std::int64_t k = t.k_max(); k >= 1; --k) total += t.at(k);
        CHECK(std::abs(total - 1.0) < 1e-12);
        CHECK(t.tail_bound < 1e-8);
    }
}

TEST_CASE("the two pi constructions agree in TV over a random parameter grid") {
    Rng rng(987654321);
    for (int trial = 0; trial < 20; ++trial) {
        const auto draw = [&rng] { return 0.1 + 9.9 * rng.uniform(); };
        const HcParams params(draw(), draw(), draw(), draw());
        const StationaryTable a = stationary_pi(params, 1e-10);
        const StationaryTable b = stationary_pi_from_mu(params, 1e-10);
        const std::int64_t top = std::max(a.k_max(), b.k_max());
        double tv = 0.0;
        for (std::int64_t k = 1; k <= top; ++k) tv += std::abs(a.at(k) - b.at(k));
        CHECK(0.5 * tv <= 1e-12);
    }
}

TEST_CASE("embedded drift matches the per-state expectation oracle") {
    for (const HcParams& params :
         {kFitted, HcParams(1.0, 1.0, 1.0, 1.0), HcParams(0.5, 0.06, 0.06, 0.5)}) {
        const auto oracle = brute_force_F_moments(params);
        CHECK(std::abs(embedded_drift_v(params) - oracle.mean) < 1e-10);
    }
}

TEST_CASE("embedded variance formula equals the brute-force moment oracle") {
    for (const HcParams& params :
         {kFitted, HcParams(1.0, 1.0, 1.0, 1.0), HcParams(2.5, 0.3, 1.1, 0.7)}) {
        const auto oracle = brute_force_F_moments(params);
        const double want = oracle.second - oracle.mean * oracle.mean;
        CHECK(std::abs(clt_variance_embedded(params) - want) < 1e-10);
    }
    // the as-printed variant differs once mu(1) != pi(1)
    CHECK(clt_variance_embedded(kFitted, true) != clt_variance_embedded(kFitted, false));
}

TEST_CASE("drift methods: generator closed form and conversions") {
    CHECK(drift_D(kFitted, DriftMethod::generator) == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(drift_D(kFitted, DriftMethod::lemma_times_gamma) ==
          doctest::Approx(embedded_drift_v(kFitted) * 14.0).epsilon(1e-12));
    // v converted with the true stationary event rate recovers the generator drift
    const StationaryTable mu = stationary_mu(kFitted, 1e-12);
    const double rate = stationary_event_rate(kFitted, mu);
    CHECK(embedded_drift_v(kFitted) * rate ==
          doctest::Approx(drift_D(kFitted, DriftMethod::generator)).epsilon(1e-9));
    // the three printed forms genuinely disagree at the fitted quadruple
    CHECK(std::abs(drift_D(kFitted, DriftMethod::theorem) -
                   drift_D(kFitted, DriftMethod::generator)) > 1.0);
    CHECK(std::abs(drift_D(kFitted, DriftMethod::lemma_times_gamma) -
                   drift_D(kFitted, DriftMethod::generator)) > 0.01);
}

TEST_CASE("volatility helpers") {
    const double var = clt_variance_embedded(kFitted);
    CHECK(volatility_sigma_n(kFitted, 100000) ==
          doctest::Approx(std::sqrt(100000.0 * var)).epsilon(1e-13));
    const double v = embedded_drift_v(kFitted);
    CHECK(clt_variance_continuous(kFitted) ==
          doctest::Approx((var + v * v) * 14.0).epsilon(1e-13));
    CHECK(next_move_prob(kFitted) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(next_move_prob(HcParams(6, 1, 1, 2)) == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("rate function: strict-threshold Poisson cost") {
    const HcParams params(5.0, 3.0, 2.0, 4.0);  // gamma+ = 9, gamma- = 5
    // slope exactly gamma+ costs nothing beyond the base catastrophe-free term
    PiecewiseLinearTrajectory at_capacity{{0.0, 1.0}, {0.0, 9.0}};
    CHECK(rate_function(at_capacity, params) == doctest::Approx(5.0).epsilon(1e-14));
    // sub-capacity and downward segments also cost nothing
    PiecewiseLinearTrajectory gentle{{0.0, 0.5, 1.0}, {0.0, 2.0, 1.0}};
    CHECK(rate_function(gentle, params) == doctest::Approx(5.0).epsilon(1e-14));
    // super-capacity slope pays the Poisson excess integral
    PiecewiseLinearTrajectory steep{{0.0, 1.0}, {0.0, 18.0}};
    CHECK(rate_function(steep, params) ==
          doctest::Approx(5.0 + 18.0 * std::log(2.0) - 9.0).epsilon(1e-13));
    // only the steep segment's length enters
    PiecewiseLinearTrajectory mixed{{0.0, 0.25, 1.0}, {0.0, 4.5, 4.5}};
    CHECK(rate_function(mixed, params) ==
          doctest::Approx(5.0 + 0.25 * (18.0 * std::log(2.0) - 9.0)).epsilon(1e-13));
    CHECK_THROWS_AS(rate_function(PiecewiseLinearTrajectory{{0.0, 0.5}, {0.0, 1.0}}, params),
                    std::invalid_argument);
}

TEST_CASE("exponent at x = e gamma+ collapses to gamma- + gamma+") {
    CHECK(ldp_exponent(std::exp(1.0) * 9.0, kFitted) ==
          doctest::Approx(5.0 + 9.0).epsilon(1e-13));
    CHECK(ldp_exponent(4.0, kFitted) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("optimal trajectory attains the exponent on a grid of terminal levels") {
    const double gp = kFitted.gamma_plus();
    for (double frac = 0.1; frac <= 3.0001; frac += 0.1) {
        const double x = frac * gp;
        const PiecewiseLinearTrajectory f = optimal_spread_trajectory(x, kFitted);
        f.validate();
        CHECK(std::abs(f.y.back() - x) < 1e-12);
        CHECK(std::abs(rate_function(f, kFitted) - ldp_exponent(x, kFitted)) < 1e-12);
    }
}

TEST_CASE("optimal spread trajectory shape") {
    const auto below = optimal_spread_trajectory(4.5, kFitted);  // x < gamma+ = 9
    REQUIRE(below.t.size() == 3);
    CHECK(below.t[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(below.y[1] == 0.0);
    CHECK(below.slopes()[1] == doctest::Approx(9.0).epsilon(1e-13));
    const auto above = optimal_spread_trajectory(18.0, kFitted);
    REQUIRE(above.t.size() == 2);
    CHECK(above.slopes()[0] == doctest::Approx(18.0).epsilon(1e-13));
}

TEST_CASE("exponent and spread trajectory depend only on the gamma pair") {
    // same gamma+ = 9, gamma- = 5, different alpha/beta splits
    const HcParams a(5.0, 3.0, 2.0, 4.0);
    const HcParams b(8.0, 4.5, 0.5, 1.0);
    for (double x : {2.0, 9.0, 13.0, 27.0}) {
        CHECK(ldp_exponent(x, a) == doctest::Approx(ldp_exponent(x, b)).epsilon(1e-14));
        const auto fa = optimal_spread_trajectory(x, a);
        const auto fb = optimal_spread_trajectory(x, b);
        CHECK(fa.t == fb.t);
        CHECK(fa.y == fb.y);
    }
}

TEST_CASE("optimal price trajectories split the opening by alpha+ and beta-") {
    for (double x : {4.5, 9.0, 18.0}) {
        const auto [bid, ask] = optimal_price_trajectories(x, kFitted);
        bid.validate();
        ask.validate();
        CHECK(ask.y.back() - bid.y.back() == doctest::Approx(x).epsilon(1e-12));
        CHECK(ask.y.back() / -bid.y.back() == doctest::Approx(5.0 / 4.0).epsilon(1e-12));
        CHECK(bid.y.back() <= 0.0);
        for (double s : bid.slopes()) CHECK(s <= 1e-15);
        for (double s : ask.slopes()) CHECK(s >= -1e-15);
    }
    // below capacity both prices stay flat until the climb starts
    const auto [bid, ask] = optimal_price_trajectories(4.5, kFitted);
    CHECK(bid.value(0.49) == 0.0);
    CHECK(ask.value(0.49) == 0.0);
}
