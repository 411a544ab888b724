#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lobflux/analytics.hpp"
#include "lobflux/model.hpp"

namespace lobflux {

enum class Verdict { pass, fail, informational };
const char* to_string(Verdict v);

// Outcome of one statistical check. Everything needed for exact replay
// (seed, sizes, targets) lives in the payload; wall-clock time stays out of
// it so payloads are byte-stable.
struct CheckReport {
    std::string name;
    json target;
    json estimate;
    std::int64_t replicas = 0;
    std::uint64_t seed = 0;
    Verdict verdict = Verdict::informational;
    double runtime_s = 0.0;
    json details;

    json payload_json() const;
    json meta_json() const;
};

struct VerifyOptions {
    int threads = 1;  // 0 = hardware concurrency
    // Runs the check against a deliberately falsified target; a healthy
    // harness must then report fail.
    bool negative_control = false;
};

// Time-weighted spread occupancy vs stationary_mu, plus jump-count occupancy
// vs stationary_pi; both TV distances must stay below 0.01.
CheckReport check_invariant_occupancy(const HcParams& params, double T, std::uint64_t seed,
                                      const VerifyOptions& opts = {});

// Mean of P_b(T)/T over replicas at the largest T vs the generator closed
// form; theorem-statement and v*gamma variants are quantified alongside.
CheckReport check_lln(const HcParams& params, const std::vector<double>& T_list,
                      std::int64_t replicas, std::uint64_t seed,
                      const VerifyOptions& opts = {});

// Moment-based normality bands on the standardized embedded price.
CheckReport check_clt(const HcParams& params, std::int64_t n, std::int64_t replicas,
                      std::uint64_t seed, const VerifyOptions& opts = {});

// Empirical -ln P(S_T(1) > x)/T per horizon vs ldp_exponent(x); verdict is a
// 25%-relative band at the largest usable horizon.
CheckReport check_ldp_decay(const HcParams& params, double x,
                            const std::vector<double>& T_list, std::int64_t replicas,
                            std::uint64_t seed, const VerifyOptions& opts = {});

// Conditioned on S_T(1) >= x, the median sup-distance to the optimal
// trajectory must shrink with T; unconditioned paths are the negative control.
CheckReport check_trajectory_concentration(const HcParams& params, double x,
                                           const std::vector<double>& T_list,
                                           std::int64_t replicas, std::uint64_t seed,
                                           const VerifyOptions& opts = {});

// Bid-ask bounce: lag-1 autocorrelation of per-event bid returns negative
// with 99% CI excluding zero, and vanishing under time aggregation.
CheckReport check_acf(const HcParams& params, double T, std::uint64_t seed, int max_lag = 20,
                      const VerifyOptions& opts = {});

// Medians of sup_t S(tT)/T^b across horizons should decrease (soft check).
CheckReport check_max_growth(const HcParams& params, double b,
                             const std::vector<double>& T_list, std::int64_t replicas,
                             std::uint64_t seed, const VerifyOptions& opts = {});

}  // namespace lobflux
