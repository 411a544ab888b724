#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobflux/simulate.hpp"

namespace lobflux {

struct ParseError : std::runtime_error {
    ParseError(std::size_t line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
    std::size_t line;
};

// Recorded or simulated event stream plus its observation window.
struct EventLog {
    std::vector<EventRecord> events;
    double t_obs;           // seconds; >= last timestamp
    double tick_size = 1.0;  // metadata only
};

// Reads the event CSV (header `t,side,direction,delta[,bid,ask]`, optional
// '#'-comment lines). Rows violating nondecreasing time or delta >= 1 are
// rejected with their line number. When t_obs < 0 the last timestamp is used
// as the observation length.
EventLog parse_event_log(std::istream& source, double t_obs = -1.0);

struct RateEstimate {
    double alpha_plus_hat;
    double alpha_minus_hat;
    double beta_plus_hat;
    double beta_minus_hat;
    std::int64_t n_alpha_plus;
    std::int64_t n_alpha_minus;
    std::int64_t n_beta_plus;
    std::int64_t n_beta_minus;
    double t_obs;
    // Poisson standard errors, sqrt(N)/T
    double se_alpha_plus;
    double se_alpha_minus;
    double se_beta_plus;
    double se_beta_minus;

    json to_json() const;
};

// count/T estimators; each event is counted once regardless of its increment.
RateEstimate estimate_rates(const EventLog& log);

}  // namespace lobflux
