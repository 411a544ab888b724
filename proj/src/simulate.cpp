#include "lobflux/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace lobflux {

PathSample simulate_book(const RegimeSpec& regime, BookState initial, double horizon,
                         std::uint64_t seed, std::uint64_t max_events) {
    PathSample path{initial, {}, horizon, seed};
    simulate_book_stream(
        regime, initial, horizon, seed,
        [&path](const EventRecord& ev) { path.events.push_back(ev); }, max_events);
    return path;
}

SpreadPath simulate_spread(const RegimeSpec& regime, std::int64_t k0, double horizon,
                           std::uint64_t seed, std::uint64_t max_events) {
    SpreadPath path{k0, {}, horizon, seed};
    simulate_spread_stream(
        regime, k0, horizon, seed,
        [&path](const SpreadEvent& ev) { path.events.push_back(ev); }, max_events);
    return path;
}

std::vector<std::int64_t> embedded_spread_chain(const HcParams& params, std::int64_t n_steps,
                                                std::uint64_t seed, Embedding embedding) {
    if (n_steps < 1) throw std::invalid_argument("embedded_spread_chain: needs n_steps >= 1");
    const double p = params.p();
    Rng rng(seed);
    std::vector<std::int64_t> s(static_cast<std::size_t>(n_steps) + 1);
    s[0] = 1;
    std::int64_t k = 1;
    for (std::int64_t n = 1; n <= n_steps; ++n) {
        if (k == 1) {
            if (embedding == Embedding::jump_skeleton) {
                k = 2;  // p(1,2) = 1, no draw
            } else if (rng.uniform() < p) {
                k = 2;  // uniformization: self-loop at 1 otherwise
            }
        } else if (rng.uniform() < p) {
            k += 1;
        } else {
            k = rng.uniform_int(1, k - 1);
        }
        s[static_cast<std::size_t>(n)] = k;
    }
    return s;
}

std::int64_t price_increment_F(std::int64_t s_prev, std::int64_t s_next, double u,
                               const HcParams& params) {
    if (s_prev < 1 || s_next < 1)
        throw std::invalid_argument("price_increment_F: spreads must be >= 1");
    if (s_next == s_prev + 1)
        return u < params.beta_minus / params.gamma_plus() ? -1 : 0;
    if (s_next < s_prev)
        return u < params.beta_plus / params.gamma_minus() ? s_prev - s_next : 0;
    throw std::invalid_argument("price_increment_F: illegal embedded transition");
}

std::vector<std::int64_t> simulate_embedded_price(const HcParams& params,
                                                  std::int64_t n_steps, std::uint64_t seed) {
    if (n_steps < 1) throw std::invalid_argument("simulate_embedded_price: needs n_steps >= 1");
    const double p = params.p();
    Rng rng(seed);
    std::vector<std::int64_t> price(static_cast<std::size_t>(n_steps) + 1);
    price[0] = 0;
    std::int64_t k = 1;
    std::int64_t acc = 0;
    for (std::int64_t n = 1; n <= n_steps; ++n) {
        std::int64_t next;
        if (k == 1)
            next = 2;
        else if (rng.uniform() < p)
            next = k + 1;
        else
            next = rng.uniform_int(1, k - 1);
        acc += price_increment_F(k, next, rng.uniform(), params);
        k = next;
        price[static_cast<std::size_t>(n)] = acc;
    }
    return price;
}

std::vector<ScaledPoint> scaled_spread(const RegimeSpec& regime, double T, int n_grid,
                                       std::uint64_t seed, std::uint64_t max_events) {
    if (!(T > 0.0)) throw std::invalid_argument("scaled_spread: needs T > 0");
    if (n_grid < 2) throw std::invalid_argument("scaled_spread: needs n_grid >= 2");
    const SpreadPath path = simulate_spread(regime, 1, T, seed, max_events);
    std::vector<ScaledPoint> out;
    out.reserve(path.events.size() + static_cast<std::size_t>(n_grid));
    std::size_t next_event = 0;
    std::int64_t k = path.k0;
    for (int i = 0; i < n_grid; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_grid - 1);
        // retained jump times before the next grid point
        while (next_event < path.events.size() && path.events[next_event].t / T <= t) {
            const auto& ev = path.events[next_event++];
            k = ev.k;
            if (ev.t / T < t)
                out.push_back({ev.t / T, static_cast<double>(k) / T});
        }
        out.push_back({t, static_cast<double>(k) / T});
    }
    return out;
}

}  // namespace lobflux
