#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "lobflux/model.hpp"

namespace lobflux {

struct EventRecord {
    double t;
    Side side;
    Direction dir;
    std::int64_t delta;
    BookState after;

    bool operator==(const EventRecord& o) const {
        return t == o.t && side == o.side && dir == o.dir && delta == o.delta &&
               after == o.after;
    }
};

struct PathSample {
    BookState initial;
    std::vector<EventRecord> events;
    double horizon;
    std::uint64_t seed;

    BookState final_state() const { return events.empty() ? initial : events.back().after; }
};

struct SpreadEvent {
    double t;
    std::int64_t k;  // spread after the jump
};

struct SpreadPath {
    std::int64_t k0;
    std::vector<SpreadEvent> events;
    double horizon;
    std::uint64_t seed;

    std::int64_t final_spread() const { return events.empty() ? k0 : events.back().k; }
};

// Guard against explosion in the LLG regime (rates there are unbounded in k
// only through the damping exponents; HC/NC have bounded per-event rates).
inline constexpr std::uint64_t kDefaultMaxEvents = 1ull << 33;

struct SimulationOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Per-spread law cache: every regime's law depends on the state only through
// the spread, so paths reuse laws instead of rebuilding them each event.
class LawCache {
public:
    explicit LawCache(const RegimeSpec& regime) : regime_(&regime) {}

    const TransitionLaw& spread(std::int64_t k) {
        return fetch(spread_laws_, k, /*book=*/false);
    }
    const TransitionLaw& book(std::int64_t k) { return fetch(book_laws_, k, /*book=*/true); }

private:
    const TransitionLaw& fetch(std::vector<std::unique_ptr<TransitionLaw>>& laws,
                               std::int64_t k, bool book) {
        if (k > static_cast<std::int64_t>(laws.size()))
            laws.resize(static_cast<std::size_t>(k));
        auto& slot = laws[static_cast<std::size_t>(k - 1)];
        if (!slot)
            slot = std::make_unique<TransitionLaw>(
                book ? regime_->book_law(BookState(0, k)) : regime_->spread_law(k));
        return *slot;
    }

    const RegimeSpec* regime_;
    std::vector<std::unique_ptr<TransitionLaw>> spread_laws_;
    std::vector<std::unique_ptr<TransitionLaw>> book_laws_;
};

}  // namespace detail

// Exact event-driven path of the book chain. Per event the draw order is
// fixed: holding time, move class, then the increment (degenerate increments
// consume no draw). `sink(event)` is invoked for every event inside the
// horizon.
template <class Sink>
void simulate_book_stream(const RegimeSpec& regime, BookState initial, double horizon,
                          std::uint64_t seed, Sink&& sink,
                          std::uint64_t max_events = kDefaultMaxEvents) {
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_book: needs horizon > 0");
    Rng rng(seed);
    detail::LawCache cache(regime);
    BookState state = initial;
    double t = 0.0;
    for (std::uint64_t n = 0;; ++n) {
        if (n >= max_events)
            throw SimulationOverflow("simulate_book: event ceiling reached before horizon");
        const TransitionLaw& law = cache.book(state.spread());
        t += rng.exponential(law.total_rate());
        if (t > horizon) break;
        const MoveClass& mc = law.classes[law.sample_class(rng)];
        const std::int64_t delta = mc.increment.sample(rng);
        const std::int64_t signed_delta = mc.dir == Direction::up ? delta : -delta;
        if (mc.side == Side::bid)
            state = BookState(state.bid + signed_delta, state.ask);
        else
            state = BookState(state.bid, state.ask + signed_delta);
        sink(EventRecord{t, mc.side, mc.dir, delta, state});
    }
}

PathSample simulate_book(const RegimeSpec& regime, BookState initial, double horizon,
                         std::uint64_t seed, std::uint64_t max_events = kDefaultMaxEvents);

// Spread-only path; same draw order contract as simulate_book.
template <class Sink>
void simulate_spread_stream(const RegimeSpec& regime, std::int64_t k0, double horizon,
                            std::uint64_t seed, Sink&& sink,
                            std::uint64_t max_events = kDefaultMaxEvents) {
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_spread: needs horizon > 0");
    if (k0 < 1) throw std::invalid_argument("simulate_spread: needs k0 >= 1");
    Rng rng(seed);
    detail::LawCache cache(regime);
    std::int64_t k = k0;
    double t = 0.0;
    for (std::uint64_t n = 0;; ++n) {
        if (n >= max_events)
            throw SimulationOverflow("simulate_spread: event ceiling reached before horizon");
        const TransitionLaw& law = cache.spread(k);
        t += rng.exponential(law.total_rate());
        if (t > horizon) break;
        const MoveClass& mc = law.classes[law.sample_class(rng)];
        const std::int64_t delta = mc.increment.sample(rng);
        k += mc.dir == Direction::up ? delta : -delta;
        sink(SpreadEvent{t, k});
    }
}

SpreadPath simulate_spread(const RegimeSpec& regime, std::int64_t k0, double horizon,
                           std::uint64_t seed, std::uint64_t max_events = kDefaultMaxEvents);

// Which discrete-time embedding of the spread chain to use. The jump skeleton
// has p(1,2) = 1; uniformization instead keeps a self-loop at spread 1 with
// probability gamma-/gamma, so both jump-intensity conventions can be
// compared empirically.
enum class Embedding { jump_skeleton, uniformization };

// Embedded spread chain s_0 = 1, ..., s_n. One uniform decides the move
// direction at k > 1 (none is consumed at k = 1 under the jump skeleton), one
// uniform integer draws the catastrophe target.
std::vector<std::int64_t> embedded_spread_chain(const HcParams& params, std::int64_t n_steps,
                                                std::uint64_t seed,
                                                Embedding embedding = Embedding::jump_skeleton);

// Price increment accompanying one embedded spread transition.
std::int64_t price_increment_F(std::int64_t s_prev, std::int64_t s_next, double u,
                               const HcParams& params);

// Cumulative sums p_0 = 0, ..., p_n of price_increment_F along the embedded
// chain; per step the chain draws come first, then F's uniform.
std::vector<std::int64_t> simulate_embedded_price(const HcParams& params,
                                                  std::int64_t n_steps, std::uint64_t seed);

struct ScaledPoint {
    double t;  // in [0,1]
    double value;
};

// S_T(t) = S(tT)/T sampled on an n_grid-point grid plus all retained jump
// times; starts from spread 1.
std::vector<ScaledPoint> scaled_spread(const RegimeSpec& regime, double T, int n_grid,
                                       std::uint64_t seed,
                                       std::uint64_t max_events = kDefaultMaxEvents);

}  // namespace lobflux
