#include <doctest.h>

#include <cmath>
#include <vector>

#include "lobflux/model.hpp"

using namespace lobflux;

TEST_CASE("parameter accessors at the fitted quadruple") {
    const HcParams p(5.0, 3.0, 2.0, 4.0);
    CHECK(p.gamma_plus() == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(p.gamma_minus() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(p.gamma() == doctest::Approx(14.0).epsilon(1e-15));
    CHECK(p.p() == doctest::Approx(9.0 / 14.0).epsilon(1e-15));
    CHECK(p.q() == doctest::Approx(5.0 / 14.0).epsilon(1e-15));
}

TEST_CASE("parameter validation rejects nonpositive rates") {
    CHECK_THROWS_AS(HcParams(0.0, 3, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(HcParams(5, -1.0, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(NcParams(5, 3, 0.0, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(NcParams(5, 3, 2, 4, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(LlgParams(5, 3, 2, 4, 0.0, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(LlgParams(5, 3, 2, 4, 1, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BookState(3, 3), std::invalid_argument);
    CHECK_THROWS_AS(BookState(4, 3), std::invalid_argument);
    CHECK(BookState(-7, 2).spread() == 9);
}

TEST_CASE("hc transition law rates at spread 1 and 5") {
    const HcParams p(5.0, 3.0, 2.0, 4.0);
    const auto cat = CatastropheDist::uniform();

    const TransitionLaw at1 = hc_rates(BookState(0, 1), p, cat);
    CHECK(at1.total_rate() == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(at1.rate_of(Side::ask, Direction::up, 1) == doctest::Approx(5.0));
    CHECK(at1.rate_of(Side::bid, Direction::down, 1) == doctest::Approx(4.0));
    CHECK(at1.rate_of(Side::ask, Direction::down, 1) == 0.0);
    CHECK(at1.rate_of(Side::bid, Direction::up, 1) == 0.0);

    const TransitionLaw at5 = hc_rates(BookState(0, 5), p, cat);
    CHECK(at5.total_rate() == doctest::Approx(14.0).epsilon(1e-15));
    for (std::int64_t d = 1; d <= 4; ++d) {
        CHECK(at5.rate_of(Side::ask, Direction::down, d) == doctest::Approx(3.0 / 4.0));
        CHECK(at5.rate_of(Side::bid, Direction::up, d) == doctest::Approx(2.0 / 4.0));
    }
    CHECK(at5.rate_of(Side::ask, Direction::down, 5) == 0.0);
}

TEST_CASE("nc per-delta closing rate is the exact power law") {
    const NcParams p(5.0, 3.0, 2.0, 4.0, 1.5);
    const TransitionLaw law = nc_rates(BookState(0, 6), p);
    for (std::int64_t d = 1; d <= 5; ++d) {
        const double want = std::pow(static_cast<double>(d), -1.5);
        CHECK(law.rate_of(Side::ask, Direction::down, d) ==
              doctest::Approx(3.0 * want).epsilon(1e-12));
        CHECK(law.rate_of(Side::bid, Direction::up, d) ==
              doctest::Approx(2.0 * want).epsilon(1e-12));
    }
}

TEST_CASE("llg law: damped rates, geometric openings, truncated closings") {
    const LlgParams p(5.0, 3.0, 2.0, 4.0, 1.2, 0.8, 0.4);
    const std::int64_t k = 7;
    const TransitionLaw law = llg_rates(BookState(0, k), p);
    const double da = std::pow(7.0, -1.2), db = std::pow(7.0, -0.8);
    double widen_total = 0.0, narrow_total = 0.0;
    for (const auto& c : law.classes) {
        const bool widens = (c.side == Side::ask) == (c.dir == Direction::up);
        (widens ? widen_total : narrow_total) += c.rate;
    }
    CHECK(widen_total == doctest::Approx(5.0 * da + 4.0 * db).epsilon(1e-12));
    CHECK(narrow_total == doctest::Approx(3.0 * da + 2.0 * db).epsilon(1e-12));
    // opening increments unbounded, closings confined to {1..k-1}
    CHECK(law.rate_of(Side::ask, Direction::up, 25) > 0.0);
    CHECK(law.rate_of(Side::ask, Direction::down, k - 1) > 0.0);
    CHECK(law.rate_of(Side::ask, Direction::down, k) == 0.0);
}

TEST_CASE("spread law marginalizes the book law in every regime") {
    const std::vector<RegimeSpec> regimes = {
        RegimeSpec::hc(HcParams(5, 3, 2, 4)),
        RegimeSpec::hc(HcParams(1.7, 0.3, 0.9, 2.2), CatastropheDist::two_part(0.7, 2.0)),
        RegimeSpec::nc(NcParams(5, 3, 2, 4, 1.3)),
        RegimeSpec::llg(LlgParams(5, 3, 2, 4, 1.1, 0.6, 0.35)),
    };
    for (const auto& regime : regimes) {
        for (std::int64_t k = 1; k <= 50; ++k) {
            const TransitionLaw book = regime.book_law(BookState(0, k));
            const TransitionLaw spread = regime.spread_law(k);
            CHECK(book.total_rate() == doctest::Approx(spread.total_rate()).epsilon(1e-12));
            for (std::int64_t d = 1; d <= 60; ++d) {
                // spread widens on ask-up / bid-down, narrows on ask-down / bid-up
                const double widen = book.rate_of(Side::ask, Direction::up, d) +
                                     book.rate_of(Side::bid, Direction::down, d);
                const double narrow = book.rate_of(Side::ask, Direction::down, d) +
                                      book.rate_of(Side::bid, Direction::up, d);
                CHECK(spread.rate_of(Direction::up, d) ==
                      doctest::Approx(widen).epsilon(1e-12));
                CHECK(spread.rate_of(Direction::down, d) ==
                      doctest::Approx(narrow).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("catastrophe laws normalize and respect the almost-uniform bound") {
    const auto uniform = CatastropheDist::uniform();
    const auto two_part = CatastropheDist::two_part(0.7, 2.0);
    for (std::int64_t k : {2, 3, 10, 101, 1000, 10000}) {
        for (const auto* cat : {&uniform, &two_part}) {
            const auto q = cat->probabilities(k);
            REQUIRE(q.size() == static_cast<std::size_t>(k - 1));
            double total = 0.0;
            for (double v : q) total += v;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            const double m = static_cast<double>(k - 1);
            const double c = cat->is_uniform() ? 1.0 : cat->bound_constant();
            for (double v : q) {
                CHECK(v >= 1.0 / (c * m) * (1.0 - 1e-12));
                CHECK(v <= c / m * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("almost-uniform bound violations are rejected") {
    // ratio to uniform approaches 1.9 in the first half; c = 1.5 cannot hold
    const auto bad = CatastropheDist::two_part(0.95, 1.5);
    CHECK_THROWS_AS(bad.probabilities(100), std::runtime_error);
    CHECK_THROWS_AS(CatastropheDist::two_part(0.7, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CatastropheDist::uniform().probabilities(1), std::invalid_argument);
}

TEST_CASE("increment distributions: pmf mass and support edges") {
    const auto tg = IncrementDist::truncated_geometric(0.3, 8);
    double total = 0.0;
    for (std::int64_t d = 1; d <= 8; ++d) total += tg.pmf(d);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tg.pmf(9) == 0.0);

    const auto g = IncrementDist::geometric(0.25);
    CHECK(g.max_delta() == 0);
    CHECK(g.pmf(1) == doctest::Approx(0.25));
    CHECK(g.pmf(3) == doctest::Approx(0.25 * 0.75 * 0.75));

    const auto u = IncrementDist::uniform_range(4);
    CHECK(u.pmf(4) == doctest::Approx(0.25));
    CHECK(u.pmf(5) == 0.0);
    CHECK(IncrementDist::unit().degenerate());
    CHECK_FALSE(u.degenerate());
    CHECK_THROWS_AS(IncrementDist::table({0.5, 0.6}), std::invalid_argument);
}

TEST_CASE("increment sampling frequencies match the pmf") {
    Rng rng(20240817);
    const auto laws = {IncrementDist::uniform_range(5),
                       IncrementDist::truncated_geometric(0.35, 6),
                       IncrementDist::table({0.1, 0.2, 0.3, 0.4})};
    for (const auto& law : laws) {
        std::vector<double> freq(16, 0.0);
        const int n = 200000;
        for (int i = 0; i < n; ++i) freq[static_cast<std::size_t>(law.sample(rng) - 1)] += 1.0;
        double tv = 0.0;
        for (std::int64_t d = 1; d <= 16; ++d)
            tv += std::abs(freq[static_cast<std::size_t>(d - 1)] / n - law.pmf(d));
        CHECK(0.5 * tv < 0.01);
    }
}

TEST_CASE("regime specs serialize and round-trip") {
    const std::vector<RegimeSpec> regimes = {
        RegimeSpec::hc(HcParams(5, 3, 2, 4)),
        RegimeSpec::hc(HcParams(5, 3, 2, 4), CatastropheDist::two_part(0.6, 3.0)),
        RegimeSpec::nc(NcParams(5, 3, 2, 4, 1.5)),
        RegimeSpec::llg(LlgParams(5, 3, 2, 4, 1.2, 0.8, 0.4)),
    };
    for (const auto& regime : regimes) {
        const json j = regime.to_json();
        CHECK(RegimeSpec::from_json(j).to_json() == j);
    }
    CHECK_THROWS_AS(RegimeSpec::from_json(json{{"regime", "xx"}, {"alpha_plus", 1},
                                               {"alpha_minus", 1}, {"beta_plus", 1},
                                               {"beta_minus", 1}}),
                    std::invalid_argument);
}
