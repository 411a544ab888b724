#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lobflux/rng.hpp"

namespace lobflux {

using json = nlohmann::json;

enum class Side { bid, ask };
enum class Direction { up, down };

const char* to_string(Side s);
const char* to_string(Direction d);
Side side_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);

// Highly competitive regime: unit spread openings, uniform (or almost-uniform)
// spread closings.
struct HcParams {
    double alpha_plus;
    double alpha_minus;
    double beta_plus;
    double beta_minus;

    HcParams(double ap, double am, double bp, double bm)
        : alpha_plus(ap), alpha_minus(am), beta_plus(bp), beta_minus(bm) {
        if (!(ap > 0.0 && am > 0.0 && bp > 0.0 && bm > 0.0))
            throw std::invalid_argument("HcParams: all rates must be strictly positive");
    }

    double gamma_plus() const { return beta_minus + alpha_plus; }
    double gamma_minus() const { return beta_plus + alpha_minus; }
    double gamma() const { return gamma_plus() + gamma_minus(); }
    double p() const { return gamma_plus() / gamma(); }
    double q() const { return gamma_minus() / gamma(); }
};

// Non-competitive regime: unit openings, polynomial (delta^-mu) closings.
struct NcParams {
    double alpha_plus;
    double alpha_minus;
    double beta_plus;
    double beta_minus;
    double mu;  // closing exponent

    NcParams(double ap, double am, double bp, double bm, double mu_)
        : alpha_plus(ap), alpha_minus(am), beta_plus(bp), beta_minus(bm), mu(mu_) {
        if (!(ap > 0.0 && am > 0.0 && bp > 0.0 && bm > 0.0))
            throw std::invalid_argument("NcParams: all rates must be strictly positive");
        if (!(mu >= 0.0))
            throw std::invalid_argument("NcParams: mu must be nonnegative");
    }
};

// Low liquidity with gaps: geometric multi-tick openings, truncated-geometric
// closings, class rates damped by the current spread.
struct LlgParams {
    double alpha_plus;
    double alpha_minus;
    double beta_plus;
    double beta_minus;
    double kappa_a;
    double kappa_b;
    double theta;  // geometric increment parameter, in (0,1)

    LlgParams(double ap, double am, double bp, double bm, double ka, double kb, double th)
        : alpha_plus(ap), alpha_minus(am), beta_plus(bp), beta_minus(bm),
          kappa_a(ka), kappa_b(kb), theta(th) {
        if (!(ap > 0.0 && am > 0.0 && bp > 0.0 && bm > 0.0))
            throw std::invalid_argument("LlgParams: all rates must be strictly positive");
        if (!(ka > 0.0 && kb > 0.0))
            throw std::invalid_argument("LlgParams: exponents must be strictly positive");
        if (!(th > 0.0 && th < 1.0))
            throw std::invalid_argument("LlgParams: theta must lie strictly inside (0,1)");
    }
};

// Best bid/ask on the tick lattice. The bid is allowed to range over all of Z
// (prices recentered at zero are fine); only bid < ask is enforced.
struct BookState {
    std::int64_t bid;
    std::int64_t ask;

    BookState(std::int64_t b, std::int64_t a) : bid(b), ask(a) {
        if (!(b < a)) throw std::invalid_argument("BookState: requires bid < ask");
    }

    std::int64_t spread() const { return ask - bid; }
    bool operator==(const BookState& o) const { return bid == o.bid && ask == o.ask; }
};

// Distribution of a positive integer jump increment. Laws with unbounded
// support (geometric) are never materialized; pmf and sampling are exact.
class IncrementDist {
public:
    static IncrementDist unit();
    static IncrementDist uniform_range(std::int64_t n);  // uniform on {1,...,n}
    static IncrementDist table(std::vector<double> probs);  // probs[i] = P(delta = i+1)
    static IncrementDist geometric(double theta);
    static IncrementDist truncated_geometric(double theta, std::int64_t k_max);

    double pmf(std::int64_t delta) const;
    std::int64_t sample(Rng& rng) const;
    // 0 means unbounded support
    std::int64_t max_delta() const;
    // degenerate laws consume no randomness when sampled
    bool degenerate() const { return kind_ == Kind::unit; }

private:
    enum class Kind { unit, uniform_range, table, geometric, truncated_geometric };
    IncrementDist(Kind k) : kind_(k) {}

    Kind kind_;
    double theta_ = 0.0;
    std::int64_t n_ = 1;
    std::vector<double> probs_;
    std::vector<double> cdf_;
};

// Spread-closing distribution Q_i(k) on I_k = {1,...,k-1}.
class CatastropheDist {
public:
    using WeightFn = std::function<double(std::int64_t k, std::int64_t i)>;

    static CatastropheDist uniform();
    // Arbitrary weight generator with an almost-uniform bound constant c > 1;
    // the bound 1/(c(k-1)) <= Q_i(k) <= c/(k-1) is checked on every use.
    static CatastropheDist almost_uniform(WeightFn weights, double c);
    // Built-in almost-uniform example: I_k split into a first and second half,
    // the first half carrying total weight `first_part_weight`, each half
    // uniform inside itself.
    static CatastropheDist two_part(double first_part_weight, double c);

    bool is_uniform() const { return kind_ == Kind::uniform; }
    double bound_constant() const { return c_; }
    // normalized Q_i(k), i = 1..k-1; throws if the almost-uniform bound fails
    std::vector<double> probabilities(std::int64_t k) const;
    IncrementDist law(std::int64_t k) const;

    json to_json() const;
    static CatastropheDist from_json(const json& j);

private:
    enum class Kind { uniform, almost_uniform };
    CatastropheDist(Kind k) : kind_(k) {}

    Kind kind_;
    double c_ = 1.0;
    WeightFn weights_;
    double first_part_weight_ = -1.0;  // >= 0 only for the two_part built-in
};

struct MoveClass {
    Side side;
    Direction dir;
    double rate;  // total class rate
    IncrementDist increment;
};

struct RateEntry {
    Side side;
    Direction dir;
    std::int64_t delta;
    double rate;
};

// All transitions available at one state, grouped into move classes so laws
// with unbounded increment support stay finite objects.
struct TransitionLaw {
    std::vector<MoveClass> classes;

    double total_rate() const;
    double rate_of(Side side, Direction dir, std::int64_t delta) const;
    // side-marginal rate, used to compare book and spread laws
    double rate_of(Direction dir, std::int64_t delta) const;
    std::vector<RateEntry> expand(std::int64_t max_delta) const;
    // pick a class index proportional to rate; consumes one uniform
    std::size_t sample_class(Rng& rng) const;
};

TransitionLaw hc_rates(const BookState& state, const HcParams& params,
                       const CatastropheDist& cat);
TransitionLaw nc_rates(const BookState& state, const NcParams& params);
TransitionLaw llg_rates(const BookState& state, const LlgParams& params);

// Tagged union over the three regime parameterizations; the single source of
// all transition rates.
class RegimeSpec {
public:
    enum class Kind { hc, nc, llg };

    static RegimeSpec hc(HcParams params, CatastropheDist cat = CatastropheDist::uniform());
    static RegimeSpec nc(NcParams params);
    static RegimeSpec llg(LlgParams params);

    Kind kind() const;
    const HcParams& hc_params() const;
    const CatastropheDist& catastrophe() const;
    const NcParams& nc_params() const;
    const LlgParams& llg_params() const;

    TransitionLaw book_law(const BookState& state) const;
    TransitionLaw spread_law(std::int64_t k) const;

    json to_json() const;
    static RegimeSpec from_json(const json& j);

private:
    struct HcRegime {
        HcParams params;
        CatastropheDist cat;
    };
    explicit RegimeSpec(std::variant<HcRegime, NcParams, LlgParams> v) : v_(std::move(v)) {}
    std::variant<HcRegime, NcParams, LlgParams> v_;
};

// Marginal spread transition law; free-function form of RegimeSpec::spread_law.
TransitionLaw spread_law(std::int64_t k, const RegimeSpec& regime);

}  // namespace lobflux
