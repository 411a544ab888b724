#include "lobflux/model.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>
#include <unordered_map>
#include <utility>

namespace lobflux {

const char* to_string(Side s) { return s == Side::bid ? "bid" : "ask"; }
const char* to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

Side side_from_string(const std::string& s) {
    if (s == "bid") return Side::bid;
    if (s == "ask") return Side::ask;
    throw std::invalid_argument("unknown side: " + s);
}

Direction direction_from_string(const std::string& s) {
    if (s == "up") return Direction::up;
    if (s == "down") return Direction::down;
    throw std::invalid_argument("unknown direction: " + s);
}

// ---------------------------------------------------------------- increments

IncrementDist IncrementDist::unit() { return IncrementDist(Kind::unit); }

IncrementDist IncrementDist::uniform_range(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("uniform_range: empty support");
    IncrementDist d(Kind::uniform_range);
    d.n_ = n;
    return d;
}

IncrementDist IncrementDist::table(std::vector<double> probs) {
    if (probs.empty()) throw std::invalid_argument("table: empty support");
    IncrementDist d(Kind::table);
    d.cdf_.resize(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < 0.0) throw std::invalid_argument("table: negative probability");
        acc += probs[i];
        d.cdf_[i] = acc;
    }
    if (std::abs(acc - 1.0) > 1e-9)
        throw std::invalid_argument("table: probabilities must sum to 1");
    d.cdf_.back() = 1.0;
    d.probs_ = std::move(probs);
    d.n_ = static_cast<std::int64_t>(d.probs_.size());
    return d;
}

IncrementDist IncrementDist::geometric(double theta) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("geometric: theta must lie in (0,1]");
    IncrementDist d(Kind::geometric);
    d.theta_ = theta;
    return d;
}

IncrementDist IncrementDist::truncated_geometric(double theta, std::int64_t k_max) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("truncated_geometric: theta must lie in (0,1]");
    if (k_max < 1) throw std::invalid_argument("truncated_geometric: empty support");
    IncrementDist d(Kind::truncated_geometric);
    d.theta_ = theta;
    d.n_ = k_max;
    return d;
}

double IncrementDist::pmf(std::int64_t delta) const {
    if (delta < 1) return 0.0;
    switch (kind_) {
        case Kind::unit:
            return delta == 1 ? 1.0 : 0.0;
        case Kind::uniform_range:
            return delta <= n_ ? 1.0 / static_cast<double>(n_) : 0.0;
        case Kind::table:
            return delta <= n_ ? probs_[static_cast<std::size_t>(delta - 1)] : 0.0;
        case Kind::geometric:
            return theta_ * std::pow(1.0 - theta_, static_cast<double>(delta - 1));
        case Kind::truncated_geometric: {
            if (delta > n_) return 0.0;
            const double total =
                -std::expm1(static_cast<double>(n_) * std::log1p(-theta_));
            return theta_ * std::pow(1.0 - theta_, static_cast<double>(delta - 1)) / total;
        }
    }
    return 0.0;
}

std::int64_t IncrementDist::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::unit:
            return 1;
        case Kind::uniform_range:
            return rng.uniform_int(1, n_);
        case Kind::table: {
            const double u = rng.uniform();
            const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
            return 1 + static_cast<std::int64_t>(it - cdf_.begin());
        }
        case Kind::geometric:
            return rng.geometric(theta_);
        case Kind::truncated_geometric:
            return rng.truncated_geometric(theta_, n_);
    }
    return 1;
}

std::int64_t IncrementDist::max_delta() const {
    return kind_ == Kind::geometric ? 0 : n_;
}

// -------------------------------------------------------------- catastrophes

CatastropheDist CatastropheDist::uniform() { return CatastropheDist(Kind::uniform); }

CatastropheDist CatastropheDist::almost_uniform(WeightFn weights, double c) {
    if (!(c > 1.0))
        throw std::invalid_argument("almost_uniform: bound constant c must exceed 1");
    if (!weights) throw std::invalid_argument("almost_uniform: missing weight generator");
    CatastropheDist d(Kind::almost_uniform);
    d.weights_ = std::move(weights);
    d.c_ = c;
    return d;
}

CatastropheDist CatastropheDist::two_part(double first_part_weight, double c) {
    if (!(first_part_weight > 0.0 && first_part_weight < 1.0))
        throw std::invalid_argument("two_part: first part weight must lie in (0,1)");
    const double w1 = first_part_weight;
    auto d = almost_uniform(
        [w1](std::int64_t k, std::int64_t i) {
            const std::int64_t m = k - 1;
            const std::int64_t n1 = (m + 1) / 2;  // first half, rounded up
            if (m == 1) return 1.0;
            if (i <= n1) return w1 / static_cast<double>(n1);
            return (1.0 - w1) / static_cast<double>(m - n1);
        },
        c);
    d.first_part_weight_ = first_part_weight;
    return d;
}

std::vector<double> CatastropheDist::probabilities(std::int64_t k) const {
    if (k < 2) throw std::invalid_argument("CatastropheDist: needs spread k >= 2");
    const std::int64_t m = k - 1;
    std::vector<double> q(static_cast<std::size_t>(m));
    if (kind_ == Kind::uniform) {
        std::fill(q.begin(), q.end(), 1.0 / static_cast<double>(m));
        return q;
    }
    double total = 0.0;
    for (std::int64_t i = 1; i <= m; ++i) {
        const double w = weights_(k, i);
        if (!(w > 0.0)) throw std::runtime_error("CatastropheDist: nonpositive weight");
        q[static_cast<std::size_t>(i - 1)] = w;
        total += w;
    }
    const double lo = 1.0 / (c_ * static_cast<double>(m));
    const double hi = c_ / static_cast<double>(m);
    for (auto& v : q) {
        v /= total;
        if (v < lo * (1.0 - 1e-12) || v > hi * (1.0 + 1e-12))
            throw std::runtime_error("CatastropheDist: almost-uniform bound violated");
    }
    return q;
}

IncrementDist CatastropheDist::law(std::int64_t k) const {
    if (k < 2) throw std::invalid_argument("CatastropheDist: needs spread k >= 2");
    if (kind_ == Kind::uniform) return IncrementDist::uniform_range(k - 1);
    return IncrementDist::table(probabilities(k));
}

json CatastropheDist::to_json() const {
    if (kind_ == Kind::uniform) return json{{"kind", "uniform"}};
    if (first_part_weight_ >= 0.0)
        return json{{"kind", "two_part"},
                    {"first_part_weight", first_part_weight_},
                    {"c", c_}};
    throw std::runtime_error("CatastropheDist: custom generators are not serializable");
}

CatastropheDist CatastropheDist::from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform") return uniform();
    if (kind == "two_part")
        return two_part(j.at("first_part_weight").get<double>(), j.at("c").get<double>());
    throw std::invalid_argument("CatastropheDist: unknown kind: " + kind);
}

// ------------------------------------------------------------ transition law

double TransitionLaw::total_rate() const {
    double r = 0.0;
    for (const auto& c : classes) r += c.rate;
    return r;
}

double TransitionLaw::rate_of(Side side, Direction dir, std::int64_t delta) const {
    double r = 0.0;
    for (const auto& c : classes)
        if (c.side == side && c.dir == dir) r += c.rate * c.increment.pmf(delta);
    return r;
}

double TransitionLaw::rate_of(Direction dir, std::int64_t delta) const {
    double r = 0.0;
    for (const auto& c : classes)
        if (c.dir == dir) r += c.rate * c.increment.pmf(delta);
    return r;
}

std::vector<RateEntry> TransitionLaw::expand(std::int64_t max_delta) const {
    std::vector<RateEntry> out;
    for (const auto& c : classes) {
        std::int64_t top = c.increment.max_delta();
        if (top == 0 || top > max_delta) top = max_delta;
        for (std::int64_t d = 1; d <= top; ++d) {
            const double r = c.rate * c.increment.pmf(d);
            if (r > 0.0) out.push_back({c.side, c.dir, d, r});
        }
    }
    return out;
}

std::size_t TransitionLaw::sample_class(Rng& rng) const {
    const double u = rng.uniform() * total_rate();
    double acc = 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        acc += classes[i].rate;
        if (u < acc) return i;
    }
    return classes.size() - 1;
}

// ---------------------------------------------------------------- regime laws

TransitionLaw hc_rates(const BookState& state, const HcParams& params,
                       const CatastropheDist& cat) {
    const std::int64_t k = state.spread();
    TransitionLaw law;
    law.classes.push_back({Side::ask, Direction::up, params.alpha_plus, IncrementDist::unit()});
    law.classes.push_back({Side::bid, Direction::down, params.beta_minus, IncrementDist::unit()});
    if (k >= 2) {
        const IncrementDist closing = cat.law(k);
        law.classes.push_back({Side::ask, Direction::down, params.alpha_minus, closing});
        law.classes.push_back({Side::bid, Direction::up, params.beta_plus, closing});
    }
    return law;
}

namespace {

// Normalized delta^-mu closing tables, keyed by spread; bounded LRU since LLG/NC
// paths can visit large spreads transiently.
class PowerLawTables {
public:
    explicit PowerLawTables(std::size_t capacity) : capacity_(capacity) {}

    std::shared_ptr<const std::vector<double>> get(double mu, std::int64_t k) {
        const Key key{mu, k};
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = map_.find(key);
        if (it != map_.end()) {
            order_.splice(order_.begin(), order_, it->second.second);
            return it->second.first;
        }
        auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(k - 1));
        double total = 0.0;
        for (std::int64_t d = 1; d < k; ++d)
            total += (*table)[static_cast<std::size_t>(d - 1)] =
                std::pow(static_cast<double>(d), -mu);
        for (auto& v : *table) v /= total;
        order_.push_front(key);
        map_[key] = {table, order_.begin()};
        if (map_.size() > capacity_) {
            map_.erase(order_.back());
            order_.pop_back();
        }
        return table;
    }

private:
    struct Key {
        double mu;
        std::int64_t k;
        bool operator==(const Key& o) const { return mu == o.mu && k == o.k; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& key) const {
            return std::hash<double>()(key.mu) ^ (std::hash<std::int64_t>()(key.k) * 0x9E3779B9u);
        }
    };

    std::size_t capacity_;
    std::mutex mutex_;
    std::list<Key> order_;
    std::unordered_map<Key, std::pair<std::shared_ptr<const std::vector<double>>,
                                      std::list<Key>::iterator>,
                       KeyHash>
        map_;
};

IncrementDist power_law_closing(double mu, std::int64_t k) {
    static PowerLawTables tables(1024);
    return IncrementDist::table(*tables.get(mu, k));
}

// unnormalized total weight sum_{d=1}^{k-1} d^-mu
double power_law_mass(double mu, std::int64_t k) {
    double total = 0.0;
    for (std::int64_t d = 1; d < k; ++d) total += std::pow(static_cast<double>(d), -mu);
    return total;
}

}  // namespace

TransitionLaw nc_rates(const BookState& state, const NcParams& params) {
    const std::int64_t k = state.spread();
    TransitionLaw law;
    law.classes.push_back({Side::ask, Direction::up, params.alpha_plus, IncrementDist::unit()});
    law.classes.push_back({Side::bid, Direction::down, params.beta_minus, IncrementDist::unit()});
    if (k >= 2) {
        const double mass = power_law_mass(params.mu, k);
        const IncrementDist closing = power_law_closing(params.mu, k);
        law.classes.push_back({Side::ask, Direction::down, params.alpha_minus * mass, closing});
        law.classes.push_back({Side::bid, Direction::up, params.beta_plus * mass, closing});
    }
    return law;
}

TransitionLaw llg_rates(const BookState& state, const LlgParams& params) {
    const std::int64_t k = state.spread();
    const double damp_a = std::pow(static_cast<double>(k), -params.kappa_a);
    const double damp_b = std::pow(static_cast<double>(k), -params.kappa_b);
    TransitionLaw law;
    const IncrementDist opening = IncrementDist::geometric(params.theta);
    law.classes.push_back({Side::ask, Direction::up, params.alpha_plus * damp_a, opening});
    law.classes.push_back({Side::bid, Direction::down, params.beta_minus * damp_b, opening});
    if (k >= 2) {
        const IncrementDist closing = IncrementDist::truncated_geometric(params.theta, k - 1);
        law.classes.push_back({Side::ask, Direction::down, params.alpha_minus * damp_a, closing});
        law.classes.push_back({Side::bid, Direction::up, params.beta_plus * damp_b, closing});
    }
    return law;
}

// ----------------------------------------------------------------- RegimeSpec

RegimeSpec RegimeSpec::hc(HcParams params, CatastropheDist cat) {
    return RegimeSpec(HcRegime{params, std::move(cat)});
}
RegimeSpec RegimeSpec::nc(NcParams params) { return RegimeSpec(std::move(params)); }
RegimeSpec RegimeSpec::llg(LlgParams params) { return RegimeSpec(std::move(params)); }

RegimeSpec::Kind RegimeSpec::kind() const {
    if (std::holds_alternative<HcRegime>(v_)) return Kind::hc;
    if (std::holds_alternative<NcParams>(v_)) return Kind::nc;
    return Kind::llg;
}

const HcParams& RegimeSpec::hc_params() const {
    if (auto* r = std::get_if<HcRegime>(&v_)) return r->params;
    throw std::logic_error("RegimeSpec: not a highly-competitive regime");
}

const CatastropheDist& RegimeSpec::catastrophe() const {
    if (auto* r = std::get_if<HcRegime>(&v_)) return r->cat;
    throw std::logic_error("RegimeSpec: not a highly-competitive regime");
}

const NcParams& RegimeSpec::nc_params() const {
    if (auto* r = std::get_if<NcParams>(&v_)) return *r;
    throw std::logic_error("RegimeSpec: not a non-competitive regime");
}

const LlgParams& RegimeSpec::llg_params() const {
    if (auto* r = std::get_if<LlgParams>(&v_)) return *r;
    throw std::logic_error("RegimeSpec: not a low-liquidity-with-gaps regime");
}

TransitionLaw RegimeSpec::book_law(const BookState& state) const {
    switch (kind()) {
        case Kind::hc:
            return hc_rates(state, hc_params(), catastrophe());
        case Kind::nc:
            return nc_rates(state, nc_params());
        case Kind::llg:
            return llg_rates(state, llg_params());
    }
    throw std::logic_error("unreachable");
}

TransitionLaw RegimeSpec::spread_law(std::int64_t k) const {
    if (k < 1) throw std::invalid_argument("spread_law: needs k >= 1");
    TransitionLaw law;
    switch (kind()) {
        case Kind::hc: {
            const auto& p = hc_params();
            law.classes.push_back({Side::ask, Direction::up, p.gamma_plus(), IncrementDist::unit()});
            if (k >= 2)
                law.classes.push_back(
                    {Side::ask, Direction::down, p.gamma_minus(), catastrophe().law(k)});
            break;
        }
        case Kind::nc: {
            const auto& p = nc_params();
            law.classes.push_back({Side::ask, Direction::up, p.alpha_plus + p.beta_minus,
                                   IncrementDist::unit()});
            if (k >= 2) {
                const double mass = power_law_mass(p.mu, k);
                law.classes.push_back({Side::ask, Direction::down,
                                       (p.alpha_minus + p.beta_plus) * mass,
                                       power_law_closing(p.mu, k)});
            }
            break;
        }
        case Kind::llg: {
            const auto& p = llg_params();
            const double damp_a = std::pow(static_cast<double>(k), -p.kappa_a);
            const double damp_b = std::pow(static_cast<double>(k), -p.kappa_b);
            law.classes.push_back({Side::ask, Direction::up,
                                   p.alpha_plus * damp_a + p.beta_minus * damp_b,
                                   IncrementDist::geometric(p.theta)});
            if (k >= 2)
                law.classes.push_back({Side::ask, Direction::down,
                                       p.alpha_minus * damp_a + p.beta_plus * damp_b,
                                       IncrementDist::truncated_geometric(p.theta, k - 1)});
            break;
        }
    }
    return law;
}

TransitionLaw spread_law(std::int64_t k, const RegimeSpec& regime) {
    return regime.spread_law(k);
}

json RegimeSpec::to_json() const {
    switch (kind()) {
        case Kind::hc: {
            const auto& p = hc_params();
            return json{{"regime", "hc"},
                        {"alpha_plus", p.alpha_plus},
                        {"alpha_minus", p.alpha_minus},
                        {"beta_plus", p.beta_plus},
                        {"beta_minus", p.beta_minus},
                        {"catastrophe", catastrophe().to_json()}};
        }
        case Kind::nc: {
            const auto& p = nc_params();
            return json{{"regime", "nc"},
                        {"alpha_plus", p.alpha_plus},
                        {"alpha_minus", p.alpha_minus},
                        {"beta_plus", p.beta_plus},
                        {"beta_minus", p.beta_minus},
                        {"mu", p.mu}};
        }
        case Kind::llg: {
            const auto& p = llg_params();
            return json{{"regime", "llg"},
                        {"alpha_plus", p.alpha_plus},
                        {"alpha_minus", p.alpha_minus},
                        {"beta_plus", p.beta_plus},
                        {"beta_minus", p.beta_minus},
                        {"kappa_a", p.kappa_a},
                        {"kappa_b", p.kappa_b},
                        {"theta", p.theta}};
        }
    }
    throw std::logic_error("unreachable");
}

RegimeSpec RegimeSpec::from_json(const json& j) {
    const std::string regime = j.at("regime").get<std::string>();
    const double ap = j.at("alpha_plus").get<double>();
    const double am = j.at("alpha_minus").get<double>();
    const double bp = j.at("beta_plus").get<double>();
    const double bm = j.at("beta_minus").get<double>();
    if (regime == "hc") {
        CatastropheDist cat = j.contains("catastrophe")
                                  ? CatastropheDist::from_json(j.at("catastrophe"))
                                  : CatastropheDist::uniform();
        return hc(HcParams(ap, am, bp, bm), std::move(cat));
    }
    if (regime == "nc") return nc(NcParams(ap, am, bp, bm, j.at("mu").get<double>()));
    if (regime == "llg")
        return llg(LlgParams(ap, am, bp, bm, j.at("kappa_a").get<double>(),
                             j.at("kappa_b").get<double>(), j.at("theta").get<double>()));
    throw std::invalid_argument("RegimeSpec: unknown regime: " + regime);
}

}  // namespace lobflux
