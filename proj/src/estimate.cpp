#include "lobflux/estimate.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

namespace lobflux {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(line, "malformed number: '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& s, std::size_t line) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(line, "malformed integer: '" + s + "'");
    return v;
}

}  // namespace

EventLog parse_event_log(std::istream& source, double t_obs) {
    EventLog log{{}, 0.0, 1.0};
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool has_book = false;
    double last_t = -1.0;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (!header_seen) {
            if (fields.size() == 6 && fields[4] == "bid" && fields[5] == "ask")
                has_book = true;
            else if (fields.size() != 4)
                throw ParseError(line_no, "expected header t,side,direction,delta[,bid,ask]");
            if (fields[0] != "t" || fields[1] != "side" || fields[2] != "direction" ||
                fields[3] != "delta")
                throw ParseError(line_no, "expected header t,side,direction,delta[,bid,ask]");
            header_seen = true;
            continue;
        }
        if (fields.size() != (has_book ? 6u : 4u))
            throw ParseError(line_no, "wrong field count");
        const double t = parse_double(fields[0], line_no);
        if (t < last_t) throw ParseError(line_no, "timestamps must be nondecreasing");
        last_t = t;
        Side side;
        Direction dir;
        try {
            side = side_from_string(fields[1]);
            dir = direction_from_string(fields[2]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
        const std::int64_t delta = parse_int(fields[3], line_no);
        if (delta < 1) throw ParseError(line_no, "delta must be >= 1");
        std::int64_t bid = 0, ask = 1;
        if (has_book) {
            bid = parse_int(fields[4], line_no);
            ask = parse_int(fields[5], line_no);
            if (bid >= ask) throw ParseError(line_no, "requires bid < ask");
        }
        log.events.push_back({t, side, dir, delta, BookState(bid, ask)});
    }
    if (!header_seen) throw ParseError(line_no, "empty event log");
    log.t_obs = t_obs >= 0.0 ? t_obs : (last_t < 0.0 ? 0.0 : last_t);
    if (log.t_obs < last_t)
        throw ParseError(line_no, "t_obs is smaller than the last timestamp");
    return log;
}

RateEstimate estimate_rates(const EventLog& log) {
    if (!(log.t_obs > 0.0))
        throw std::invalid_argument("estimate_rates: observation window must be positive");
    std::int64_t n_ap = 0, n_am = 0, n_bp = 0, n_bm = 0;
    for (const auto& ev : log.events) {
        if (ev.side == Side::ask)
            (ev.dir == Direction::up ? n_ap : n_am) += 1;
        else
            (ev.dir == Direction::up ? n_bp : n_bm) += 1;
    }
    const double T = log.t_obs;
    auto se = [T](std::int64_t n) { return std::sqrt(static_cast<double>(n)) / T; };
    return RateEstimate{
        static_cast<double>(n_ap) / T, static_cast<double>(n_am) / T,
        static_cast<double>(n_bp) / T, static_cast<double>(n_bm) / T,
        n_ap, n_am, n_bp, n_bm, T,
        se(n_ap), se(n_am), se(n_bp), se(n_bm)};
}

json RateEstimate::to_json() const {
    return json{{"rates",
                 {{"alpha_plus", alpha_plus_hat},
                  {"alpha_minus", alpha_minus_hat},
                  {"beta_plus", beta_plus_hat},
                  {"beta_minus", beta_minus_hat}}},
                {"counts",
                 {{"alpha_plus", n_alpha_plus},
                  {"alpha_minus", n_alpha_minus},
                  {"beta_plus", n_beta_plus},
                  {"beta_minus", n_beta_minus}}},
                {"standard_errors",
                 {{"alpha_plus", se_alpha_plus},
                  {"alpha_minus", se_alpha_minus},
                  {"beta_plus", se_beta_plus},
                  {"beta_minus", se_beta_minus}}},
                {"t_obs", t_obs}};
}

}  // namespace lobflux
