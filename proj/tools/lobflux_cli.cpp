// Command-line front end: simulate / analyze / estimate / ldp / verify.
// Every artifact embeds its RunConfig so runs can be replayed exactly;
// wall-clock data goes to separate .meta.json files to keep payloads
// byte-stable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lobflux/analytics.hpp"
#include "lobflux/config.hpp"
#include "lobflux/estimate.hpp"
#include "lobflux/io.hpp"
#include "lobflux/simulate.hpp"
#include "lobflux/verify.hpp"

namespace {

using lobflux::json;

// JSON config files mirroring the flags; nested objects scope subcommands.
class ConfigJSON : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json j;
        for (const CLI::Option* opt : app->get_options({})) {
            if (!opt->get_lnames().empty() && opt->get_configurable()) {
                const std::string name = opt->get_lnames()[0];
                if (opt->get_type_size() != 0) {
                    if (opt->count() == 1)
                        j[name] = opt->results().at(0);
                    else if (opt->count() > 1)
                        j[name] = opt->results();
                    else if (default_also && !opt->get_default_str().empty())
                        j[name] = opt->get_default_str();
                } else if (opt->count() > 0) {
                    j[name] = opt->count() > 1 ? json(opt->count()) : json(true);
                }
            }
        }
        for (const CLI::App* sub : app->get_subcommands({}))
            j[sub->get_name()] = json::parse(to_config(sub, default_also, false, ""));
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        input >> j;
        return from_json_obj(j, "", {});
    }

private:
    static std::vector<CLI::ConfigItem> from_json_obj(const json& j, const std::string& name,
                                                      const std::vector<std::string>& prefix) {
        std::vector<CLI::ConfigItem> results;
        if (j.is_object()) {
            for (auto it = j.cbegin(); it != j.cend(); ++it) {
                auto copy = prefix;
                if (!name.empty()) copy.push_back(name);
                auto sub = from_json_obj(*it, it.key(), copy);
                results.insert(results.end(), sub.begin(), sub.end());
            }
            return results;
        }
        CLI::ConfigItem item;
        item.name = name;
        item.parents = prefix;
        if (j.is_boolean()) {
            item.inputs = {j.get<bool>() ? "true" : "false"};
        } else if (j.is_array()) {
            for (const auto& e : j)
                item.inputs.push_back(e.is_string() ? e.get<std::string>() : e.dump());
        } else if (j.is_string()) {
            item.inputs = {j.get<std::string>()};
        } else {
            item.inputs = {j.dump()};
        }
        results.push_back(item);
        return results;
    }
};

struct RegimeFlags {
    std::string regime = "hc";
    double alpha_plus = 5.0;
    double alpha_minus = 3.0;
    double beta_plus = 2.0;
    double beta_minus = 4.0;
    double mu = 1.0;
    double kappa_a = 1.0;
    double kappa_b = 1.0;
    double theta = 0.5;
    std::string catastrophe = "uniform";
    double cat_first_weight = 0.7;
    double cat_c = 2.0;

    lobflux::RegimeSpec build() const {
        if (regime == "hc") {
            lobflux::CatastropheDist cat =
                catastrophe == "two_part"
                    ? lobflux::CatastropheDist::two_part(cat_first_weight, cat_c)
                    : lobflux::CatastropheDist::uniform();
            return lobflux::RegimeSpec::hc(
                lobflux::HcParams(alpha_plus, alpha_minus, beta_plus, beta_minus),
                std::move(cat));
        }
        if (regime == "nc")
            return lobflux::RegimeSpec::nc(
                lobflux::NcParams(alpha_plus, alpha_minus, beta_plus, beta_minus, mu));
        if (regime == "llg")
            return lobflux::RegimeSpec::llg(lobflux::LlgParams(
                alpha_plus, alpha_minus, beta_plus, beta_minus, kappa_a, kappa_b, theta));
        throw CLI::ValidationError("--regime must be hc, nc or llg");
    }

    lobflux::HcParams hc_or_throw(const std::string& command) const {
        if (regime != "hc")
            throw std::runtime_error(
                command + ": closed-form analytics exist only for the hc regime; "
                          "use `verify` (Monte Carlo) for nc/llg");
        return lobflux::HcParams(alpha_plus, alpha_minus, beta_plus, beta_minus);
    }
};

void add_regime_flags(CLI::App* app, RegimeFlags& f) {
    app->add_option("--regime", f.regime, "Regime: hc, nc or llg")->capture_default_str();
    app->add_option("--alpha-plus", f.alpha_plus, "Ask up-move rate")->capture_default_str();
    app->add_option("--alpha-minus", f.alpha_minus, "Ask down-move rate")->capture_default_str();
    app->add_option("--beta-plus", f.beta_plus, "Bid up-move rate")->capture_default_str();
    app->add_option("--beta-minus", f.beta_minus, "Bid down-move rate")->capture_default_str();
    app->add_option("--mu", f.mu, "NC closing exponent")->capture_default_str();
    app->add_option("--kappa-a", f.kappa_a, "LLG ask damping exponent")->capture_default_str();
    app->add_option("--kappa-b", f.kappa_b, "LLG bid damping exponent")->capture_default_str();
    app->add_option("--theta", f.theta, "LLG geometric increment parameter")
        ->capture_default_str();
    app->add_option("--catastrophe", f.catastrophe, "HC closing law: uniform or two_part")
        ->capture_default_str();
    app->add_option("--cat-first-weight", f.cat_first_weight,
                    "two_part: weight of the first half of I_k")
        ->capture_default_str();
    app->add_option("--cat-c", f.cat_c, "two_part: almost-uniform bound constant")
        ->capture_default_str();
}

std::string out_path(const std::string& dir, const std::string& file) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / file).string();
}

void write_json_payload(const std::string& path, const json& payload) {
    lobflux::write_text_file(path, payload.dump(2) + "\n");
}

json stationary_json(const lobflux::StationaryTable& t) {
    return json{{"values", t.values}, {"tail_bound", t.tail_bound}};
}

json trajectory_json(const lobflux::PiecewiseLinearTrajectory& f) {
    return json{{"t", f.t}, {"y", f.y}};
}

int run_verify_checks(const RegimeFlags& flags, const std::string& check,
                      std::uint64_t seed, int threads, const std::string& out_dir,
                      const lobflux::RunConfig& config, const json& knobs) {
    const lobflux::HcParams params = flags.hc_or_throw("verify");
    lobflux::VerifyOptions opts;
    opts.threads = threads;

    const double occupancy_T = knobs.value("occupancy_T", 1e5);
    const std::vector<double> lln_T = knobs.value("lln_T", std::vector<double>{1e5});
    const std::int64_t lln_replicas = knobs.value("lln_replicas", std::int64_t{200});
    const std::int64_t clt_n = knobs.value("clt_n", std::int64_t{100000});
    const std::int64_t clt_replicas = knobs.value("clt_replicas", std::int64_t{1000});
    const double ldp_x = knobs.value("ldp_x", 0.85 * params.gamma_plus());
    const std::vector<double> ldp_T = knobs.value("ldp_T", std::vector<double>{25, 50, 100});
    const std::int64_t ldp_replicas = knobs.value("ldp_replicas", std::int64_t{1000000});
    const double traj_x = knobs.value("traj_x", 0.5 * params.gamma_plus());
    const std::vector<double> traj_T = knobs.value("traj_T", std::vector<double>{25, 50, 100});
    const std::int64_t traj_replicas = knobs.value("traj_replicas", std::int64_t{200000});
    const double acf_T = knobs.value("acf_T", 1e4);
    const int acf_max_lag = knobs.value("acf_max_lag", 20);
    const double growth_b = knobs.value("growth_b", 0.7);
    const std::vector<double> growth_T =
        knobs.value("growth_T", std::vector<double>{100, 1000, 10000});
    const std::int64_t growth_replicas = knobs.value("growth_replicas", std::int64_t{200});

    std::vector<lobflux::CheckReport> reports;
    auto want = [&check](const std::string& name) { return check == "all" || check == name; };
    if (want("invariant_occupancy"))
        reports.push_back(lobflux::check_invariant_occupancy(params, occupancy_T, seed, opts));
    if (want("lln"))
        reports.push_back(lobflux::check_lln(params, lln_T, lln_replicas, seed, opts));
    if (want("clt"))
        reports.push_back(lobflux::check_clt(params, clt_n, clt_replicas, seed, opts));
    if (want("ldp_decay"))
        reports.push_back(
            lobflux::check_ldp_decay(params, ldp_x, ldp_T, ldp_replicas, seed, opts));
    if (want("trajectory_concentration"))
        reports.push_back(lobflux::check_trajectory_concentration(params, traj_x, traj_T,
                                                                  traj_replicas, seed, opts));
    if (want("acf"))
        reports.push_back(lobflux::check_acf(params, acf_T, seed, acf_max_lag, opts));
    if (want("max_growth"))
        reports.push_back(
            lobflux::check_max_growth(params, growth_b, growth_T, growth_replicas, seed, opts));
    if (reports.empty()) throw std::runtime_error("verify: unknown check: " + check);

    std::ostringstream summary;
    summary << "check,verdict\n";
    bool any_fail = false;
    for (const auto& r : reports) {
        json payload = r.payload_json();
        payload["config"] = config.to_json();
        write_json_payload(out_path(out_dir, r.name + ".json"), payload);
        write_json_payload(out_path(out_dir, r.name + ".meta.json"), r.meta_json());
        summary << r.name << ',' << lobflux::to_string(r.verdict) << '\n';
        std::cout << r.name << ": " << lobflux::to_string(r.verdict) << "\n";
        if (r.verdict == lobflux::Verdict::fail) any_fail = true;
    }
    lobflux::write_text_file(out_path(out_dir, "verify_summary.csv"), summary.str());
    return any_fail ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Order book dynamics with liquidity fluctuations: simulator and "
                 "verification toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<ConfigJSON>());
    app.set_config("--config", "", "JSON config file mirroring the flags");

    std::uint64_t seed = 1;
    std::string out_dir = [] {
        const char* env = std::getenv("LOBFLUX_OUT_DIR");
        return std::string(env ? env : ".");
    }();
    int threads = 1;
    app.add_option("--seed", seed, "Master seed")->capture_default_str();
    app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads for replica ensembles (0 = cores)")
        ->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a book path, write event CSV");
    RegimeFlags sim_flags;
    add_regime_flags(sim, sim_flags);
    double horizon = 900.0;
    std::int64_t bid0 = 100, ask0 = 101;
    std::uint64_t max_events = lobflux::kDefaultMaxEvents;
    std::string sim_output = "events.csv";
    sim->add_option("--horizon", horizon, "Horizon in seconds")->capture_default_str();
    sim->add_option("--bid", bid0, "Initial bid (ticks)")->capture_default_str();
    sim->add_option("--ask", ask0, "Initial ask (ticks)")->capture_default_str();
    sim->add_option("--max-events", max_events, "Event ceiling (LLG explosion guard)")
        ->capture_default_str();
    sim->add_option("--output", sim_output, "Event CSV filename")->capture_default_str();

    // analyze
    auto* ana = app.add_subcommand("analyze", "Closed-form HC analytics report (JSON)");
    RegimeFlags ana_flags;
    add_regime_flags(ana, ana_flags);
    double eps = 1e-10;
    ana->add_option("--eps", eps, "Stationary-table tail tolerance")->capture_default_str();

    // ldp
    auto* ldp = app.add_subcommand("ldp", "Rate function, exponents and optimal trajectories");
    RegimeFlags ldp_flags;
    add_regime_flags(ldp, ldp_flags);
    double ldp_x = 1.0;
    ldp->add_option("--x", ldp_x, "Terminal scaled-spread level")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate HC rates from an event CSV");
    std::string est_input;
    double t_obs = -1.0;
    est->add_option("--input", est_input, "Event CSV path")->required();
    est->add_option("--t-obs", t_obs, "Observation length; defaults to the last timestamp")
        ->capture_default_str();

    // verify
    auto* ver = app.add_subcommand("verify", "Run statistical checks against the theory");
    RegimeFlags ver_flags;
    add_regime_flags(ver, ver_flags);
    std::string check = "all";
    std::string knobs_json = "{}";
    ver->add_option("--check", check,
                    "invariant_occupancy, lln, clt, ldp_decay, trajectory_concentration, "
                    "acf, max_growth or all")
        ->capture_default_str();
    ver->add_option("--knobs", knobs_json,
                    "JSON object overriding check sizes (occupancy_T, lln_T, lln_replicas, "
                    "clt_n, clt_replicas, ldp_x, ldp_T, ldp_replicas, traj_x, traj_T, "
                    "traj_replicas, acf_T, acf_max_lag, growth_b, growth_T, growth_replicas)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*sim) {
            const lobflux::RegimeSpec regime = sim_flags.build();
            lobflux::RunConfig config;
            config.command = "simulate";
            config.regime = regime.to_json();
            config.horizon = horizon;
            config.seed = seed;
            config.out_dir = out_dir;
            config.extra = json{{"bid", bid0}, {"ask", ask0}, {"max_events", max_events}};
            const lobflux::PathSample path =
                lobflux::simulate_book(regime, lobflux::BookState(bid0, ask0), horizon, seed,
                                       max_events);
            const std::string csv =
                lobflux::events_csv(path, "config: " + config.to_json().dump());
            lobflux::write_text_file(out_path(out_dir, sim_output), csv);
            std::cout << path.events.size() << " events -> " << out_path(out_dir, sim_output)
                      << "\n";
            return 0;
        }
        if (*ana) {
            const lobflux::HcParams params = ana_flags.hc_or_throw("analyze");
            lobflux::RunConfig config;
            config.command = "analyze";
            config.regime = ana_flags.build().to_json();
            config.seed = seed;
            config.out_dir = out_dir;
            config.extra = json{{"eps", eps}};
            const auto mu = lobflux::stationary_mu(params, eps);
            const auto pi = lobflux::stationary_pi(params, eps);
            json report{
                {"config", config.to_json()},
                {"mu", stationary_json(mu)},
                {"pi", stationary_json(pi)},
                {"mean_spread", lobflux::mean_spread(mu)},
                {"v", lobflux::embedded_drift_v(params)},
                {"D",
                 {{"theorem", lobflux::drift_D(params, lobflux::DriftMethod::theorem)},
                  {"lemma_times_gamma",
                   lobflux::drift_D(params, lobflux::DriftMethod::lemma_times_gamma)},
                  {"generator", lobflux::drift_D(params, lobflux::DriftMethod::generator)}}},
                {"var_embedded", lobflux::clt_variance_embedded(params)},
                {"var_embedded_mu1_variant", lobflux::clt_variance_embedded(params, true)},
                {"var_continuous", lobflux::clt_variance_continuous(params)},
                {"next_move_prob", lobflux::next_move_prob(params)}};
            write_json_payload(out_path(out_dir, "analyze.json"), report);
            std::cout << "-> " << out_path(out_dir, "analyze.json") << "\n";
            return 0;
        }
        if (*ldp) {
            const lobflux::HcParams params = ldp_flags.hc_or_throw("ldp");
            lobflux::RunConfig config;
            config.command = "ldp";
            config.regime = ldp_flags.build().to_json();
            config.seed = seed;
            config.out_dir = out_dir;
            config.extra = json{{"x", ldp_x}};
            const auto spread_traj = lobflux::optimal_spread_trajectory(ldp_x, params);
            const auto prices = lobflux::optimal_price_trajectories(ldp_x, params);
            json report{{"config", config.to_json()},
                        {"x", ldp_x},
                        {"ldp_exponent", lobflux::ldp_exponent(ldp_x, params)},
                        {"rate_function_at_optimum",
                         lobflux::rate_function(spread_traj, params)},
                        {"optimal_spread_trajectory", trajectory_json(spread_traj)},
                        {"optimal_bid_trajectory", trajectory_json(prices.first)},
                        {"optimal_ask_trajectory", trajectory_json(prices.second)}};
            write_json_payload(out_path(out_dir, "ldp.json"), report);
            const std::string comment = "config: " + config.to_json().dump();
            lobflux::write_text_file(out_path(out_dir, "optimal_spread.csv"),
                                     lobflux::trajectory_csv(spread_traj.t, spread_traj.y, comment));
            lobflux::write_text_file(
                out_path(out_dir, "optimal_bid.csv"),
                lobflux::trajectory_csv(prices.first.t, prices.first.y, comment));
            lobflux::write_text_file(
                out_path(out_dir, "optimal_ask.csv"),
                lobflux::trajectory_csv(prices.second.t, prices.second.y, comment));
            std::cout << "-> " << out_path(out_dir, "ldp.json") << "\n";
            return 0;
        }
        if (*est) {
            lobflux::RunConfig config;
            config.command = "estimate";
            config.seed = seed;
            config.out_dir = out_dir;
            config.extra = json{{"input", est_input}, {"t_obs", t_obs}};
            std::ifstream is(est_input);
            if (!is) throw std::runtime_error("estimate: cannot open " + est_input);
            const lobflux::EventLog log = lobflux::parse_event_log(is, t_obs);
            json report = lobflux::estimate_rates(log).to_json();
            report["config"] = config.to_json();
            write_json_payload(out_path(out_dir, "estimate.json"), report);
            std::cout << "-> " << out_path(out_dir, "estimate.json") << "\n";
            return 0;
        }
        if (*ver) {
            lobflux::RunConfig config;
            config.command = "verify";
            config.regime = ver_flags.build().to_json();
            config.seed = seed;
            config.out_dir = out_dir;
            config.extra = json{{"check", check}, {"knobs", json::parse(knobs_json)}};
            return run_verify_checks(ver_flags, check, seed, threads, out_dir, config,
                                     json::parse(knobs_json));
        }
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
