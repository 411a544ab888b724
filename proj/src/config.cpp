#include "lobflux/config.hpp"

namespace lobflux {

json RunConfig::to_json() const {
    return json{{"schema_version", kSchemaVersion},
                {"command", command},
                {"regime", regime},
                {"horizon", horizon},
                {"steps", steps},
                {"replicas", replicas},
                {"seed", seed},
                {"out_dir", out_dir},
                {"extra", extra}};
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    c.regime = j.value("regime", json());
    c.horizon = j.value("horizon", 0.0);
    c.steps = j.value("steps", std::int64_t{0});
    c.replicas = j.value("replicas", std::int64_t{0});
    c.seed = j.value("seed", std::uint64_t{0});
    c.out_dir = j.value("out_dir", std::string("."));
    c.extra = j.value("extra", json());
    return c;
}

}  // namespace lobflux
