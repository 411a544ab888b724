#pragma once

#include <cstdint>
#include <string>

#include "lobflux/model.hpp"

namespace lobflux {

inline constexpr int kSchemaVersion = 1;

// Fully serializable run description; embedded verbatim in every output file
// so any artifact can be replayed from its own header.
struct RunConfig {
    std::string command;  // simulate | analyze | estimate | ldp | verify
    json regime;          // RegimeSpec JSON; null for commands without one
    double horizon = 0.0;
    std::int64_t steps = 0;
    std::int64_t replicas = 0;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    json extra;  // command-specific knobs (checks, tolerances, x, ...)

    json to_json() const;
    static RunConfig from_json(const json& j);
    bool operator==(const RunConfig& o) const { return to_json() == o.to_json(); }
};

}  // namespace lobflux
