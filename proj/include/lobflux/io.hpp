#pragma once

#include <iosfwd>
#include <string>

#include "lobflux/simulate.hpp"

namespace lobflux {

// Shortest round-trip decimal rendering; used for every CSV/JSON number we
// emit so payloads are byte-stable across runs and machines.
std::string format_double(double v);

// Event CSV: optional leading '#'-comment metadata lines, then the header
// `t,side,direction,delta,bid,ask` and one row per event.
void write_events_csv(std::ostream& os, const PathSample& path,
                      const std::string& metadata_comment = "");
std::string events_csv(const PathSample& path, const std::string& metadata_comment = "");

// Trajectory CSV with header `t,y`.
std::string trajectory_csv(const std::vector<double>& t, const std::vector<double>& y,
                           const std::string& metadata_comment = "");

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace lobflux
