#include "lobflux/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lobflux {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_events_csv(std::ostream& os, const PathSample& path,
                      const std::string& metadata_comment) {
    if (!metadata_comment.empty()) os << "# " << metadata_comment << "\n";
    os << "t,side,direction,delta,bid,ask\n";
    for (const auto& ev : path.events) {
        os << format_double(ev.t) << ',' << to_string(ev.side) << ',' << to_string(ev.dir)
           << ',' << ev.delta << ',' << ev.after.bid << ',' << ev.after.ask << '\n';
    }
}

std::string events_csv(const PathSample& path, const std::string& metadata_comment) {
    std::ostringstream ss;
    write_events_csv(ss, path, metadata_comment);
    return ss.str();
}

std::string trajectory_csv(const std::vector<double>& t, const std::vector<double>& y,
                           const std::string& metadata_comment) {
    if (t.size() != y.size()) throw std::invalid_argument("trajectory_csv: length mismatch");
    std::ostringstream ss;
    if (!metadata_comment.empty()) ss << "# " << metadata_comment << "\n";
    ss << "t,y\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        ss << format_double(t[i]) << ',' << format_double(y[i]) << '\n';
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace lobflux
