#include <doctest.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <string>

#include "lobflux/config.hpp"
#include "lobflux/io.hpp"
#include "lobflux/rng.hpp"
#include "lobflux/simulate.hpp"

using namespace lobflux;

TEST_CASE("run configs round-trip through JSON") {
    RunConfig c;
    c.command = "simulate";
    c.regime = RegimeSpec::hc(HcParams(5, 3, 2, 4)).to_json();
    c.horizon = 900.0;
    c.seed = 12345;
    c.out_dir = "/tmp/x";
    c.extra = json{{"bid", 100}, {"ask", 101}};
    const json j = c.to_json();
    CHECK(j.at("schema_version") == kSchemaVersion);
    const RunConfig back = RunConfig::from_json(j);
    CHECK(back == c);
    CHECK(back.to_json() == j);
}

TEST_CASE("shortest round-trip formatting reparses to the same double") {
    Rng rng(2718281828);
    for (int i = 0; i < 2000; ++i) {
        const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform_int(-12, 12));
        const std::string s = format_double(v);
        double back = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(res.ec == std::errc{});
        CHECK(back == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-1.0) == "-1");
}

TEST_CASE("event CSV layout: comment, header, rows") {
    const RegimeSpec regime = RegimeSpec::hc(HcParams(5, 3, 2, 4));
    const PathSample path = simulate_book(regime, BookState(100, 101), 1.0, 9);
    const std::string csv = events_csv(path, "meta");
    CHECK(csv.rfind("# meta\nt,side,direction,delta,bid,ask\n", 0) == 0);
    const std::string bare = events_csv(path);
    CHECK(bare.rfind("t,side,direction,delta,bid,ask\n", 0) == 0);
    // byte stability across calls
    CHECK(events_csv(path, "meta") == csv);
}

TEST_CASE("trajectory CSV layout") {
    const std::string csv = trajectory_csv({0.0, 0.5, 1.0}, {0.0, 0.0, 4.5}, "c");
    CHECK(csv == "# c\nt,y\n0,0\n0.5,0\n1,4.5\n");
}

TEST_CASE("text files write and read back verbatim") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "lobflux_io_test.txt").string();
    const std::string content = "alpha\nbeta\n";
    write_text_file(path, content);
    CHECK(read_text_file(path) == content);
    std::remove(path.c_str());
}

TEST_CASE("seed derivation separates streams and is order-free") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}
