#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "frameflow/cli.hpp"

using namespace frameflow;
using nlohmann::json;

TEST_CASE("config parsing") {
    const RunConfig fix = parse_config(json::parse(R"({"scheme": "FIX-B", "depth": 7, "seed": 99})"));
    CHECK(fix.fixture == "FIX-B");
    CHECK(fix.depth == 7);
    CHECK(fix.seed == 99);
    CHECK(fix.scheme().validate().ok);

    const RunConfig pairs = parse_config(json::parse(R"({
        "scheme": {"generators": [
            {"source": -3, "target": 3, "radius": 0.6},
            {"source": [0, -1.5], "target": [0, 1.5], "radius": 0.6}]},
        "gap": {"b": [0, 2.5], "k": [0, -2], "iterations": 50},
        "correlation": {"phi": {"coefficients": {"0": 1, "1": [0.5, 0.25]}, "profile": "constant"}}
    })"));
    REQUIRE(pairs.generators.size() == 2);
    CHECK(pairs.gap_b == std::vector<double>{0, 2.5});
    CHECK(pairs.gap_k == std::vector<int>{0, -2});
    CHECK(pairs.phi.coefficients.at(1) == Complex(0.5, 0.25));
    CHECK(pairs.phi.profile == Profile::constant);
    CHECK(pairs.scheme().validate().ok);

    // A matrix generator equal to the canonical pairing.
    const Generator g = pairing_generator(-1.0, 1.0, 0.35);
    json m = {{"matrix", {{json::array({g.map.a().real(), 0}), json::array({g.map.b().real(), 0})},
                          {json::array({g.map.c().real(), 0}), json::array({g.map.d().real(), 0})}}},
              {"source_disk", {{"center", -1}, {"radius", 0.35}}},
              {"target_disk", {{"center", 1}, {"radius", 0.35}}}};
    json cfg = {{"scheme", {{"generators", json::array({{{"source", -3}, {"target", 3}, {"radius", 0.6}}, m})}}}};
    const RunConfig mat = parse_config(cfg);
    CHECK(mat.scheme().validate().ok);
    CHECK(mat.scheme().map(2).approx_equal(g.map));

    // Round trip through the canonical dump.
    const RunConfig again = parse_config(pairs.to_json());
    json lhs = again.to_json(), rhs = pairs.to_json();
    for (int i = 0; i < 4; ++i) CHECK(again.scheme().map(i).approx_equal(pairs.scheme().map(i)));
    lhs.erase("scheme");
    rhs.erase("scheme");
    CHECK(lhs == rhs);
}

TEST_CASE("config rejects bad input") {
    auto bad = [](const char* text) { CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError); };
    bad(R"({"depth": 6})");
    bad(R"({"scheme": "FIX-C"})");
    bad(R"({"scheme": "FIX-A", "extra": 1})");
    bad(R"({"scheme": "FIX-A", "gap": {"bb": [1]}})");
    bad(R"({"scheme": "FIX-A", "depth": 0})");
    bad(R"({"scheme": "FIX-A", "depth": 2.5})");
    bad(R"({"scheme": "FIX-A", "seed": -1})");
    bad(R"({"scheme": "FIX-A", "tolerance": "small"})");
    bad(R"({"scheme": {"generators": [{"source": 0, "target": 1}]}})");
    bad(R"({"scheme": {"generators": [{"source": 0, "target": 5, "radius": -1}, {"source": 2, "target": 9, "radius": 1}]}})");
    bad(R"({"scheme": "FIX-A", "correlation": {"phi": {"coefficients": {"-1": 1}}}})");
    bad(R"({"scheme": "FIX-A", "correlation": {"phi": {"coefficients": {"0": [1, 1]}}}})");
    bad(R"({"scheme": "FIX-A", "correlation": {"phi": {"profile": "box"}}})");
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("overrides") {
    RunConfig cfg = parse_config(json::parse(R"({"scheme": "FIX-A"})"));
    Overrides o;
    o.seed = 5;
    o.depth = 9;
    o.threads = 0;
    o.out = "elsewhere";
    apply_overrides(cfg, o);
    CHECK(cfg.seed == 5);
    CHECK(cfg.depth == 9);
    CHECK(cfg.threads == 0);
    CHECK(cfg.output == std::filesystem::path("elsewhere"));
    o.depth = 40;
    CHECK_THROWS_AS(apply_overrides(cfg, o), ConfigError);

    setenv("FRAMEFLOW_SEED", "123", 1);
    setenv("FRAMEFLOW_DEPTH", "4", 1);
    const Overrides e = environment_overrides();
    CHECK(e.seed == 123u);
    CHECK(e.depth == 4);
    setenv("FRAMEFLOW_SEED", "12x", 1);
    CHECK_THROWS_AS(environment_overrides(), ConfigError);
    unsetenv("FRAMEFLOW_SEED");
    unsetenv("FRAMEFLOW_DEPTH");
}

TEST_CASE("number formatting and hashing") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(std::stod(format_number(-2.5e-20)) == -2.5e-20);
    CHECK(std::stod(format_number(M_PI)) == M_PI);
    CHECK(fnv1a("") == 14695981039346656037ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("run_command exit codes and artifacts") {
    const auto dir = std::filesystem::temp_directory_path() / "frameflow_test_cli";
    std::filesystem::remove_all(dir);
    RunConfig cfg = parse_config(json::parse(R"({"scheme": "FIX-A", "depth": 4})"));
    cfg.output = dir;
    std::ostringstream err;
    CHECK(run_command("validate", cfg, err) == 0);
    CHECK(run_command("pressure-curve", cfg, err) == 0);
    CHECK(run_command("nonsense", cfg, err) == 2);

    std::ifstream csv(dir / "pressure.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "s,P\r");
    const json manifest = json::parse(std::ifstream(dir / "pressure-curve.manifest.json"));
    CHECK(manifest["command"] == "pressure-curve");
    CHECK(manifest["seed"] == 1);
    CHECK(manifest["files"] == json::array({"pressure.csv"}));
    CHECK(manifest["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
    CHECK_FALSE(std::filesystem::exists(dir / "pressure.csv.tmp"));

    RunConfig broken = parse_config(json::parse(R"({"scheme": {"generators": [
        {"source": 0, "target": 1, "radius": 1.0}, {"source": [0, -5], "target": [0, 5], "radius": 1.0}]}})"));
    broken.output = dir;
    CHECK(run_command("dimension", broken, err) == 2);
    CHECK(err.str().find("overlap") != std::string::npos);

    RunConfig few = parse_config(json::parse(R"({"scheme": "FIX-A", "depth": 4})"));
    few.output = dir;
    few.pressure_points = 1;
    CHECK(run_command("pressure-curve", few, err) == 2);
    std::filesystem::remove_all(dir);

    CHECK(exit_code(BracketFailure("no root")) == 3);
    CHECK(exit_code(NoConvergence("stuck", 1e-3, 1e-3)) == 3);
    CHECK(exit_code(Divergence("grows")) == 3);
    CHECK(exit_code(ValidationError("bad")) == 2);
    CHECK(exit_code(std::invalid_argument("bad")) == 2);
    CHECK(exit_code(CapacityExceeded("big")) == 1);
}
