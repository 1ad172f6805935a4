#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vtube/scenario.hpp"

using namespace vtube;
namespace fs = std::filesystem;

namespace {

std::string scenario_path(const char* name) {
    return std::string(VTUBE_SCENARIO_DIR) + "/" + name;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(bool(f));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Returns the message parse_scenario fails with, or "" if it succeeded.
std::string parse_error(const std::string& text) {
    try {
        parse_scenario(text, "inline");
        return "";
    } catch (const std::runtime_error& e) {
        return e.what();
    }
}

const char* kMinimal = R"json({
  "schema": "vtube-scenario/1",
  "name": "mini",
  "tube": {"p1": [0, 0], "p2": [500, 0], "r_t": 150},
  "params": {"r_s": 20, "r_a": 30, "r_d": 80},
  "uavs": [{"id": 1, "p": [-100, 0], "v": [2, -4], "l": 5, "vm": 5}]
})json";

}  // namespace

TEST_CASE("minimal scenario fills every optional field with its default") {
    Scenario sc = parse_scenario(kMinimal, "inline");
    CHECK(sc.name == "mini");
    CHECK(sc.p_t2 == Vec2{500.0, 0.0});
    CHECK(sc.r_t == 150.0);
    CHECK(sc.lane_count == 0);
    CHECK(sc.cp.k1 == 1.0);
    CHECK(sc.cp.k2 == 1.0);
    CHECK(sc.cp.k3 == 1.0);
    CHECK(sc.cp.eps_m == 1e-6);
    CHECK(sc.cp.eps_t == 1e-6);
    CHECK(sc.cp.eps_0 == 1.0);
    CHECK(sc.cp.r_b == 30.0);     // defaults to r_a
    CHECK(sc.cp.r_sr == 10000.0);
    CHECK(sc.cp.r_rt == 10000.0);
    CHECK(sc.sim.dt == 0.01);
    CHECK(sc.sim.t_max == 400.0);
    CHECK(sc.sim.record_every == 10);
    CHECK(sc.sim.threads == 1);
    CHECK(sc.sim.integrator == Integrator::Exact);
    CHECK(sc.sim.neighbor_mode == NeighborMode::Auto);
    REQUIRE(sc.uavs.size() == 1);
    CHECK(sc.uavs[0].id == 1);
    CHECK(sc.uavs[0].v0 == Vec2{2.0, -4.0});
}

TEST_CASE("parse errors name the offending field") {
    CHECK(parse_error("{ nope").find("invalid JSON") != std::string::npos);
    CHECK(parse_error(R"({"schema":"other/9"})").find("unsupported") !=
          std::string::npos);
    CHECK(parse_error(R"({"schema":"vtube-scenario/1"})").find("name") !=
          std::string::npos);

    std::string no_rd = R"json({
      "schema": "vtube-scenario/1", "name": "x",
      "tube": {"p1": [0,0], "p2": [500,0], "r_t": 150},
      "params": {"r_s": 20, "r_a": 30},
      "uavs": [{"id": 1, "p": [0,0], "l": 5, "vm": 5}]
    })json";
    CHECK(parse_error(no_rd).find("params.r_d") != std::string::npos);

    std::string no_vm = R"json({
      "schema": "vtube-scenario/1", "name": "x",
      "tube": {"p1": [0,0], "p2": [500,0], "r_t": 150},
      "params": {"r_s": 20, "r_a": 30, "r_d": 80},
      "uavs": [{"id": 1, "p": [0,0], "l": 5}]
    })json";
    CHECK(parse_error(no_vm).find("uavs[].vm") != std::string::npos);

    std::string no_uavs = R"json({
      "schema": "vtube-scenario/1", "name": "x",
      "tube": {"p1": [0,0], "p2": [500,0], "r_t": 150},
      "params": {"r_s": 20, "r_a": 30, "r_d": 80}
    })json";
    CHECK(parse_error(no_uavs).find("no vehicles") != std::string::npos);

    std::string bad_integrator = R"json({
      "schema": "vtube-scenario/1", "name": "x",
      "tube": {"p1": [0,0], "p2": [500,0], "r_t": 150},
      "params": {"r_s": 20, "r_a": 30, "r_d": 80},
      "sim": {"integrator": "rk4"},
      "uavs": [{"id": 1, "p": [0,0], "l": 5, "vm": 5}]
    })json";
    CHECK(parse_error(bad_integrator).find("sim.integrator") !=
          std::string::npos);

    std::string bad_placement = R"json({
      "schema": "vtube-scenario/1", "name": "x",
      "tube": {"p1": [0,0], "p2": [500,0], "r_t": 150},
      "params": {"r_s": 20, "r_a": 30, "r_d": 80},
      "generator": {"placement": "spiral", "count": 3, "l": 5, "vm": 5}
    })json";
    CHECK(parse_error(bad_placement).find("placement") != std::string::npos);

    std::string count_mismatch = R"json({
      "schema": "vtube-scenario/1", "name": "x",
      "tube": {"p1": [0,0], "p2": [500,0], "r_t": 150},
      "params": {"r_s": 20, "r_a": 30, "r_d": 80},
      "generator": {"placement": "explicit", "count": 2,
                    "list": [{"id": 1, "p": [0,0], "l": 5, "vm": 5}]}
    })json";
    CHECK(parse_error(count_mismatch).find("does not match") !=
          std::string::npos);
}

TEST_CASE("grid generator lays vehicles out row-major with stepped vm") {
    std::string text = R"json({
      "schema": "vtube-scenario/1", "name": "g",
      "tube": {"p1": [0,0], "p2": [500,0], "r_t": 150},
      "params": {"r_s": 20, "r_a": 30, "r_d": 80},
      "generator": {"placement": "grid", "count": 6, "start_id": 7,
                    "origin": [0, 0], "cols": 3, "spacing": [10, 20],
                    "l": 4, "vm_base": 5, "vm_step": 0.5}
    })json";
    Scenario sc = parse_scenario(text, "inline");
    REQUIRE(sc.uavs.size() == 6);
    const Vec2 expect[] = {{0, 0},  {10, 0},  {20, 0},
                           {0, 20}, {10, 20}, {20, 20}};
    for (int k = 0; k < 6; ++k) {
        CHECK(sc.uavs[k].id == 7 + k);
        CHECK(sc.uavs[k].p0 == expect[k]);
        CHECK(sc.uavs[k].l == 4.0);
        CHECK(sc.uavs[k].vm == doctest::Approx(5.0 + 0.5 * k));
    }
}

TEST_CASE("ring generator spaces vehicles evenly from angle zero") {
    std::string text = R"json({
      "schema": "vtube-scenario/1", "name": "r",
      "tube": {"p1": [0,0], "p2": [500,0], "r_t": 150},
      "params": {"r_s": 20, "r_a": 30, "r_d": 80},
      "generator": {"placement": "ring", "count": 4, "center": [5, 5],
                    "radius": 10, "l": 5, "vm": 6}
    })json";
    Scenario sc = parse_scenario(text, "inline");
    REQUIRE(sc.uavs.size() == 4);
    const Vec2 expect[] = {{15, 5}, {5, 15}, {-5, 5}, {5, -5}};
    for (int k = 0; k < 4; ++k) {
        CHECK(sc.uavs[k].id == 1 + k);
        CHECK(sc.uavs[k].p0.x == doctest::Approx(expect[k].x).epsilon(1e-12));
        CHECK(sc.uavs[k].p0.y == doctest::Approx(expect[k].y).epsilon(1e-12));
        CHECK(sc.uavs[k].vm == 6.0);
    }
}

TEST_CASE("explicit uav list and generator output are concatenated") {
    std::string text = R"json({
      "schema": "vtube-scenario/1", "name": "c",
      "tube": {"p1": [0,0], "p2": [500,0], "r_t": 150},
      "params": {"r_s": 20, "r_a": 30, "r_d": 80},
      "uavs": [{"id": 1, "p": [-100, 0], "l": 5, "vm": 5}],
      "generator": {"placement": "grid", "count": 2, "start_id": 10,
                    "origin": [-200, 0], "cols": 2, "spacing": [60, 0],
                    "l": 5, "vm": 5}
    })json";
    Scenario sc = parse_scenario(text, "inline");
    REQUIRE(sc.uavs.size() == 3);
    CHECK(sc.uavs[0].id == 1);
    CHECK(sc.uavs[1].id == 10);
    CHECK(sc.uavs[2].id == 11);
}

TEST_CASE("build_world derives filtered positions from the seed states") {
    Scenario sc = parse_scenario(kMinimal, "inline");
    World w = build_world(sc);
    REQUIRE(w.uavs.size() == 1);
    CHECK(w.uavs[0].params.id == 1);
    CHECK(w.uavs[0].state.p == Vec2{-100.0, 0.0});
    // xi = p + v / l with v = (2, -4), l = 5.
    CHECK(w.uavs[0].state.xi.x == doctest::Approx(-99.6).epsilon(1e-14));
    CHECK(w.uavs[0].state.xi.y == doctest::Approx(-0.8).epsilon(1e-14));
    CHECK(w.tube.length() == doctest::Approx(500.0));
    CHECK(w.limits.r_v == doctest::Approx(1.0));
}

TEST_CASE("format_double is shortest-round-trip and handles specials") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 6.02214076e23, -123.456,
                     3.141592653589793}) {
        std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("trajectory csv format is frozen") {
    RunRecord rec;
    TrajectoryRow r;
    r.t = 0.5;
    r.id = 3;
    r.p = {1, 2};
    r.v = {3, 4};
    r.xi = {5, 6};
    r.vc = {7, 8};
    r.region = Region::TubeInterior;
    r.arrived = false;
    rec.rows.push_back(r);
    CHECK(trajectories_csv(rec) ==
          "t,id,px,py,vx,vy,xix,xiy,vcx,vcy,region,arrived\n"
          "0.5,3,1,2,3,4,5,6,7,8,TubeInterior,0\n");
}

TEST_CASE("output bundle is complete and the manifest reproduces the run") {
    Scenario sc = load_scenario(scenario_path("two_uav_overtake.json"));
    sc.sim.t_max = 3.0;
    RunRecord rec = run(build_world(sc), sc.sim);

    fs::path dir = fs::temp_directory_path() / "vtube_scenario_test";
    fs::remove_all(dir);
    std::vector<std::string> files = write_outputs(dir.string(), sc, rec);
    REQUIRE(files.size() == 6);
    for (const std::string& f : files) CHECK(fs::exists(f));

    Scenario sc2 = load_scenario((dir / "manifest.json").string());
    CHECK(sc2.name == sc.name);
    CHECK(sc2.sim.t_max == 3.0);
    REQUIRE(sc2.uavs.size() == sc.uavs.size());

    RunRecord rec2 = run(build_world(sc2), sc2.sim);
    CHECK(trajectories_csv(rec2) == read_file(dir / "trajectories.csv"));
    fs::remove_all(dir);
}

TEST_CASE("all shipped scenarios parse and build") {
    struct Entry {
        const char* file;
        size_t uavs;
    };
    const Entry entries[] = {{"swarm_40uav.json", 40},
                             {"two_uav_headon.json", 2},
                             {"two_uav_overtake.json", 2},
                             {"basic_8uav.json", 8},
                             {"crowded_12uav.json", 12}};
    for (const Entry& e : entries) {
        CAPTURE(e.file);
        Scenario sc = load_scenario(scenario_path(e.file));
        CHECK(sc.uavs.size() == e.uavs);
        World w = build_world(sc);
        CHECK(w.uavs.size() == e.uavs);
    }

    // The big scenario deliberately seeds exactly one conflicting pair.
    World w = build_world(load_scenario(scenario_path("swarm_40uav.json")));
    REQUIRE(w.warnings.size() == 1);
    CHECK(w.warnings[0].find("filtered separation") != std::string::npos);
}
