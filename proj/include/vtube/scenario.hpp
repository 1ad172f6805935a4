#pragma once

#include <string>
#include <vector>

#include "vtube/simulation.hpp"

namespace vtube {

inline constexpr const char* kScenarioSchema = "vtube-scenario/1";
inline constexpr const char* kManifestSchema = "vtube-manifest/1";
inline constexpr const char* kVersion = "1.0.0";

struct ScenarioUav {
    int id = 0;
    Vec2 p0;
    Vec2 v0;
    double l = 0.0;
    double vm = 0.0;
};

/// A fully resolved scenario: generator entries are already expanded into
/// the explicit vehicle list.
struct Scenario {
    std::string name;
    Vec2 p_t1, p_t2;
    double r_t = 0.0;
    int lane_count = 0;
    ControlParams cp;
    std::vector<ScenarioUav> uavs;
    SimOptions sim;
};

/// Loads a scenario file (schema vtube-scenario/1) or a run manifest
/// (schema vtube-manifest/1; the embedded resolved scenario and sim
/// settings are returned, which reproduces the original run exactly).
/// Throws std::runtime_error with the offending field path on invalid
/// input.
Scenario load_scenario(const std::string& path);

/// Parses scenario JSON text (same contract as load_scenario).
Scenario parse_scenario(const std::string& text, const std::string& origin);

World build_world(const Scenario& sc);

/// Writes the full output bundle into out_dir (created if missing):
///   trajectories.csv     decimated per-vehicle rows
///   events.jsonl         one event per line
///   metrics.json         aggregated run metrics
///   manifest.json        resolved scenario + settings, re-runnable
///   plot_positions.csv   coarse position snapshots for motion plots
///   plot_min_distance.csv separation/margin traces with the reference
///                        levels 2 r_s and r_s as columns
/// Returns the paths written. Throws std::runtime_error on I/O failure.
std::vector<std::string> write_outputs(const std::string& out_dir,
                                       const Scenario& sc,
                                       const RunRecord& record);

/// Serializes the trajectory table (shared by write_outputs and tests).
std::string trajectories_csv(const RunRecord& record);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace vtube
