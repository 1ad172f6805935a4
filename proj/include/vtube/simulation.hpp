#pragma once

#include <limits>
#include <string>
#include <vector>

#include "vtube/controller.hpp"

namespace vtube {

enum class Integrator { Exact, Euler };

enum class NeighborMode { Auto, Brute, Grid };

struct SimOptions {
    double dt = 0.01;
    double t_max = 400.0;
    Integrator integrator = Integrator::Exact;
    int threads = 1;
    NeighborMode neighbor_mode = NeighborMode::Auto;
    int record_every = 10;  // trajectory decimation (1 = every step)
    // Arrived vehicles normally despawn and stop influencing the swarm.
    // Disabling this keeps them simulated; verification uses it to show
    // that lingering arrivals clog the finishing line.
    bool despawn_on_arrival = true;
};

struct Uav {
    UavParams params;
    UavState state;
};

/// Full swarm state plus the shared geometry and gains.
struct World {
    double t = 0.0;
    std::vector<Uav> uavs;
    TubeSpec tube;
    AuxTubes aux;
    ControlParams cp;
    SwarmLimits limits;
    std::vector<std::string> warnings;

    /// Builds a world from initial raw states. Derives filtered positions,
    /// regions and swarm limits; builds the auxiliary tubes from cp.r_sr,
    /// cp.r_rt, cp.r_b. Enforces the detection-range requirement
    /// r_d > r_s + r_a + 2 r_v (hard error) and records soft warnings for
    /// initial separations at or below 2 r_s, initial speeds above vm and
    /// starts past the finishing line.
    static World create(TubeSpec tube, ControlParams cp,
                        std::vector<Uav> uavs);
};

enum class EventKind {
    Arrival,
    ConflictStart,
    ConflictEnd,
    TubeBreachStart,
    TubeBreachEnd,
    RegionChange,
};

const char* to_string(EventKind k);

struct Event {
    double t = 0.0;
    EventKind kind{};
    std::vector<int> subjects;  // vehicle ids
    std::string detail;
};

struct TrajectoryRow {
    double t = 0.0;
    int id = 0;
    Vec2 p, v, xi, vc;
    Region region{};
    bool arrived = false;
};

/// Per-step diagnostic traces, sampled before integration each step and
/// once more at the final state. Pair statistics are +inf when fewer than
/// two vehicles remain; the tube margins are minima over vehicles whose
/// filtered position lies in the tube band at or past the starting line
/// (crossing the band edge is the normal way in from the ready areas, so
/// ungated margins would be meaningless).
struct MetricTraces {
    std::vector<double> t;
    std::vector<double> min_p_dist;
    std::vector<double> min_xi_dist;
    std::vector<double> tube_margin_p;
    std::vector<double> tube_margin_xi;
    std::vector<double> total_v;
    std::vector<double> cmd_time_us;
};

struct RunRecord {
    std::vector<TrajectoryRow> rows;
    std::vector<Event> events;
    MetricTraces traces;
    std::vector<double> arrival_time;  // indexed like World::uavs, NaN = none
    bool completed = false;
    double t_end = 0.0;
    long steps = 0;

    // Safety accounting. A post-recovery conflict is any conflict onset at
    // t > 0; a post-recovery breach is a margin crossing at t > 0 by a
    // vehicle that was already inside the tube band (entering the band
    // over the edge does not count).
    int post_recovery_conflicts = 0;
    int post_recovery_breaches = 0;

    double max_speed_excess = -std::numeric_limits<double>::infinity();
    double min_sep_transfer_slack = std::numeric_limits<double>::infinity();
    double max_xi_residual = 0.0;  // worst |xi+ - (xi + vc dt)| / max(1, |xi+|)
    double wall_time_s = 0.0;
    std::vector<std::string> warnings;

    bool safety_violation() const {
        return post_recovery_conflicts + post_recovery_breaches > 0;
    }
};

/// Neighbour query: indices j with ||p_i - p_j|| <= r_d (detection gate)
/// and ||xi_i - xi_j|| <= r_a + r_s (avoidance gate), both inclusive, dead
/// vehicles excluded, sorted ascending. Brute and Grid must agree exactly;
/// Auto switches to the grid above 64 live vehicles.
std::vector<int> neighbor_indices(const World& w, int i, NeighborMode mode);

/// Same query, anonymized for the controller.
std::vector<NeighborState> detect_neighbors(const World& w, int i);

/// Steps the swarm through the region-switched controller. Owns the
/// cross-step trackers (conflict matrix, breach flags, previous regions)
/// that turn state crossings into events.
class Simulator {
  public:
    Simulator(World w, SimOptions opts);

    /// One full step: arrival scan, observation (traces + events),
    /// command computation, integration. Returns false once the run is
    /// over (all arrived or t_max reached) and the record is final.
    bool step();

    const World& world() const { return world_; }
    const RunRecord& record() const { return record_; }
    RunRecord take_record() { return std::move(record_); }

  private:
    void scan_arrivals(double t);
    void observe(double t);
    void compute_commands();
    void record_rows(double t);
    void integrate(double t);
    int live_count() const;
    bool all_arrived() const;

    World world_;
    SimOptions opts_;
    RunRecord record_;
    long max_steps_ = 0;
    long k_ = 0;
    bool finished_ = false;

    std::vector<Vec2> commands_;
    std::vector<char> conflict_;       // pair matrix, row-major i*M+j
    std::vector<char> breach_;         // per-vehicle breach flag
    std::vector<char> in_band_;        // per-vehicle "inside tube band" flag
    std::vector<Region> prev_region_;
    std::vector<char> region_known_;
    std::vector<char> arrival_logged_;
    std::vector<double> vm_live_;      // scratch for total_v
    std::vector<Vec2> xi_live_;
};

/// Convenience wrapper: run to completion and return the record.
RunRecord run(World world, const SimOptions& opts);

/// Aggregates a finished record.
struct MetricsSummary {
    double min_p_dist = 0.0, t_min_p_dist = 0.0;
    double min_xi_dist = 0.0, t_min_xi_dist = 0.0;
    double min_tube_margin_p = 0.0, t_min_tube_margin_p = 0.0;
    double min_tube_margin_xi = 0.0;
    double t_all_arrived = 0.0;  // NaN when incomplete
    double max_speed_excess = 0.0;
    double min_sep_transfer_slack = 0.0;
    double max_xi_residual = 0.0;
    double mean_cmd_time_us = 0.0, max_cmd_time_us = 0.0;
    int conflict_starts = 0;
    int post_recovery_conflicts = 0;
    int post_recovery_breaches = 0;
    bool completed = false;
    double wall_time_s = 0.0;
};

MetricsSummary metrics(const RunRecord& record);

}  // namespace vtube
