#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vtube/checks.hpp"
#include "vtube/scenario.hpp"

namespace {

using namespace vtube;

struct RunArgs {
    std::string scenario_path;
    std::string out_dir = "out";
    double dt = 0.0;
    double t_max = 0.0;
    std::string integrator;
    int threads = -1;
    int record_every = 0;
};

int cmd_run(const RunArgs& a, const CLI::App& sub) {
    Scenario sc;
    try {
        sc = load_scenario(a.scenario_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    if (sub.count("--dt")) sc.sim.dt = a.dt;
    if (sub.count("--t-max")) sc.sim.t_max = a.t_max;
    if (sub.count("--record-every")) sc.sim.record_every = a.record_every;
    if (a.threads > 0) sc.sim.threads = a.threads;
    if (!a.integrator.empty())
        sc.sim.integrator =
            a.integrator == "euler" ? Integrator::Euler : Integrator::Exact;

    World world;
    RunRecord rec;
    try {
        world = build_world(sc);
        for (const std::string& w : world.warnings)
            std::fprintf(stderr, "warning: %s\n", w.c_str());
        rec = run(world, sc.sim);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    std::vector<std::string> written;
    try {
        written = write_outputs(a.out_dir, sc, rec);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    MetricsSummary ms = metrics(rec);
    int arrived = 0;
    for (double t : rec.arrival_time)
        if (std::isfinite(t)) ++arrived;
    std::printf("scenario: %s (%zu vehicles)\n", sc.name.c_str(),
                sc.uavs.size());
    std::printf("steps: %ld  t_end: %.2f s  wall: %.2f s\n", rec.steps,
                rec.t_end, rec.wall_time_s);
    if (ms.completed)
        std::printf("arrived: %d/%zu  last arrival: %.2f s\n", arrived,
                    sc.uavs.size(), ms.t_all_arrived);
    else
        std::printf("arrived: %d/%zu  (time limit reached)\n", arrived,
                    sc.uavs.size());
    std::printf("min pair distance: %.3f (t=%.2f)  floor 2 r_s = %.1f\n",
                ms.min_p_dist, ms.t_min_p_dist, 2.0 * sc.cp.r_s);
    std::printf("min tube margin:   %.3f (t=%.2f)  floor r_s   = %.1f\n",
                ms.min_tube_margin_p, ms.t_min_tube_margin_p, sc.cp.r_s);
    std::printf("post-recovery conflicts: %d  breaches: %d\n",
                ms.post_recovery_conflicts, ms.post_recovery_breaches);
    std::printf("command time: mean %.1f us  max %.1f us\n",
                ms.mean_cmd_time_us, ms.max_cmd_time_us);
    std::printf("wrote %zu files under %s\n", written.size(),
                a.out_dir.c_str());

    if (rec.safety_violation()) return 3;
    if (!rec.completed) return 2;
    return 0;
}

int cmd_check(const std::string& filter) {
    std::vector<checks::CheckResult> results = checks::run_all(filter);
    if (results.empty()) {
        std::fprintf(stderr, "no check matches '%s'\n", filter.c_str());
        return 1;
    }
    size_t width = 0;
    for (const auto& r : results) width = std::max(width, r.name.size());
    int failed = 0;
    for (const auto& r : results) {
        if (!r.pass) ++failed;
        std::printf("%s  %-*s  %s\n", r.pass ? "PASS" : "FAIL",
                    static_cast<int>(width), r.name.c_str(),
                    r.detail.c_str());
    }
    std::printf("%zu checks, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}

struct BenchRow {
    int m = 0;
    double r_s = 0.0;
    double brute_mean = 0.0, brute_max = 0.0;
    double grid_mean = 0.0, grid_max = 0.0;
    bool sets_equal = true;
};

BenchRow bench_one(int m, double r_s) {
    BenchRow row;
    row.m = m;
    row.r_s = r_s;

    SimOptions opts;
    opts.dt = 0.01;
    opts.t_max = 2.0;  // exactly 200 steps
    opts.record_every = 1000000;

    auto stats = [](const std::vector<double>& v, double& mean, double& mx) {
        mean = 0.0;
        mx = 0.0;
        for (double x : v) {
            mean += x;
            mx = std::max(mx, x);
        }
        if (!v.empty()) mean /= static_cast<double>(v.size());
    };

    opts.neighbor_mode = NeighborMode::Brute;
    RunRecord rb = run(checks::ring_world(m, r_s), opts);
    stats(rb.traces.cmd_time_us, row.brute_mean, row.brute_max);

    opts.neighbor_mode = NeighborMode::Grid;
    Simulator sim(checks::ring_world(m, r_s), opts);
    bool done = false;
    for (int s = 0; s < 200 && !done; ++s) {
        const World& w = sim.world();
        for (int i = 0; i < static_cast<int>(w.uavs.size()); ++i)
            if (neighbor_indices(w, i, NeighborMode::Brute) !=
                neighbor_indices(w, i, NeighborMode::Grid))
                row.sets_equal = false;
        done = sim.step();
    }
    RunRecord rg = sim.take_record();
    stats(rg.traces.cmd_time_us, row.grid_mean, row.grid_max);
    return row;
}

int cmd_bench(const std::vector<int>& ms, const std::vector<double>& rss) {
    std::vector<BenchRow> rows;
    bool all_equal = true;
    std::printf("%6s %6s  %22s  %22s  %s\n", "M", "r_s",
                "brute mean/max (us)", "grid mean/max (us)", "sets");
    for (double rs : rss) {
        for (int m : ms) {
            BenchRow r = bench_one(m, rs);
            rows.push_back(r);
            all_equal = all_equal && r.sets_equal;
            std::printf("%6d %6.1f  %10.1f / %8.1f  %10.1f / %8.1f  %s\n",
                        r.m, r.r_s, r.brute_mean, r.brute_max, r.grid_mean,
                        r.grid_max, r.sets_equal ? "equal" : "MISMATCH");
        }
        for (size_t i = 1; i < ms.size(); ++i) {
            const BenchRow& a = rows[rows.size() - ms.size() + i - 1];
            const BenchRow& b = rows[rows.size() - ms.size() + i];
            double mr = static_cast<double>(b.m) / a.m;
            std::printf(
                "growth M %d -> %d (x%.1f vehicles): brute x%.2f, grid "
                "x%.2f\n",
                a.m, b.m, mr, b.brute_mean / std::max(a.brute_mean, 1e-9),
                b.grid_mean / std::max(a.grid_mean, 1e-9));
        }
    }
    return all_equal ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic multi-vehicle virtual tube simulator"};
    app.set_version_flag("--version", vtube::kVersion);
    app.require_subcommand(1);

    RunArgs ra;
    CLI::App* sub_run = app.add_subcommand("run", "run a scenario file");
    sub_run->add_option("scenario", ra.scenario_path, "scenario JSON path")
        ->required();
    sub_run->add_option("-o,--out", ra.out_dir, "output directory")
        ->capture_default_str();
    sub_run->add_option("--dt", ra.dt, "time step override (s)");
    sub_run->add_option("--t-max", ra.t_max, "time limit override (s)");
    sub_run->add_option("--integrator", ra.integrator, "exact|euler")
        ->check(CLI::IsMember({"exact", "euler"}));
    sub_run->add_option("--threads", ra.threads, "command worker threads")
        ->envname("VTUBE_THREADS");
    sub_run->add_option("--record-every", ra.record_every,
                        "trajectory row decimation");

    std::string filter;
    CLI::App* sub_check =
        app.add_subcommand("check", "run the invariant check suite");
    sub_check->add_option("--filter", filter,
                          "only checks whose name contains this");

    std::vector<int> bench_m = {10, 40, 160};
    std::vector<double> bench_rs = {20.0};
    CLI::App* sub_bench = app.add_subcommand(
        "bench", "command-timing benchmark on ring swarms");
    sub_bench->add_option("--m", bench_m, "swarm sizes")
        ->delimiter(',')
        ->capture_default_str();
    sub_bench->add_option("--rs", bench_rs, "safety radii")
        ->delimiter(',')
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(sub_run)) return cmd_run(ra, *sub_run);
        if (app.got_subcommand(sub_check)) return cmd_check(filter);
        return cmd_bench(bench_m, bench_rs);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
