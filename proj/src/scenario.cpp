#include "vtube/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vtube {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw std::runtime_error(origin + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& origin,
                  const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) fail(origin, path + key + ": missing");
    return *it;
}

double num(const json& j, const char* key, const std::string& origin,
           const std::string& path) {
    const json& v = field(j, key, origin, path);
    if (!v.is_number()) fail(origin, path + key + ": expected a number");
    return v.get<double>();
}

double num_or(const json& j, const char* key, double dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : it->get<double>();
}

Vec2 vec(const json& j, const char* key, const std::string& origin,
         const std::string& path) {
    const json& v = field(j, key, origin, path);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
        !v[1].is_number())
        fail(origin, path + key + ": expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

ScenarioUav parse_uav(const json& j, const std::string& origin,
                      const std::string& path) {
    ScenarioUav u;
    u.id = static_cast<int>(num(j, "id", origin, path));
    u.p0 = vec(j, "p", origin, path);
    u.v0 = j.contains("v") ? vec(j, "v", origin, path) : Vec2{0.0, 0.0};
    u.l = num(j, "l", origin, path);
    u.vm = num(j, "vm", origin, path);
    return u;
}

void expand_generator(const json& g, std::vector<ScenarioUav>& out,
                      const std::string& origin) {
    const std::string path = "generator.";
    std::string placement =
        field(g, "placement", origin, path).get<std::string>();
    int count = static_cast<int>(num(g, "count", origin, path));
    if (count <= 0) fail(origin, "generator.count: must be positive");

    if (placement == "explicit") {
        const json& list = field(g, "list", origin, path);
        if (!list.is_array())
            fail(origin, "generator.list: expected an array");
        if (static_cast<int>(list.size()) != count)
            fail(origin, "generator.count: does not match list length");
        for (const json& e : list) out.push_back(parse_uav(e, origin, path));
        return;
    }

    double l = num(g, "l", origin, path);
    double vm_base = g.contains("vm") ? num(g, "vm", origin, path)
                                      : num(g, "vm_base", origin, path);
    double vm_step = num_or(g, "vm_step", 0.0);
    int start_id = static_cast<int>(num_or(g, "start_id", 1.0));

    if (placement == "grid") {
        Vec2 origin_p = vec(g, "origin", origin, path);
        int cols = static_cast<int>(num(g, "cols", origin, path));
        if (cols <= 0) fail(origin, "generator.cols: must be positive");
        Vec2 spacing = vec(g, "spacing", origin, path);
        for (int k = 0; k < count; ++k) {
            ScenarioUav u;
            u.id = start_id + k;
            u.p0 = {origin_p.x + (k % cols) * spacing.x,
                    origin_p.y + (k / cols) * spacing.y};
            u.l = l;
            u.vm = vm_base + k * vm_step;
            out.push_back(u);
        }
        return;
    }
    if (placement == "ring") {
        Vec2 center = vec(g, "center", origin, path);
        double radius = num(g, "radius", origin, path);
        for (int k = 0; k < count; ++k) {
            double th = 2.0 * 3.14159265358979323846 * k / count;
            ScenarioUav u;
            u.id = start_id + k;
            u.p0 = {center.x + radius * std::cos(th),
                    center.y + radius * std::sin(th)};
            u.l = l;
            u.vm = vm_base + k * vm_step;
            out.push_back(u);
        }
        return;
    }
    fail(origin, "generator.placement: unknown value '" + placement + "'");
}

Scenario parse_scenario_obj(const json& root, const std::string& origin) {
    Scenario sc;
    sc.name = field(root, "name", origin, "").get<std::string>();

    const json& tube = field(root, "tube", origin, "");
    sc.p_t1 = vec(tube, "p1", origin, "tube.");
    sc.p_t2 = vec(tube, "p2", origin, "tube.");
    sc.r_t = num(tube, "r_t", origin, "tube.");
    sc.lane_count = static_cast<int>(num_or(tube, "lanes", 0.0));

    const json& prm = field(root, "params", origin, "");
    double r_s = num(prm, "r_s", origin, "params.");
    double r_a = num(prm, "r_a", origin, "params.");
    double r_d = num(prm, "r_d", origin, "params.");
    sc.cp = ControlParams::create(
        r_s, r_a, r_d, num_or(prm, "k1", 1.0), num_or(prm, "k2", 1.0),
        num_or(prm, "k3", 1.0), num_or(prm, "eps_m", 1e-6),
        num_or(prm, "eps_t", 1e-6), num_or(prm, "eps_s", 1e-6),
        num_or(prm, "eps_0", 1.0));
    sc.cp.r_b = num_or(prm, "r_b", r_a);
    sc.cp.r_sr = num_or(prm, "r_sr", 10000.0);
    sc.cp.r_rt = num_or(prm, "r_rt", 10000.0);

    if (root.contains("sim")) {
        const json& sim = root["sim"];
        sc.sim.dt = num_or(sim, "dt", 0.01);
        sc.sim.t_max = num_or(sim, "t_max", 400.0);
        sc.sim.record_every =
            static_cast<int>(num_or(sim, "record_every", 10.0));
        sc.sim.threads = static_cast<int>(num_or(sim, "threads", 1.0));
        if (sim.contains("integrator")) {
            std::string s = sim["integrator"].get<std::string>();
            if (s == "exact")
                sc.sim.integrator = Integrator::Exact;
            else if (s == "euler")
                sc.sim.integrator = Integrator::Euler;
            else
                fail(origin, "sim.integrator: expected 'exact' or 'euler'");
        }
        if (sim.contains("neighbor_mode")) {
            std::string s = sim["neighbor_mode"].get<std::string>();
            if (s == "auto")
                sc.sim.neighbor_mode = NeighborMode::Auto;
            else if (s == "brute")
                sc.sim.neighbor_mode = NeighborMode::Brute;
            else if (s == "grid")
                sc.sim.neighbor_mode = NeighborMode::Grid;
            else
                fail(origin, "sim.neighbor_mode: expected auto|brute|grid");
        }
    }

    bool any = false;
    if (root.contains("uavs")) {
        const json& list = root["uavs"];
        if (!list.is_array()) fail(origin, "uavs: expected an array");
        for (const json& e : list)
            sc.uavs.push_back(parse_uav(e, origin, "uavs[]."));
        any = !sc.uavs.empty();
    }
    if (root.contains("generator")) {
        expand_generator(root["generator"], sc.uavs, origin);
        any = true;
    }
    if (!any) fail(origin, "scenario defines no vehicles (uavs or generator)");
    return sc;
}

json scenario_to_json(const Scenario& sc) {
    json tube = {{"p1", {sc.p_t1.x, sc.p_t1.y}},
                 {"p2", {sc.p_t2.x, sc.p_t2.y}},
                 {"r_t", sc.r_t}};
    if (sc.lane_count > 0) tube["lanes"] = sc.lane_count;
    json prm = {{"r_s", sc.cp.r_s},   {"r_a", sc.cp.r_a},
                {"r_d", sc.cp.r_d},   {"k1", sc.cp.k1},
                {"k2", sc.cp.k2},     {"k3", sc.cp.k3},
                {"eps_m", sc.cp.eps_m}, {"eps_t", sc.cp.eps_t},
                {"eps_s", sc.cp.eps_s}, {"eps_0", sc.cp.eps_0},
                {"r_b", sc.cp.r_b},   {"r_sr", sc.cp.r_sr},
                {"r_rt", sc.cp.r_rt}};
    json sim = {{"dt", sc.sim.dt},
                {"t_max", sc.sim.t_max},
                {"integrator",
                 sc.sim.integrator == Integrator::Exact ? "exact" : "euler"},
                {"record_every", sc.sim.record_every},
                {"threads", sc.sim.threads},
                {"neighbor_mode",
                 sc.sim.neighbor_mode == NeighborMode::Auto    ? "auto"
                 : sc.sim.neighbor_mode == NeighborMode::Brute ? "brute"
                                                               : "grid"}};
    json uavs = json::array();
    for (const ScenarioUav& u : sc.uavs)
        uavs.push_back({{"id", u.id},
                        {"p", {u.p0.x, u.p0.y}},
                        {"v", {u.v0.x, u.v0.y}},
                        {"l", u.l},
                        {"vm", u.vm}});
    return {{"schema", kScenarioSchema}, {"name", sc.name},
            {"tube", tube},             {"params", prm},
            {"sim", sim},               {"uavs", uavs}};
}

json num_or_str(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + p.string());
    f << content;
    if (!f) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        fail(origin, std::string("invalid JSON: ") + e.what());
    }
    try {
        std::string schema = field(root, "schema", origin, "").get<std::string>();
        if (schema == kManifestSchema)
            return parse_scenario_obj(field(root, "scenario", origin, ""),
                                      origin);
        if (schema == kScenarioSchema) return parse_scenario_obj(root, origin);
        fail(origin, "schema: unsupported value '" + schema + "'");
    } catch (const json::exception& e) {
        fail(origin, std::string("malformed field: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open scenario: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str(), path);
}

World build_world(const Scenario& sc) {
    TubeSpec tube = TubeSpec::create(sc.p_t1, sc.p_t2, sc.r_t, sc.lane_count);
    std::vector<Uav> uavs;
    for (const ScenarioUav& u : sc.uavs) {
        Uav v;
        v.params = {u.id, u.l, u.vm};
        v.state.p = u.p0;
        v.state.v = u.v0;
        uavs.push_back(v);
    }
    return World::create(tube, sc.cp, std::move(uavs));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trajectories_csv(const RunRecord& record) {
    std::string out = "t,id,px,py,vx,vy,xix,xiy,vcx,vcy,region,arrived\n";
    for (const TrajectoryRow& r : record.rows) {
        out += format_double(r.t);
        out += ',';
        out += std::to_string(r.id);
        for (double v : {r.p.x, r.p.y, r.v.x, r.v.y, r.xi.x, r.xi.y, r.vc.x,
                         r.vc.y}) {
            out += ',';
            out += format_double(v);
        }
        out += ',';
        out += to_string(r.region);
        out += r.arrived ? ",1\n" : ",0\n";
    }
    return out;
}

std::vector<std::string> write_outputs(const std::string& out_dir,
                                       const Scenario& sc,
                                       const RunRecord& record) {
    namespace fs = std::filesystem;
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir: " + out_dir);

    std::vector<std::string> written;
    auto emit = [&](const char* name, const std::string& content) {
        fs::path p = dir / name;
        write_file(p, content);
        written.push_back(p.string());
    };

    emit("trajectories.csv", trajectories_csv(record));

    std::string ev;
    for (const Event& e : record.events) {
        json j = {{"t", e.t},
                  {"kind", to_string(e.kind)},
                  {"subjects", e.subjects}};
        if (!e.detail.empty()) j["detail"] = e.detail;
        ev += j.dump();
        ev += '\n';
    }
    emit("events.jsonl", ev);

    MetricsSummary ms = metrics(record);
    json arrivals = json::object();
    for (size_t i = 0; i < record.arrival_time.size(); ++i)
        if (std::isfinite(record.arrival_time[i]))
            arrivals[std::to_string(sc.uavs[i].id)] = record.arrival_time[i];
    json mj = {
        {"schema", "vtube-metrics/1"},
        {"name", sc.name},
        {"completed", ms.completed},
        {"t_end", record.t_end},
        {"steps", record.steps},
        {"t_all_arrived", num_or_str(ms.t_all_arrived)},
        {"arrivals", arrivals},
        {"min_p_dist", {{"value", num_or_str(ms.min_p_dist)}, {"t", ms.t_min_p_dist}}},
        {"min_xi_dist", {{"value", num_or_str(ms.min_xi_dist)}, {"t", ms.t_min_xi_dist}}},
        {"min_tube_margin_p",
         {{"value", num_or_str(ms.min_tube_margin_p)}, {"t", ms.t_min_tube_margin_p}}},
        {"min_tube_margin_xi", num_or_str(ms.min_tube_margin_xi)},
        {"max_speed_excess", num_or_str(ms.max_speed_excess)},
        {"min_sep_transfer_slack", num_or_str(ms.min_sep_transfer_slack)},
        {"max_xi_residual", num_or_str(ms.max_xi_residual)},
        {"cmd_time_us", {{"mean", ms.mean_cmd_time_us}, {"max", ms.max_cmd_time_us}}},
        {"conflict_starts", ms.conflict_starts},
        {"post_recovery_conflicts", ms.post_recovery_conflicts},
        {"post_recovery_breaches", ms.post_recovery_breaches},
        {"wall_time_s", ms.wall_time_s},
        {"warnings", record.warnings},
    };
    emit("metrics.json", mj.dump(2) + "\n");

    json manifest = {{"schema", kManifestSchema},
                     {"version", kVersion},
                     {"scenario", scenario_to_json(sc)}};
    emit("manifest.json", manifest.dump(2) + "\n");

    long plot_stride =
        std::max(1L, std::lround(1.0 / (sc.sim.dt * sc.sim.record_every))) *
        sc.sim.record_every;
    std::string pp = "t,id,px,py,region\n";
    for (const TrajectoryRow& r : record.rows) {
        long k = std::lround(r.t / sc.sim.dt);
        if (r.arrived || k % plot_stride == 0) {
            pp += format_double(r.t);
            pp += ',';
            pp += std::to_string(r.id);
            pp += ',';
            pp += format_double(r.p.x);
            pp += ',';
            pp += format_double(r.p.y);
            pp += ',';
            pp += to_string(r.region);
            pp += '\n';
        }
    }
    emit("plot_positions.csv", pp);

    std::string pm =
        "t,min_p_dist,min_xi_dist,ref_two_rs,tube_margin_p,tube_margin_xi,ref_rs\n";
    const MetricTraces& tr = record.traces;
    for (size_t i = 0; i < tr.t.size(); ++i) {
        long k = std::lround(tr.t[i] / sc.sim.dt);
        if (k % sc.sim.record_every != 0 && i + 1 != tr.t.size()) continue;
        pm += format_double(tr.t[i]);
        for (double v : {tr.min_p_dist[i], tr.min_xi_dist[i], 2.0 * sc.cp.r_s,
                         tr.tube_margin_p[i], tr.tube_margin_xi[i], sc.cp.r_s}) {
            pm += ',';
            pm += format_double(v);
        }
        pm += '\n';
    }
    emit("plot_min_distance.csv", pm);

    return written;
}

}  // namespace vtube
