#include "vtube/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace vtube {

namespace {

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

bool live(const Uav& u) { return !u.state.arrived; }

/// Uniform hash grid over raw positions, cell size r_d. Any pair within
/// the detection radius shares a cell or sits in adjacent cells.
class NeighborIndex {
  public:
    NeighborIndex(const World& w, NeighborMode mode) : w_(&w) {
        int n = 0;
        for (const Uav& u : w.uavs)
            if (live(u)) ++n;
        use_grid_ = mode == NeighborMode::Grid ||
                    (mode == NeighborMode::Auto && n > 64);
        if (!use_grid_) return;
        cell_ = w.cp.r_d;
        for (size_t i = 0; i < w.uavs.size(); ++i) {
            if (!live(w.uavs[i])) continue;
            cells_[key(w.uavs[i].state.p)].push_back(static_cast<int>(i));
        }
    }

    void query(int i, std::vector<int>& out) const {
        out.clear();
        const World& w = *w_;
        const Uav& self = w.uavs[i];
        double gate_xi = w.cp.r_a + w.cp.r_s;
        auto consider = [&](int j) {
            if (j == i) return;
            const Uav& other = w.uavs[j];
            if (!live(other)) return;
            if ((self.state.p - other.state.p).norm() > w.cp.r_d) return;
            if ((self.state.xi - other.state.xi).norm() > gate_xi) return;
            out.push_back(j);
        };
        if (!use_grid_) {
            for (size_t j = 0; j < w.uavs.size(); ++j)
                consider(static_cast<int>(j));
            return;
        }
        long long cx = coord(self.state.p.x);
        long long cy = coord(self.state.p.y);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = cells_.find(pack(cx + dx, cy + dy));
                if (it == cells_.end()) continue;
                for (int j : it->second) consider(j);
            }
        }
        std::sort(out.begin(), out.end());
    }

  private:
    long long coord(double x) const {
        return static_cast<long long>(std::floor(x / cell_));
    }
    static long long pack(long long ix, long long iy) {
        return (ix << 32) ^ (iy & 0xffffffffLL);
    }
    long long key(const Vec2& p) const { return pack(coord(p.x), coord(p.y)); }

    const World* w_;
    bool use_grid_ = false;
    double cell_ = 0.0;
    std::unordered_map<long long, std::vector<int>> cells_;
};

}  // namespace

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Arrival: return "Arrival";
        case EventKind::ConflictStart: return "ConflictStart";
        case EventKind::ConflictEnd: return "ConflictEnd";
        case EventKind::TubeBreachStart: return "TubeBreachStart";
        case EventKind::TubeBreachEnd: return "TubeBreachEnd";
        case EventKind::RegionChange: return "RegionChange";
    }
    return "?";
}

World World::create(TubeSpec tube, ControlParams cp, std::vector<Uav> uavs) {
    if (uavs.empty()) throw std::invalid_argument("World: no vehicles");
    World w;
    w.tube = tube;
    w.cp = cp;
    w.uavs = std::move(uavs);

    double r_v = 0.0;
    for (size_t i = 0; i < w.uavs.size(); ++i) {
        Uav& u = w.uavs[i];
        if (!(u.params.l > 0.0))
            throw std::invalid_argument(fmt("World: uav %d needs l > 0", u.params.id));
        if (!(u.params.vm > 0.0))
            throw std::invalid_argument(fmt("World: uav %d needs vm > 0", u.params.id));
        for (size_t j = 0; j < i; ++j)
            if (w.uavs[j].params.id == u.params.id)
                throw std::invalid_argument(fmt("World: duplicate uav id %d", u.params.id));
        u.state.xi = filtered_position(u.state.p, u.state.v, u.params.l);
        u.state.region = classify_region(u.state.xi, w.tube);
        u.state.arrived = false;
        r_v = std::max(r_v, u.params.vm / u.params.l);
    }
    w.limits.r_v = r_v;

    if (!(cp.r_d > cp.r_s + cp.r_a + 2.0 * r_v))
        throw std::invalid_argument(
            fmt("World: detection radius r_d=%g must exceed r_s + r_a + 2 r_v = %g",
                cp.r_d, cp.r_s + cp.r_a + 2.0 * r_v));
    if (tube.lane_count() > 0 && !(tube.r_t() > tube.lane_count() * cp.r_a))
        throw std::invalid_argument(
            fmt("World: half-width %g cannot host %d lanes of width r_a=%g",
                tube.r_t(), tube.lane_count(), cp.r_a));

    w.aux = build_aux_tubes(w.tube, cp.r_sr, cp.r_rt, cp.r_b);

    for (size_t i = 0; i < w.uavs.size(); ++i) {
        const Uav& a = w.uavs[i];
        if (a.state.v.norm() > a.params.vm)
            w.warnings.push_back(fmt("uav %d: initial speed %.3f exceeds vm=%.3f; speed bound void",
                                     a.params.id, a.state.v.norm(), a.params.vm));
        if (arrival_test(a.state.p, w.tube, cp.eps_0))
            w.warnings.push_back(fmt("uav %d starts at or past the finishing line", a.params.id));
        for (size_t j = i + 1; j < w.uavs.size(); ++j) {
            const Uav& b = w.uavs[j];
            double d = (a.state.xi - b.state.xi).norm();
            if (d <= 2.0 * cp.r_s)
                w.warnings.push_back(
                    fmt("uavs %d,%d: initial filtered separation %.3f <= 2 r_s = %g",
                        a.params.id, b.params.id, d, 2.0 * cp.r_s));
        }
    }
    return w;
}

std::vector<int> neighbor_indices(const World& w, int i, NeighborMode mode) {
    std::vector<int> out;
    NeighborIndex(w, mode).query(i, out);
    return out;
}

std::vector<NeighborState> detect_neighbors(const World& w, int i) {
    std::vector<NeighborState> out;
    for (int j : neighbor_indices(w, i, NeighborMode::Auto)) {
        const UavState& s = w.uavs[j].state;
        out.push_back({s.p, s.v, s.xi});
    }
    return out;
}

Simulator::Simulator(World w, SimOptions opts)
    : world_(std::move(w)), opts_(opts) {
    if (!(opts_.dt > 0.0)) throw std::invalid_argument("Simulator: dt must be positive");
    if (!(opts_.t_max > 0.0)) throw std::invalid_argument("Simulator: t_max must be positive");
    if (opts_.threads < 1) throw std::invalid_argument("Simulator: threads must be >= 1");
    if (opts_.record_every < 1) throw std::invalid_argument("Simulator: record_every must be >= 1");

    size_t m = world_.uavs.size();
    max_steps_ = std::llround(opts_.t_max / opts_.dt);
    commands_.assign(m, Vec2{});
    conflict_.assign(m * m, 0);
    breach_.assign(m, 0);
    in_band_.assign(m, 0);
    prev_region_.assign(m, Region::TubeExtension);
    region_known_.assign(m, 0);
    arrival_logged_.assign(m, 0);
    record_.arrival_time.assign(m, std::numeric_limits<double>::quiet_NaN());
    record_.warnings = world_.warnings;
}

int Simulator::live_count() const {
    int n = 0;
    for (const Uav& u : world_.uavs)
        if (live(u)) ++n;
    return n;
}

bool Simulator::all_arrived() const {
    for (size_t i = 0; i < world_.uavs.size(); ++i)
        if (!world_.uavs[i].state.arrived && !arrival_logged_[i]) return false;
    return true;
}

void Simulator::scan_arrivals(double t) {
    for (size_t i = 0; i < world_.uavs.size(); ++i) {
        Uav& u = world_.uavs[i];
        if (!live(u) || arrival_logged_[i]) continue;
        if (!arrival_test(u.state.p, world_.tube, world_.cp.eps_0)) continue;
        arrival_logged_[i] = 1;
        record_.arrival_time[i] = t;
        record_.events.push_back({t, EventKind::Arrival, {u.params.id}, ""});
        u.state.region = classify_region(u.state.xi, world_.tube);
        record_.rows.push_back({t, u.params.id, u.state.p, u.state.v, u.state.xi,
                                Vec2{0.0, 0.0}, u.state.region, true});
        if (opts_.despawn_on_arrival) u.state.arrived = true;
    }
}

void Simulator::observe(double t) {
    const size_t m = world_.uavs.size();
    const double inf = std::numeric_limits<double>::infinity();
    const double two_rs = 2.0 * world_.cp.r_s;
    const double r_t = world_.tube.r_t();

    double min_p = inf, min_xi = inf, margin_p = inf, margin_xi = inf;

    xi_live_.clear();
    vm_live_.clear();

    for (size_t i = 0; i < m; ++i) {
        Uav& u = world_.uavs[i];
        if (!live(u)) {
            if (breach_[i]) {
                breach_[i] = 0;
                record_.events.push_back({t, EventKind::TubeBreachEnd,
                                          {u.params.id}, "despawn"});
            }
            in_band_[i] = 0;
            continue;
        }

        Region r = classify_region(u.state.xi, world_.tube);
        if (region_known_[i] && r != prev_region_[i])
            record_.events.push_back({t, EventKind::RegionChange, {u.params.id},
                                      fmt("%s->%s", to_string(prev_region_[i]), to_string(r))});
        prev_region_[i] = r;
        region_known_[i] = 1;
        u.state.region = r;

        Vec2 fxi = world_.tube.to_frame(u.state.xi);
        Vec2 fp = world_.tube.to_frame(u.state.p);
        bool in_zone = r == Region::TubeInterior || r == Region::TubeExtension;
        double mxi = r_t - std::fabs(fxi.y);

        bool breach_now = in_zone && mxi <= world_.cp.r_s;
        if (breach_now && !breach_[i]) {
            bool crossing = in_band_[i] != 0;
            if (crossing && t > 0.0) ++record_.post_recovery_breaches;
            record_.events.push_back({t, EventKind::TubeBreachStart, {u.params.id},
                                      fmt("%s margin=%.6g", crossing ? "crossing" : "entry", mxi)});
        } else if (!breach_now && breach_[i]) {
            record_.events.push_back({t, EventKind::TubeBreachEnd, {u.params.id},
                                      fmt("margin=%.6g", mxi)});
        }
        breach_[i] = breach_now;
        in_band_[i] = in_zone;

        if (fxi.x >= 0.0 && std::fabs(fxi.y) <= r_t) {
            margin_p = std::min(margin_p, r_t - std::fabs(fp.y));
            margin_xi = std::min(margin_xi, mxi);
        }

        record_.max_speed_excess = std::max(record_.max_speed_excess,
                                            u.state.v.norm() - u.params.vm);

        xi_live_.push_back(u.state.xi);
        vm_live_.push_back(u.params.vm);
    }

    for (size_t i = 0; i < m; ++i) {
        const Uav& a = world_.uavs[i];
        for (size_t j = i + 1; j < m; ++j) {
            const Uav& b = world_.uavs[j];
            size_t idx = i * m + j;
            if (!live(a) || !live(b)) {
                if (conflict_[idx]) {
                    conflict_[idx] = 0;
                    record_.events.push_back({t, EventKind::ConflictEnd,
                                              {a.params.id, b.params.id}, "despawn"});
                }
                continue;
            }
            double dxi = (a.state.xi - b.state.xi).norm();
            double dp = (a.state.p - b.state.p).norm();
            min_p = std::min(min_p, dp);
            min_xi = std::min(min_xi, dxi);
            record_.min_sep_transfer_slack = std::min(record_.min_sep_transfer_slack,
                                               dp - (dxi - 2.0 * world_.limits.r_v));
            bool in_conflict = dxi <= two_rs;
            if (in_conflict && !conflict_[idx]) {
                if (t > 0.0) ++record_.post_recovery_conflicts;
                record_.events.push_back({t, EventKind::ConflictStart,
                                          {a.params.id, b.params.id},
                                          fmt("xi_dist=%.6g", dxi)});
            } else if (!in_conflict && conflict_[idx]) {
                record_.events.push_back({t, EventKind::ConflictEnd,
                                          {a.params.id, b.params.id},
                                          fmt("xi_dist=%.6g", dxi)});
            }
            conflict_[idx] = in_conflict;
        }
    }

    record_.traces.t.push_back(t);
    record_.traces.min_p_dist.push_back(min_p);
    record_.traces.min_xi_dist.push_back(min_xi);
    record_.traces.tube_margin_p.push_back(margin_p);
    record_.traces.tube_margin_xi.push_back(margin_xi);
    record_.traces.total_v.push_back(
        total_v(xi_live_, vm_live_, world_.tube, world_.cp));
    record_.traces.cmd_time_us.push_back(0.0);
}

void Simulator::compute_commands() {
    auto t0 = std::chrono::steady_clock::now();
    const size_t m = world_.uavs.size();
    NeighborIndex index(world_, opts_.neighbor_mode);

    auto worker = [&](size_t lo, size_t hi) {
        std::vector<int> idx;
        std::vector<NeighborState> nbs;
        for (size_t i = lo; i < hi; ++i) {
            const Uav& u = world_.uavs[i];
            if (!live(u)) continue;
            index.query(static_cast<int>(i), idx);
            nbs.clear();
            for (int j : idx) {
                const UavState& s = world_.uavs[j].state;
                nbs.push_back({s.p, s.v, s.xi});
            }
            ControlTermSet ts =
                u.state.region == Region::PastFinish
                    ? tube_command(u.state.xi, u.params.vm, nbs, world_.tube,
                                   world_.cp)
                    : dispatch(u.state.xi, u.params.vm, nbs, world_.tube,
                               world_.aux, world_.cp);
            commands_[i] = ts.command;
        }
    };

    int nt = opts_.threads;
    if (nt <= 1 || m < 2) {
        worker(0, m);
    } else {
        size_t chunk = (m + nt - 1) / nt;
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(nt);
        for (int w = 0; w < nt; ++w) {
            size_t lo = std::min(m, w * chunk);
            size_t hi = std::min(m, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi, w] {
                try {
                    worker(lo, hi);
                } catch (...) {
                    errs[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    double us = std::chrono::duration<double, std::micro>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    record_.traces.cmd_time_us.back() = us;
}

void Simulator::record_rows(double t) {
    if (k_ % opts_.record_every != 0) return;
    for (size_t i = 0; i < world_.uavs.size(); ++i) {
        const Uav& u = world_.uavs[i];
        if (!live(u)) continue;
        record_.rows.push_back({t, u.params.id, u.state.p, u.state.v,
                                u.state.xi, commands_[i], u.state.region,
                                false});
    }
}

void Simulator::integrate(double t) {
    for (size_t i = 0; i < world_.uavs.size(); ++i) {
        Uav& u = world_.uavs[i];
        if (!live(u)) continue;
        UavState next = opts_.integrator == Integrator::Exact
                            ? step_exact(u.state, u.params, commands_[i], opts_.dt)
                            : step_euler(u.state, u.params, commands_[i], opts_.dt);
        if (!is_finite(next.p) || !is_finite(next.v))
            throw std::runtime_error(
                fmt("simulation diverged: non-finite state for uav %d at t=%.4f "
                    "(p=%g,%g v=%g,%g vc=%g,%g)",
                    u.params.id, t + opts_.dt, next.p.x, next.p.y, next.v.x,
                    next.v.y, commands_[i].x, commands_[i].y));
        Vec2 expect = u.state.xi + commands_[i] * opts_.dt;
        double resid = (next.xi - expect).norm() / std::max(1.0, next.xi.norm());
        record_.max_xi_residual = std::max(record_.max_xi_residual, resid);
        u.state = next;
    }
}

bool Simulator::step() {
    if (finished_) return false;
    double t = k_ * opts_.dt;
    world_.t = t;
    // Catch states that went non-finite before the observers and the
    // potentials touch them (NaN distances would otherwise surface as
    // confusing domain errors deep inside the barrier evaluation).
    for (const Uav& u : world_.uavs) {
        if (!live(u)) continue;
        if (!is_finite(u.state.p) || !is_finite(u.state.v) ||
            !is_finite(u.state.xi))
            throw std::runtime_error(
                fmt("simulation diverged: non-finite state for uav %d at "
                    "t=%.4f (p=%g,%g v=%g,%g)",
                    u.params.id, t, u.state.p.x, u.state.p.y, u.state.v.x,
                    u.state.v.y));
    }
    scan_arrivals(t);
    observe(t);
    if (all_arrived() || k_ >= max_steps_) {
        record_.completed = all_arrived();
        record_.t_end = t;
        record_.steps = k_;
        finished_ = true;
        return false;
    }
    compute_commands();
    record_rows(t);
    integrate(t);
    ++k_;
    return true;
}

RunRecord run(World world, const SimOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    Simulator sim(std::move(world), opts);
    while (sim.step()) {
    }
    RunRecord rec = sim.take_record();
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return rec;
}

MetricsSummary metrics(const RunRecord& record) {
    MetricsSummary s;
    const MetricTraces& tr = record.traces;
    auto scan_min = [&](const std::vector<double>& v, double& out, double& t_out) {
        out = std::numeric_limits<double>::infinity();
        t_out = 0.0;
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] < out) {
                out = v[i];
                t_out = tr.t[i];
            }
        }
    };
    scan_min(tr.min_p_dist, s.min_p_dist, s.t_min_p_dist);
    scan_min(tr.min_xi_dist, s.min_xi_dist, s.t_min_xi_dist);
    scan_min(tr.tube_margin_p, s.min_tube_margin_p, s.t_min_tube_margin_p);
    double t_dummy = 0.0;
    scan_min(tr.tube_margin_xi, s.min_tube_margin_xi, t_dummy);

    s.t_all_arrived = std::numeric_limits<double>::quiet_NaN();
    if (record.completed) {
        double worst = 0.0;
        for (double a : record.arrival_time)
            if (std::isfinite(a)) worst = std::max(worst, a);
        s.t_all_arrived = worst;
    }

    double sum = 0.0;
    long n = 0;
    for (double us : tr.cmd_time_us) {
        if (us <= 0.0) continue;
        sum += us;
        ++n;
        s.max_cmd_time_us = std::max(s.max_cmd_time_us, us);
    }
    s.mean_cmd_time_us = n > 0 ? sum / n : 0.0;

    for (const Event& e : record.events)
        if (e.kind == EventKind::ConflictStart) ++s.conflict_starts;

    s.max_speed_excess = record.max_speed_excess;
    s.min_sep_transfer_slack = record.min_sep_transfer_slack;
    s.max_xi_residual = record.max_xi_residual;
    s.post_recovery_conflicts = record.post_recovery_conflicts;
    s.post_recovery_breaches = record.post_recovery_breaches;
    s.completed = record.completed;
    s.wall_time_s = record.wall_time_s;
    return s;
}

}  // namespace vtube
