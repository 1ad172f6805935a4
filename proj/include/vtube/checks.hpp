#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vtube/simulation.hpp"

namespace vtube::checks {

// Reference implementations kept deliberately independent of the closed
// forms they validate. None of these run on the control path.

/// Adaptive Simpson quadrature of f over [a, b] to the given absolute
/// tolerance.
double quad_integrate(const std::function<double(double)>& f, double a,
                      double b, double tol);

struct RefState {
    Vec2 p, v;
};

/// Reference integration of p' = v, v' = -l (v - vc) with classic RK4 in
/// `substeps` slices of dt. Converges to the true solution as substeps
/// grows; used to validate the exact one-step update.
RefState rk4_reference(const RefState& s0, double l, const Vec2& vc,
                       double dt, int substeps);

/// Central finite difference (f(x+h) - f(x-h)) / (2h).
double central_diff(const std::function<double(double)>& f, double x,
                    double h);

// Shared scenario builders for invariant checks and tests.

/// Eight vehicles in the tube extension with active avoidance barriers
/// and no arrivals for at least 30 s: a pure gradient-flow window where
/// the total potential must decay.
World basic_eight_world();

/// n vehicles (n multiple of 4 preferred) seeded across both ready areas,
/// all funneling into the tube entrance. Vehicle id 1 sits at the far
/// corner and is used as the lone-transit baseline.
World crowded_world(int n);

/// m vehicles on a ring west of the tube entrance, spaced 2 r_s + 10
/// apart along the arc. Scales to hundreds of vehicles; used for the
/// command-timing benchmark and the neighbour-query equivalence sweep.
World ring_world(int m, double r_s);

struct VMonoResult {
    double max_pos_dv = 0.0;  // largest per-step increase of total V
    double min_dv = 0.0;
    bool window_valid = false;  // no arrivals, everyone stayed in tube band
};

/// Steps `world` for `seconds` with the real region-switched command
/// recomposed from its public terms, with the avoidance term scaled by
/// avoid_sign (+1 = nominal, -1 = fault injection for mutation testing).
/// Tracks the per-step change of the total potential.
VMonoResult v_monotonicity_scan(World world, double dt, double seconds,
                                double avoid_sign = 1.0);

/// Longest time any vehicle's speed stays continuously below
/// frac * its vm, computed from a record captured with record_every = 1.
double max_stall_seconds(const RunRecord& record, const World& world,
                         double dt, double frac);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<std::string> check_names();

/// Runs every registered invariant check whose name contains `filter`
/// (all of them when empty).
std::vector<CheckResult> run_all(const std::string& filter = "");

}  // namespace vtube::checks
