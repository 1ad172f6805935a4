#pragma once

#include "vtube/geometry.hpp"

namespace vtube {

struct UavParams {
    int id = 0;
    double l = 0.0;   // velocity-loop bandwidth (1/s)
    double vm = 0.0;  // speed limit (m/s)
};

struct UavState {
    Vec2 p;           // position
    Vec2 v;           // velocity
    Vec2 xi;          // filtered position p + v / l
    Region region = Region::TubeExtension;
    bool arrived = false;
};

/// Swarm-wide bounds derived from the vehicle set.
struct SwarmLimits {
    /// Largest filtered-position lead max_i vm_i / l_i. A filtered
    /// separation of r + 2 r_v guarantees a raw separation of r while
    /// every speed stays within its limit.
    double r_v = 0.0;
};

/// Filtered position xi = p + v / l. The closed loop p' = v,
/// v' = -l (v - v_c) collapses to the single integrator xi' = v_c.
Vec2 filtered_position(const Vec2& p, const Vec2& v, double l);

/// Exact discretization of p' = v, v' = -l (v - v_c) under a command held
/// constant over the step:
///   v+ = v_c + (v - v_c) e^(-l dt)
///   p+ = p + v_c dt + (v - v_c) (1 - e^(-l dt)) / l
/// The induced filtered update is exactly xi+ = xi + v_c dt.
UavState step_exact(const UavState& s, const UavParams& u, const Vec2& vc,
                    double dt);

/// Forward-Euler step of the same model, for integration-error studies.
/// Also satisfies xi+ = xi + v_c dt identically.
UavState step_euler(const UavState& s, const UavParams& u, const Vec2& vc,
                    double dt);

/// Separation transfer from filtered to raw positions: returns false only
/// when ||xi_i - xi_j|| >= r + 2 r_v holds while ||p_i - p_j|| < r, the
/// combination ruled out for speed-feasible states.
bool check_separation_implication(const Vec2& xi_i, const Vec2& xi_j,
                                  const Vec2& p_i, const Vec2& p_j, double r,
                                  double r_v);

}  // namespace vtube
