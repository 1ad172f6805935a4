#pragma once

#include <span>

#include "vtube/geometry.hpp"
#include "vtube/shaping.hpp"

namespace vtube {

/// Gains, radii and regularizers shared by every controller term.
///   r_s  safety radius (physical clearance per vehicle)
///   r_a  avoidance radius (barrier reach beyond r_s)
///   r_d  detection radius (sensing range, raw positions)
///   r_b  buffer pushing auxiliary finishing lines past region borders
///   r_sr half-width of the standby-to-ready tubes
///   r_rt half-width of the ready-to-tube tubes
/// Construction pre-bakes the two ramp-down weights and the smooth
/// saturation so hot-loop evaluations stay table-free polynomial work.
struct ControlParams {
    double k1 = 1.0, k2 = 1.0, k3 = 1.0;
    double eps_m = 1e-6, eps_t = 1e-6, eps_s = 1e-6;
    double eps_0 = 1.0;
    double r_s = 0.0, r_a = 0.0, r_d = 0.0;
    double r_b = 0.0, r_sr = 10000.0, r_rt = 10000.0;

    BumpSpec sigma_m;   // weight on pair distance, knots (2 r_s, r_s + r_a)
    BumpSpec sigma_t;   // weight on edge margin, knots (r_s, r_a)
    SmoothSatSpec ssat; // shared smooth ramp

    static ControlParams create(double r_s, double r_a, double r_d,
                                double k1 = 1.0, double k2 = 1.0,
                                double k3 = 1.0, double eps_m = 1e-6,
                                double eps_t = 1e-6, double eps_s = 1e-6,
                                double eps_0 = 1.0);
};

/// Progress potential: line integral of the saturated pull toward the
/// finishing line, evaluated at ||xi_l||. vm is the commanding vehicle's
/// speed limit.
double v_l(double norm_xi_l, double vm, const ControlParams& cp);

/// Pairwise avoidance barrier on the filtered distance. Zero for
/// dist >= r_s + r_a, grows like k2 (1 + eps_m) / (eps_m * dist) as the
/// distance approaches 2 r_s and below. Throws std::domain_error for
/// dist <= 0.
double v_m(double dist, const ControlParams& cp);

/// Tube-keeping barrier on the cross-tube component ||xi_t|| for a tube of
/// half-width r_t. Zero while the edge margin r_t - ||xi_t|| stays at or
/// above r_a; grows toward k3 (||xi_t|| + eps_t) / (eps_t (r_t - r_s)) as
/// the margin shrinks past r_s. Finite for any norm (including outside the
/// band), which the region-switching logic relies on.
double v_t(double norm_xi_t, double r_t, const ControlParams& cp);

/// Avoidance gain b = -(dV_m/d dist) / dist, closed form. Nonnegative;
/// zero on the flat region dist >= r_s + r_a.
double gain_b(double dist, const ControlParams& cp);

/// Keeping gain c = (dV_t/d norm) / norm, closed form. Nonnegative; zero
/// whenever the edge margin is at least r_a, and defined as 0 at norm = 0
/// (the keeping force c * xi_t vanishes there in the limit).
double gain_c(double norm_xi_t, double r_t, const ControlParams& cp);

/// Total swarm potential against one tube:
///   sum_i [ v_l(i) + 1/2 sum_{j != i} v_m(ij) + v_t(i) ].
/// Diagnostic only; meaningful as a Lyapunov function when every vehicle
/// is inside the tube or its extension.
double total_v(std::span<const Vec2> xi, std::span<const double> vm,
               const TubeSpec& tube, const ControlParams& cp);

}  // namespace vtube
