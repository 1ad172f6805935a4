#pragma once

#include "vtube/vec2.hpp"

namespace vtube {

/// Magnitude saturation that preserves direction:
///   sat(v, vm) = v                if ||v|| <= vm
///              = v * vm / ||v||   otherwise.
/// Odd in v, which makes -sat(u, vm) and sat(-u, vm) identical.
Vec2 vec_sat(const Vec2& v, double vm);

/// Cubic ramp-down weight: 1 on (-inf, d1], a C1 cubic on [d1, d2], 0 on
/// [d2, inf). Requires d1 < d2. Coefficients are cached so the hot loop
/// evaluates a plain polynomial.
struct BumpSpec {
    double d1 = 0.0, d2 = 0.0;
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;

    static BumpSpec create(double d1, double d2);
};

double bump(double x, const BumpSpec& s);

/// Derivative of bump(). Zero on both flat branches; at the knots the flat
/// value 0 is returned (the cubic's one-sided derivative there is also 0,
/// so the function is C1).
double bump_deriv(double x, const BumpSpec& s);

/// Smooth ramp approximating min(x, 1) from below on x >= 0:
///   identity on [0, x1], a circular arc of radius eps_s on [x1, x2],
///   constant 1 on [x2, inf), with
///   x2 = 1 + eps_s / tan(67.5 deg),  x1 = x2 - sin(45 deg) * eps_s.
/// The arc is tangent to both neighbouring branches, so the ramp is C1.
struct SmoothSatSpec {
    double eps_s = 0.0;
    double x1 = 0.0, x2 = 0.0;

    static SmoothSatSpec create(double eps_s);

    /// Largest eps_s for which x1 >= 0 (the identity branch survives).
    static double max_eps();
};

/// Evaluates the ramp. Throws std::domain_error for x < 0.
double smooth_sat(double x, const SmoothSatSpec& s);

/// Derivative of the ramp: 1 on the identity branch, (x2 - x) / sqrt(
/// eps_s^2 - (x - x2)^2) on the arc, 0 once saturated. At x1 both branches
/// agree (value 1); at x2 the saturated 0 is returned.
double smooth_sat_deriv(double x, const SmoothSatSpec& s);

/// Line integral of the saturated linear field along a radial path:
///   vli_value(n, k, a) = integral_0^n min(k z, a) dz
///                      = k n^2 / 2                     if k n <= a
///                      = a^2 / (2 k) + a (n - a / k)   otherwise.
/// Requires k > 0, a > 0, n >= 0.
double vli_value(double norm_y, double k, double a);

}  // namespace vtube
