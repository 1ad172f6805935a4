#include "vtube/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace vtube {

Vec2 filtered_position(const Vec2& p, const Vec2& v, double l) {
    if (!(l > 0.0)) throw std::invalid_argument("filtered_position: l must be positive");
    return p + v / l;
}

UavState step_exact(const UavState& s, const UavParams& u, const Vec2& vc,
                    double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_exact: dt must be positive");
    double e = std::exp(-u.l * dt);
    UavState n = s;
    Vec2 dv = s.v - vc;
    n.v = vc + dv * e;
    n.p = s.p + vc * dt + dv * ((1.0 - e) / u.l);
    n.xi = filtered_position(n.p, n.v, u.l);
    return n;
}

UavState step_euler(const UavState& s, const UavParams& u, const Vec2& vc,
                    double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_euler: dt must be positive");
    UavState n = s;
    n.p = s.p + s.v * dt;
    n.v = s.v - (s.v - vc) * (u.l * dt);
    n.xi = filtered_position(n.p, n.v, u.l);
    return n;
}

bool check_separation_implication(const Vec2& xi_i, const Vec2& xi_j,
                                  const Vec2& p_i, const Vec2& p_j, double r,
                                  double r_v) {
    double xi_dist = (xi_i - xi_j).norm();
    double p_dist = (p_i - p_j).norm();
    if (xi_dist >= r + 2.0 * r_v && p_dist < r) return false;
    return true;
}

}  // namespace vtube
