#include "vtube/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace vtube {

const char* to_string(Region r) {
    switch (r) {
        case Region::TubeInterior: return "TubeInterior";
        case Region::TubeExtension: return "TubeExtension";
        case Region::LeftStandby: return "LeftStandby";
        case Region::RightStandby: return "RightStandby";
        case Region::LeftReady: return "LeftReady";
        case Region::RightReady: return "RightReady";
        case Region::PastFinish: return "PastFinish";
    }
    return "?";
}

Mat2 projection_matrix(const Vec2& a, const Vec2& b) {
    Vec2 d = a - b;
    double n2 = d.norm_sq();
    if (n2 <= 0.0)
        throw std::invalid_argument("projection_matrix: coincident endpoints");
    return Mat2::identity() - Mat2::outer(d, d) * (1.0 / n2);
}

double line_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    return (projection_matrix(a, b) * (p - a)).norm();
}

TubeSpec TubeSpec::create(const Vec2& p1, const Vec2& p2, double r_t,
                          int lane_count) {
    return create_with_normal_sign(p1, p2, r_t, +1.0, lane_count);
}

TubeSpec TubeSpec::create_with_normal_sign(const Vec2& p1, const Vec2& p2,
                                           double r_t, double normal_sign,
                                           int lane_count) {
    if (!(r_t > 0.0))
        throw std::invalid_argument("TubeSpec: r_t must be positive");
    if ((p2 - p1).norm_sq() <= 0.0)
        throw std::invalid_argument("TubeSpec: p1 and p2 coincide");
    if (normal_sign != 1.0 && normal_sign != -1.0)
        throw std::invalid_argument("TubeSpec: normal_sign must be +1 or -1");

    TubeSpec t;
    t.p1_ = p1;
    t.p2_ = p2;
    t.r_t_ = r_t;
    t.lane_count_ = lane_count;
    t.len_ = (p2 - p1).norm();
    t.axis_ = (p2 - p1) / t.len_;
    t.left_ = t.axis_.perp();
    t.p3_ = p2 + t.left_ * (normal_sign * r_t);
    t.p4_ = p1 + t.left_ * (normal_sign * r_t);
    t.a12_ = projection_matrix(p1, p2);
    t.a23_ = projection_matrix(t.p2_, t.p3_);
    return t;
}

Vec2 TubeSpec::to_frame(const Vec2& world) const {
    Vec2 d = world - p1_;
    return {d.dot(axis_), d.dot(left_)};
}

Vec2 TubeSpec::to_world(const Vec2& frame) const {
    return p1_ + axis_ * frame.x + left_ * frame.y;
}

TubeErrors tube_errors(const Vec2& xi, const Vec2& p, const TubeSpec& tube) {
    TubeErrors e;
    e.xi_l = tube.A23() * (xi - tube.p2());
    e.xi_t = tube.A12() * (xi - tube.p2());
    e.p_l = tube.A23() * (p - tube.p2());
    e.p_t = tube.A12() * (p - tube.p2());
    return e;
}

bool arrival_test(const Vec2& p, const TubeSpec& tube, double eps0) {
    Vec2 along = tube.p2() - tube.p1();
    return along.dot(tube.A23() * (p - tube.p2())) >= -eps0;
}

Region classify_region(const Vec2& xi, const TubeSpec& tube) {
    Vec2 f = tube.to_frame(xi);
    if (std::fabs(f.y) <= tube.r_t()) {
        if (f.x <= 0.0) return Region::TubeExtension;
        if (f.x <= tube.length()) return Region::TubeInterior;
        return Region::PastFinish;
    }
    if (f.y > tube.r_t())
        return f.x > 0.0 ? Region::LeftStandby : Region::LeftReady;
    return f.x > 0.0 ? Region::RightStandby : Region::RightReady;
}

}  // namespace vtube
