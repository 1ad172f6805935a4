#include "vtube/controller.hpp"

#include <stdexcept>

namespace vtube {

Vec2 term_line(const Vec2& xi_l, double k1, double vm, const Mat2& A23) {
    return -(A23 * vec_sat(xi_l * k1, vm));
}

Vec2 term_avoid(const Vec2& xi, std::span<const NeighborState> neighbors,
                const ControlParams& cp) {
    Vec2 sum{0.0, 0.0};
    for (const NeighborState& n : neighbors) {
        Vec2 d = xi - n.xi;
        sum += d * gain_b(d.norm(), cp);
    }
    return sum;
}

Vec2 term_keep(const Vec2& xi_t, double r_t, const ControlParams& cp,
               const Mat2& A12) {
    return -((A12 * xi_t) * gain_c(xi_t.norm(), r_t, cp));
}

ControlTermSet tube_command(const Vec2& xi, double vm,
                            std::span<const NeighborState> neighbors,
                            const TubeSpec& tube, const ControlParams& cp) {
    ControlTermSet t;
    Vec2 rel = xi - tube.p2();
    t.line = term_line(tube.A23() * rel, cp.k1, vm, tube.A23());
    t.avoid = term_avoid(xi, neighbors, cp);
    t.keep = term_keep(tube.A12() * rel, tube.r_t(), cp, tube.A12());
    t.command = vec_sat(t.line + t.avoid + t.keep, vm);
    return t;
}

AuxTubes build_aux_tubes(const TubeSpec& tube, double r_sr, double r_rt,
                         double r_b) {
    if (!(r_sr > 0.0 && r_rt > 0.0))
        throw std::invalid_argument("build_aux_tubes: half-widths must be positive");
    if (!(r_b >= 0.0))
        throw std::invalid_argument("build_aux_tubes: r_b must be >= 0");

    double L = tube.length();
    double rt = tube.r_t();

    auto mk = [&](Vec2 f1, Vec2 f2, double half, double sign) {
        return TubeSpec::create_with_normal_sign(tube.to_world(f1),
                                                 tube.to_world(f2), half, sign);
    };

    AuxTubes a;
    // Left-side tubes carry their finishing-line end on the left of their
    // own axis, the right-side mirrors on the right; either way the end
    // lands on the main-tube side of the auxiliary centerline.
    a.ls2r = mk({L, rt + r_sr}, {-r_b, rt + r_sr}, r_sr, +1.0);
    a.rs2r = mk({L, -(rt + r_sr)}, {-r_b, -(rt + r_sr)}, r_sr, -1.0);
    a.lr2t = mk({-r_rt, rt + r_rt}, {-r_rt, rt - r_b}, r_rt, +1.0);
    a.rr2t = mk({-r_rt, -(rt + r_rt)}, {-r_rt, -(rt - r_b)}, r_rt, -1.0);
    a.r_sr = r_sr;
    a.r_rt = r_rt;
    a.r_b = r_b;
    return a;
}

ControlTermSet dispatch(const Vec2& xi, double vm,
                        std::span<const NeighborState> neighbors,
                        const TubeSpec& tube, const AuxTubes& aux,
                        const ControlParams& cp) {
    switch (classify_region(xi, tube)) {
        case Region::TubeInterior:
        case Region::TubeExtension:
            return tube_command(xi, vm, neighbors, tube, cp);
        case Region::LeftStandby:
            return tube_command(xi, vm, neighbors, aux.ls2r, cp);
        case Region::RightStandby:
            return tube_command(xi, vm, neighbors, aux.rs2r, cp);
        case Region::LeftReady:
            return tube_command(xi, vm, neighbors, aux.lr2t, cp);
        case Region::RightReady:
            return tube_command(xi, vm, neighbors, aux.rr2t, cp);
        case Region::PastFinish:
            throw std::logic_error("dispatch: filtered position past the finishing line");
    }
    throw std::logic_error("dispatch: unreachable");
}

}  // namespace vtube
