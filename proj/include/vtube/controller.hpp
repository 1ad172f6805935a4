#pragma once

#include <span>

#include "vtube/dynamics.hpp"
#include "vtube/potentials.hpp"

namespace vtube {

/// Anonymous neighbour sample: what one vehicle learns about another over
/// the detection link. Carries no identity.
struct NeighborState {
    Vec2 p;
    Vec2 v;
    Vec2 xi;
};

/// The three command contributions and their saturated composition:
///   line  = -A23 sat(k1 xi_l, vm)        pull toward the finishing line
///   avoid =  sum_j b(||xi - xi_j||) (xi - xi_j)
///   keep  = -c(||xi_t||) A12 xi_t        push away from the tube edges
///   command = sat(line + avoid + keep, vm)
struct ControlTermSet {
    Vec2 line;
    Vec2 avoid;
    Vec2 keep;
    Vec2 command;
};

Vec2 term_line(const Vec2& xi_l, double k1, double vm, const Mat2& A23);
Vec2 term_avoid(const Vec2& xi, std::span<const NeighborState> neighbors,
                const ControlParams& cp);
Vec2 term_keep(const Vec2& xi_t, double r_t, const ControlParams& cp,
               const Mat2& A12);

/// Full three-term command of one vehicle against one tube.
ControlTermSet tube_command(const Vec2& xi, double vm,
                            std::span<const NeighborState> neighbors,
                            const TubeSpec& tube, const ControlParams& cp);

/// Auxiliary tubes routing vehicles around the main tube entrance. In the
/// main tube's frame (origin at the start point, +x along the axis, +y
/// left), with L the tube length and r_t its half-width:
///   standby-to-ready (left):  (L, r_t + r_sr) -> (-r_b, r_t + r_sr),
///                             half-width r_sr, finishing-line end
///                             (-r_b, r_t)
///   ready-to-tube (left):     (-r_rt, r_t + r_rt) -> (-r_rt, r_t - r_b),
///                             half-width r_rt, finishing-line end
///                             (0, r_t - r_b)
/// Right-side tubes mirror these across the axis. The r_b buffer places
/// each finishing line strictly inside the next region so vehicles cross
/// region borders decisively instead of hovering on them.
struct AuxTubes {
    TubeSpec ls2r;  // left standby -> left ready
    TubeSpec rs2r;  // right standby -> right ready
    TubeSpec lr2t;  // left ready -> tube extension
    TubeSpec rr2t;  // right ready -> tube extension
    double r_sr = 0.0, r_rt = 0.0, r_b = 0.0;
};

AuxTubes build_aux_tubes(const TubeSpec& tube, double r_sr, double r_rt,
                         double r_b);

/// Region-switched command: vehicles in the tube or its extension track
/// the main tube; standby and ready vehicles track the matching auxiliary
/// tube with the same three-term law. Throws std::logic_error for a
/// filtered position past the finishing line (callers decide that case).
ControlTermSet dispatch(const Vec2& xi, double vm,
                        std::span<const NeighborState> neighbors,
                        const TubeSpec& tube, const AuxTubes& aux,
                        const ControlParams& cp);

}  // namespace vtube
