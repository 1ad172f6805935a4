#pragma once

#include "vtube/vec2.hpp"

namespace vtube {

/// Airspace partition around a virtual tube. The tube runs from its start
/// point toward the finishing line; "left"/"right" are taken facing along
/// the tube axis.
enum class Region {
    TubeInterior,
    TubeExtension,
    LeftStandby,
    RightStandby,
    LeftReady,
    RightReady,
    PastFinish,
};

const char* to_string(Region r);

/// Projection onto the orthogonal complement of (a - b):
///   P = I - (a-b)(a-b)^T / ||a-b||^2.
/// Symmetric, idempotent, eigenvalues {0, 1}. Throws std::invalid_argument
/// when a and b coincide.
Mat2 projection_matrix(const Vec2& a, const Vec2& b);

/// Perpendicular distance from p to the infinite line through a and b,
/// computed as || P (p - a) || with P the projection above.
double line_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Straight virtual tube: a band of half-width r_t around the segment
/// p1 -> p2. The finishing line stands perpendicular to the axis at p2;
/// p3 marks its far end (||p2 - p3|| = r_t), p4 the matching end of the
/// starting line at p1.
class TubeSpec {
  public:
    /// Empty placeholder (zero length, zero width). Only useful as a slot
    /// to assign a created tube into; every populated instance comes from
    /// create() below.
    TubeSpec() = default;

    /// Canonical tube: p3 is placed on the left side of the axis.
    static TubeSpec create(const Vec2& p1, const Vec2& p2, double r_t,
                           int lane_count = 0);

    /// Same band, but p3 placed with an explicit side. normal_sign = +1
    /// puts it on the left of the axis, -1 on the right. The projection
    /// matrices are invariant to this choice; only the stored endpoints
    /// differ. Needed for mirrored auxiliary tubes whose published
    /// endpoints sit on the right side.
    static TubeSpec create_with_normal_sign(const Vec2& p1, const Vec2& p2,
                                            double r_t, double normal_sign,
                                            int lane_count = 0);

    const Vec2& p1() const { return p1_; }
    const Vec2& p2() const { return p2_; }
    const Vec2& p3() const { return p3_; }
    const Vec2& p4() const { return p4_; }
    double r_t() const { return r_t_; }
    double length() const { return len_; }
    int lane_count() const { return lane_count_; }

    /// Unit vector along the axis, p1 -> p2.
    const Vec2& axis() const { return axis_; }
    /// Unit left normal of the axis (perp of axis, counterclockwise).
    const Vec2& left() const { return left_; }

    /// Projection wiping the axis direction (keeps cross-tube component).
    const Mat2& A12() const { return a12_; }
    /// Projection wiping the finishing-line direction (keeps along-tube
    /// component).
    const Mat2& A23() const { return a23_; }

    /// Tube-frame coordinates: origin p1, +x along the axis, +y left.
    Vec2 to_frame(const Vec2& world) const;
    Vec2 to_world(const Vec2& frame) const;

  private:
    Vec2 p1_, p2_, p3_, p4_;
    double r_t_ = 0.0;
    double len_ = 0.0;
    int lane_count_ = 0;
    Vec2 axis_, left_;
    Mat2 a12_, a23_;
};

/// Along-tube and cross-tube error vectors for a filtered position xi and
/// a raw position p, both measured against the finishing point p2:
///   xi_l = A23 (xi - p2)   distance-to-go component
///   xi_t = A12 (xi - p2)   cross-tube component
struct TubeErrors {
    Vec2 xi_l;
    Vec2 xi_t;
    Vec2 p_l;
    Vec2 p_t;
};

TubeErrors tube_errors(const Vec2& xi, const Vec2& p, const TubeSpec& tube);

/// Finishing-line test on the raw position:
///   (p2 - p1)^T A23 (p - p2) >= -eps0.
/// True once p has crossed (up to the eps0 band) the finishing line.
bool arrival_test(const Vec2& p, const TubeSpec& tube, double eps0);

/// Region classification of a filtered position. Boundary conventions:
/// the band edges |y| = r_t belong to the tube/extension, the starting
/// line x = 0 belongs to the extension/ready side, and x = length belongs
/// to the interior.
Region classify_region(const Vec2& xi, const TubeSpec& tube);

}  // namespace vtube
