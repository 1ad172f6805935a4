#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "vtube/geometry.hpp"

using namespace vtube;

TEST_CASE("projection matrix wipes the segment direction") {
    Mat2 P = projection_matrix({0.0, 0.0}, {3.0, 4.0});
    CHECK(std::fabs(P.a - 0.64) <= 1e-15);
    CHECK(std::fabs(P.b + 0.48) <= 1e-15);
    CHECK(std::fabs(P.c + 0.48) <= 1e-15);
    CHECK(std::fabs(P.d - 0.36) <= 1e-15);
    CHECK((P * Vec2{-3.0, -4.0}).norm() <= 1e-14);
    CHECK((P * P - P).max_abs() <= 1e-15);
    CHECK_THROWS_AS(projection_matrix({1.0, 2.0}, {1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("line distance is the perpendicular distance") {
    CHECK(line_distance({1.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(line_distance({5.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("tube endpoints and matrices for an axis-aligned tube") {
    TubeSpec t = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    CHECK(t.p3() == Vec2{500.0, 150.0});
    CHECK(t.p4() == Vec2{0.0, 150.0});
    CHECK(t.axis() == Vec2{1.0, 0.0});
    CHECK(t.left() == Vec2{0.0, 1.0});
    CHECK(t.length() == doctest::Approx(500.0));
    CHECK(t.lane_count() == 0);

    // A12 keeps only the cross component, A23 only the along component.
    CHECK((t.A12() * Vec2{7.0, 9.0}) == Vec2{0.0, 9.0});
    CHECK((t.A23() * Vec2{7.0, 9.0}) == Vec2{7.0, 0.0});

    TubeSpec r = TubeSpec::create_with_normal_sign({0.0, 0.0}, {500.0, 0.0},
                                                   150.0, -1.0);
    CHECK(r.p3() == Vec2{500.0, -150.0});
    CHECK(r.p4() == Vec2{0.0, -150.0});
    // Same band, same projections.
    CHECK((r.A23() - t.A23()).max_abs() == 0.0);
    CHECK((r.A12() - t.A12()).max_abs() == 0.0);

    CHECK_THROWS_AS(TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(TubeSpec::create({1.0, 1.0}, {1.0, 1.0}, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(TubeSpec::create_with_normal_sign({0.0, 0.0}, {1.0, 0.0},
                                                      10.0, 0.5),
                    std::invalid_argument);
}

TEST_CASE("frame transforms round-trip on a rotated tube") {
    TubeSpec t = TubeSpec::create({10.0, 20.0}, {10.0, 520.0}, 150.0);
    CHECK(t.axis() == Vec2{0.0, 1.0});
    CHECK(t.left() == Vec2{-1.0, 0.0});
    Vec2 f2 = t.to_frame(t.p2());
    CHECK(f2.x == doctest::Approx(500.0).epsilon(1e-14));
    CHECK(f2.y == doctest::Approx(0.0).epsilon(1e-14));
    Vec2 f3 = t.to_frame(t.p3());
    CHECK(f3.x == doctest::Approx(500.0).epsilon(1e-14));
    CHECK(f3.y == doctest::Approx(150.0).epsilon(1e-14));

    Vec2 q{-37.5, 412.25};
    Vec2 rt = t.to_world(t.to_frame(q));
    CHECK(rt.x == doctest::Approx(q.x).epsilon(1e-14));
    CHECK(rt.y == doctest::Approx(q.y).epsilon(1e-14));
}

TEST_CASE("tube errors split into along and cross components") {
    TubeSpec t = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    TubeErrors e = tube_errors({100.0, 50.0}, {90.0, 40.0}, t);
    CHECK(e.xi_l == Vec2{-400.0, 0.0});
    CHECK(e.xi_t == Vec2{0.0, 50.0});
    CHECK(e.p_l == Vec2{-410.0, 0.0});
    CHECK(e.p_t == Vec2{0.0, 40.0});
}

TEST_CASE("arrival test fires just before the finishing line") {
    TubeSpec t = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    // Threshold sits eps0 / ||p2 - p1|| = 1/500 m before the line.
    CHECK(arrival_test({499.999, 0.0}, t, 1.0));
    CHECK_FALSE(arrival_test({499.99, 0.0}, t, 1.0));
    CHECK(arrival_test({500.0, 80.0}, t, 1.0));
    CHECK(arrival_test({550.0, -120.0}, t, 1.0));
    CHECK_FALSE(arrival_test({0.0, 0.0}, t, 1.0));
}

TEST_CASE("region partition fixtures, boundaries included") {
    TubeSpec t = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    auto region = [&](double x, double y) {
        return classify_region({x, y}, t);
    };
    // Band edges belong to the band, the starting line to the extension.
    CHECK(region(0.0, 150.0) == Region::TubeExtension);
    CHECK(region(0.0, -150.0) == Region::TubeExtension);
    CHECK(region(-0.0001, 0.0) == Region::TubeExtension);
    CHECK(region(-900.0, 149.0) == Region::TubeExtension);
    CHECK(region(0.0001, 0.0) == Region::TubeInterior);
    CHECK(region(250.0, -150.0) == Region::TubeInterior);
    CHECK(region(500.0, 149.0) == Region::TubeInterior);
    CHECK(region(500.0001, 0.0) == Region::PastFinish);
    CHECK(region(0.0, 150.0001) == Region::LeftReady);
    CHECK(region(-40.0, 200.0) == Region::LeftReady);
    CHECK(region(0.0001, 150.0001) == Region::LeftStandby);
    CHECK(region(700.0, 200.0) == Region::LeftStandby);
    CHECK(region(-0.0001, -150.0001) == Region::RightReady);
    CHECK(region(700.0, -200.0) == Region::RightStandby);

    TubeSpec up = TubeSpec::create({10.0, 20.0}, {10.0, 520.0}, 150.0);
    CHECK(classify_region(up.to_world({250.0, -150.0001}), up) ==
          Region::RightStandby);
    CHECK(classify_region(up.to_world({250.0, 20.0}), up) ==
          Region::TubeInterior);
}
