#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vtube/controller.hpp"

using namespace vtube;

namespace {
ControlParams wide_cp() {
    ControlParams cp = ControlParams::create(20.0, 30.0, 80.0);
    cp.r_sr = 10000.0;
    cp.r_rt = 10000.0;
    cp.r_b = 30.0;
    return cp;
}
}  // namespace

TEST_CASE("line term pulls toward the finishing line at the speed limit") {
    TubeSpec tube = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    Vec2 line = term_line({-400.0, 0.0}, 1.0, 5.0, tube.A23());
    CHECK(line.x == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::fabs(line.y) <= 1e-12);

    // Close to the line the pull is proportional, not saturated.
    Vec2 near = term_line({-2.0, 0.0}, 1.0, 5.0, tube.A23());
    CHECK(near.x == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("avoidance term matches the pair gain") {
    ControlParams cp = wide_cp();
    std::vector<NeighborState> nbs = {
        {{0.0, 0.0}, {0.0, 0.0}, {30.0, 0.0}},   // active, dist 30
        {{0.0, 0.0}, {0.0, 0.0}, {0.0, 60.0}},   // beyond reach, dist 60
    };
    Vec2 a = term_avoid({0.0, 0.0}, nbs, cp);
    double b = gain_b(30.0, cp);
    CHECK(b > 0.0);
    CHECK(a.x == doctest::Approx(-30.0 * b).epsilon(1e-13));
    CHECK(std::fabs(a.y) <= 1e-13);

    std::vector<NeighborState> none;
    CHECK(term_avoid({0.0, 0.0}, none, cp) == Vec2{0.0, 0.0});
}

TEST_CASE("keeping term pushes back toward the tube center") {
    ControlParams cp = wide_cp();
    TubeSpec tube = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    Vec2 keep = term_keep({0.0, 140.0}, 150.0, cp, tube.A12());
    CHECK(keep.y < 0.0);  // inward
    CHECK(std::fabs(keep.x) <= 1e-13);
    // Comfortable margin: inactive.
    Vec2 off = term_keep({0.0, 100.0}, 150.0, cp, tube.A12());
    CHECK(off.x == 0.0);
    CHECK(off.y == 0.0);
}

TEST_CASE("lone vehicle command heads for the finishing line") {
    ControlParams cp = wide_cp();
    TubeSpec tube = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    ControlTermSet ts = tube_command({100.0, 0.0}, 5.0, {}, tube, cp);
    CHECK(ts.command.x == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::fabs(ts.command.y) <= 1e-12);
    CHECK(ts.command.norm() <= 5.0 + 1e-12);
}

TEST_CASE("auxiliary tube endpoints, frozen frame geometry") {
    ControlParams cp = wide_cp();
    TubeSpec tube = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    AuxTubes aux = build_aux_tubes(tube, cp.r_sr, cp.r_rt, cp.r_b);

    CHECK(aux.ls2r.p1() == Vec2{500.0, 10150.0});
    CHECK(aux.ls2r.p2() == Vec2{-30.0, 10150.0});
    CHECK(aux.ls2r.p3().x == doctest::Approx(-30.0).epsilon(1e-12));
    CHECK(aux.ls2r.p3().y == doctest::Approx(150.0).epsilon(1e-12));

    CHECK(aux.rs2r.p1() == Vec2{500.0, -10150.0});
    CHECK(aux.rs2r.p3().y == doctest::Approx(-150.0).epsilon(1e-12));

    CHECK(aux.lr2t.p1() == Vec2{-10000.0, 10150.0});
    CHECK(aux.lr2t.p2() == Vec2{-10000.0, 120.0});
    CHECK(aux.lr2t.p3().x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(aux.lr2t.p3().y == doctest::Approx(120.0).epsilon(1e-12));

    CHECK(aux.rr2t.p2() == Vec2{-10000.0, -120.0});
    CHECK(aux.rr2t.p3().x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(aux.rr2t.p3().y == doctest::Approx(-120.0).epsilon(1e-12));

    CHECK_THROWS_AS(build_aux_tubes(tube, 0.0, 10.0, 5.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_aux_tubes(tube, 10.0, 10.0, -1.0),
                    std::invalid_argument);
}

TEST_CASE("region dispatch routes to the matching tube") {
    ControlParams cp = wide_cp();
    TubeSpec tube = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    AuxTubes aux = build_aux_tubes(tube, cp.r_sr, cp.r_rt, cp.r_b);

    // Standby vehicles head back toward the entrance (-x).
    ControlTermSet sb = dispatch({250.0, 200.0}, 5.0, {}, tube, aux, cp);
    CHECK(sb.command.x == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(std::fabs(sb.command.y) <= 1e-12);

    // Ready vehicles sink toward the extension (-y on the left side).
    ControlTermSet rd = dispatch({-200.0, 400.0}, 5.0, {}, tube, aux, cp);
    CHECK(rd.command.y == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(std::fabs(rd.command.x) <= 1e-12);

    // Right-side mirror of both.
    ControlTermSet sbr = dispatch({250.0, -200.0}, 5.0, {}, tube, aux, cp);
    CHECK(sbr.command.x == doctest::Approx(-5.0).epsilon(1e-12));
    ControlTermSet rdr = dispatch({-200.0, -400.0}, 5.0, {}, tube, aux, cp);
    CHECK(rdr.command.y == doctest::Approx(5.0).epsilon(1e-12));

    // In-band vehicles track the main tube.
    ControlTermSet in = dispatch({100.0, 0.0}, 5.0, {}, tube, aux, cp);
    CHECK(in.command.x == doctest::Approx(5.0).epsilon(1e-12));

    CHECK_THROWS_AS(dispatch({600.0, 0.0}, 5.0, {}, tube, aux, cp),
                    std::logic_error);
}

TEST_CASE("mirrored states produce mirrored commands") {
    ControlParams cp = wide_cp();
    TubeSpec tube = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 150.0);
    AuxTubes aux = build_aux_tubes(tube, cp.r_sr, cp.r_rt, cp.r_b);

    auto flip = [](const Vec2& v) { return Vec2{v.x, -v.y}; };
    const Vec2 points[] = {{250.0, 200.0}, {-120.0, 260.0}, {50.0, 130.0},
                           {-300.0, 40.0}, {-40.0, 155.0}};
    for (const Vec2& p : points) {
        std::vector<NeighborState> nl = {
            {{p.x + 20.0, p.y + 25.0}, {0.0, 0.0}, {p.x + 22.0, p.y + 25.0}}};
        std::vector<NeighborState> nr = {
            {flip(nl[0].p), flip(nl[0].v), flip(nl[0].xi)}};
        ControlTermSet a = dispatch(p, 5.0, nl, tube, aux, cp);
        ControlTermSet b = dispatch(flip(p), 5.0, nr, tube, aux, cp);
        CHECK(std::fabs(a.command.x - b.command.x) <= 1e-12);
        CHECK(std::fabs(a.command.y + b.command.y) <= 1e-12);
    }
}
