#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vtube/potentials.hpp"

using namespace vtube;

namespace {
ControlParams small_cp() {
    return ControlParams::create(10.0, 20.0, 50.0);
}
}  // namespace

TEST_CASE("control parameter validation and baked shapes") {
    ControlParams cp = small_cp();
    CHECK(cp.sigma_m.d1 == 20.0);
    CHECK(cp.sigma_m.d2 == 30.0);
    CHECK(cp.sigma_t.d1 == 10.0);
    CHECK(cp.sigma_t.d2 == 20.0);
    CHECK(cp.r_b == 20.0);  // defaults to r_a

    CHECK_THROWS_AS(ControlParams::create(0.0, 20.0, 50.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ControlParams::create(10.0, 10.0, 50.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ControlParams::create(10.0, 20.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ControlParams::create(10.0, 20.0, 50.0, -1.0),
                    std::invalid_argument);
}

TEST_CASE("pairwise barrier: flat zone, deep zone, blow-up direction") {
    ControlParams cp = small_cp();
    // Deep zone: the smooth ramp is still on its identity branch, so the
    // denominator collapses to eps_m * dist exactly.
    CHECK(v_m(10.0, cp) ==
          doctest::Approx(1.0 / (1e-6 * 10.0)).epsilon(1e-12));
    CHECK(v_m(30.0, cp) == 0.0);
    CHECK(v_m(31.0, cp) == 0.0);
    CHECK(v_m(29.0, cp) > 0.0);
    // Monotone decreasing toward the flat zone.
    double prev = v_m(15.0, cp);
    for (double d = 15.5; d <= 30.0; d += 0.5) {
        double v = v_m(d, cp);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
    CHECK_THROWS_AS(v_m(0.0, cp), std::domain_error);
    CHECK_THROWS_AS(v_m(-1.0, cp), std::domain_error);
}

TEST_CASE("tube-keeping barrier: flat zone, frozen deep value") {
    ControlParams cp = small_cp();
    double r_t = 50.0;
    // Margin >= r_a keeps the barrier off.
    CHECK(v_t(30.0, r_t, cp) == 0.0);
    CHECK(v_t(0.0, r_t, cp) == 0.0);
    // Deep zone closed form: k3 (n + eps_t) / (eps_t (r_t - r_s)).
    double expect = (45.0 + 1e-6) / (1e-6 * 40.0);
    CHECK(v_t(45.0, r_t, cp) == doctest::Approx(expect).epsilon(1e-9));
    // Finite even outside the band.
    CHECK(std::isfinite(v_t(60.0, r_t, cp)));
    CHECK(v_t(60.0, r_t, cp) > 0.0);
    CHECK_THROWS_AS(v_t(-1.0, r_t, cp), std::domain_error);
}

TEST_CASE("closed-form gains match finite differences of the barriers") {
    ControlParams cp = small_cp();
    double r_t = 50.0;
    auto fd = [](auto f, double x) {
        double h = 1e-6 * std::max(1.0, std::fabs(x));
        return (f(x + h) - f(x - h)) / (2.0 * h);
    };
    for (double d : {15.0, 21.0, 24.0, 27.5, 29.5}) {
        double dv = fd([&](double x) { return v_m(x, cp); }, d);
        CHECK(gain_b(d, cp) ==
              doctest::Approx(-dv / d).epsilon(1e-5));
        CHECK(gain_b(d, cp) >= 0.0);
    }
    for (double n : {32.0, 35.0, 38.0, 41.0, 44.0}) {
        double dv = fd([&](double x) { return v_t(x, r_t, cp); }, n);
        CHECK(gain_c(n, r_t, cp) ==
              doctest::Approx(dv / n).epsilon(1e-5));
        CHECK(gain_c(n, r_t, cp) >= 0.0);
    }
    CHECK(gain_b(30.0, cp) == 0.0);
    CHECK(gain_c(0.0, r_t, cp) == 0.0);
    CHECK(gain_c(29.0, r_t, cp) == 0.0);
}

TEST_CASE("progress potential wraps the line integral") {
    ControlParams cp = small_cp();
    CHECK(v_l(400.0, 5.0, cp) == vli_value(400.0, cp.k1, 5.0));
    CHECK(v_l(0.0, 5.0, cp) == 0.0);
}

TEST_CASE("total potential sums progress, pair and keeping terms") {
    ControlParams cp = small_cp();
    TubeSpec tube = TubeSpec::create({0.0, 0.0}, {500.0, 0.0}, 50.0);
    std::vector<Vec2> xi = {{100.0, 32.0}, {100.0, 8.0}};
    std::vector<double> vm = {5.0, 6.0};

    // The progress term sees only the along-tube component (400 for both).
    double expect = v_l(400.0, 5.0, cp) + v_l(400.0, 6.0, cp);
    // One pair at distance 24, counted once.
    expect += v_m(24.0, cp);
    expect += v_t(32.0, 50.0, cp) + v_t(8.0, 50.0, cp);
    CHECK(total_v(xi, vm, tube, cp) ==
          doctest::Approx(expect).epsilon(1e-12));

    std::vector<double> bad = {5.0};
    CHECK_THROWS_AS(total_v(xi, bad, tube, cp), std::invalid_argument);
}
