#include "vtube/shaping.hpp"

#include <numbers>
#include <stdexcept>

namespace vtube {

namespace {
const double kTan67_5 = std::tan(67.5 * std::numbers::pi / 180.0);
const double kSin45 = std::sin(45.0 * std::numbers::pi / 180.0);
}  // namespace

Vec2 vec_sat(const Vec2& v, double vm) {
    if (!(vm > 0.0)) throw std::invalid_argument("vec_sat: vm must be positive");
    double n = v.norm();
    if (n <= vm) return v;
    return v * (vm / n);
}

BumpSpec BumpSpec::create(double d1, double d2) {
    if (!(d1 < d2)) throw std::invalid_argument("BumpSpec: requires d1 < d2");
    double h = d1 - d2;
    double h3 = h * h * h;
    BumpSpec s;
    s.d1 = d1;
    s.d2 = d2;
    s.A = -2.0 / h3;
    s.B = 3.0 * (d1 + d2) / h3;
    s.C = -6.0 * d1 * d2 / h3;
    s.D = d2 * d2 * (3.0 * d1 - d2) / h3;
    return s;
}

double bump(double x, const BumpSpec& s) {
    if (x <= s.d1) return 1.0;
    if (x >= s.d2) return 0.0;
    return ((s.A * x + s.B) * x + s.C) * x + s.D;
}

double bump_deriv(double x, const BumpSpec& s) {
    if (x <= s.d1 || x >= s.d2) return 0.0;
    return (3.0 * s.A * x + 2.0 * s.B) * x + s.C;
}

SmoothSatSpec SmoothSatSpec::create(double eps_s) {
    if (!(eps_s > 0.0))
        throw std::invalid_argument("SmoothSatSpec: eps_s must be positive");
    if (eps_s > max_eps())
        throw std::invalid_argument("SmoothSatSpec: eps_s too large, identity branch vanishes");
    SmoothSatSpec s;
    s.eps_s = eps_s;
    s.x2 = 1.0 + eps_s / kTan67_5;
    s.x1 = s.x2 - kSin45 * eps_s;
    return s;
}

double SmoothSatSpec::max_eps() {
    return kTan67_5 / (kTan67_5 * kSin45 - 1.0);
}

double smooth_sat(double x, const SmoothSatSpec& s) {
    if (x < 0.0) throw std::domain_error("smooth_sat: x must be >= 0");
    if (x <= s.x1) return x;
    if (x >= s.x2) return 1.0;
    double dx = x - s.x2;
    double rad = s.eps_s * s.eps_s - dx * dx;
    return (1.0 - s.eps_s) + std::sqrt(rad > 0.0 ? rad : 0.0);
}

double smooth_sat_deriv(double x, const SmoothSatSpec& s) {
    if (x < 0.0) throw std::domain_error("smooth_sat_deriv: x must be >= 0");
    if (x <= s.x1) return 1.0;
    if (x >= s.x2) return 0.0;
    double dx = x - s.x2;
    double rad = s.eps_s * s.eps_s - dx * dx;
    if (rad <= 0.0) return 0.0;
    return -dx / std::sqrt(rad);
}

double vli_value(double norm_y, double k, double a) {
    if (!(k > 0.0) || !(a > 0.0))
        throw std::invalid_argument("vli_value: k and a must be positive");
    if (norm_y < 0.0) throw std::domain_error("vli_value: norm must be >= 0");
    if (k * norm_y <= a) return 0.5 * k * norm_y * norm_y;
    return a * a / (2.0 * k) + a * (norm_y - a / k);
}

}  // namespace vtube
