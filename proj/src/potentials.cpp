#include "vtube/potentials.hpp"

#include <stdexcept>

namespace vtube {

ControlParams ControlParams::create(double r_s, double r_a, double r_d,
                                    double k1, double k2, double k3,
                                    double eps_m, double eps_t, double eps_s,
                                    double eps_0) {
    if (!(r_s > 0.0)) throw std::invalid_argument("ControlParams: r_s must be positive");
    if (!(r_a > r_s)) throw std::invalid_argument("ControlParams: requires r_a > r_s");
    if (!(r_d > 0.0)) throw std::invalid_argument("ControlParams: r_d must be positive");
    if (!(k1 > 0.0 && k2 > 0.0 && k3 > 0.0))
        throw std::invalid_argument("ControlParams: gains must be positive");
    if (!(eps_m > 0.0 && eps_t > 0.0))
        throw std::invalid_argument("ControlParams: regularizers must be positive");

    ControlParams cp;
    cp.k1 = k1;
    cp.k2 = k2;
    cp.k3 = k3;
    cp.eps_m = eps_m;
    cp.eps_t = eps_t;
    cp.eps_s = eps_s;
    cp.eps_0 = eps_0;
    cp.r_s = r_s;
    cp.r_a = r_a;
    cp.r_d = r_d;
    cp.r_b = r_a;
    cp.sigma_m = BumpSpec::create(2.0 * r_s, r_s + r_a);
    cp.sigma_t = BumpSpec::create(r_s, r_a);
    cp.ssat = SmoothSatSpec::create(eps_s);
    return cp;
}

double v_l(double norm_xi_l, double vm, const ControlParams& cp) {
    return vli_value(norm_xi_l, cp.k1, vm);
}

// On the smooth ramp's identity branch the barrier denominators collapse
// algebraically ((1+e)d - d = e d); evaluating the collapsed form avoids the
// catastrophic cancellation of subtracting two near-equal magnitudes, which
// otherwise costs ~8 significant digits deep inside the barrier.

double v_m(double dist, const ControlParams& cp) {
    if (!(dist > 0.0)) throw std::domain_error("v_m: dist must be positive");
    if (dist >= cp.sigma_m.d2) return 0.0;
    double sig = bump(dist, cp.sigma_m);
    double u = dist / (2.0 * cp.r_s);
    double den = u <= cp.ssat.x1
                     ? cp.eps_m * dist
                     : (1.0 + cp.eps_m) * dist -
                           2.0 * cp.r_s * smooth_sat(u, cp.ssat);
    return cp.k2 * sig / den;
}

double v_t(double norm_xi_t, double r_t, const ControlParams& cp) {
    if (norm_xi_t < 0.0) throw std::domain_error("v_t: norm must be >= 0");
    double margin = r_t - norm_xi_t;
    if (margin >= cp.sigma_t.d2) return 0.0;
    double sig = bump(margin, cp.sigma_t);
    double band = r_t - cp.r_s;
    double q = band / (norm_xi_t + cp.eps_t);
    double den = q <= cp.ssat.x1
                     ? band * cp.eps_t / (norm_xi_t + cp.eps_t)
                     : band - norm_xi_t * smooth_sat(q, cp.ssat);
    return cp.k3 * sig / den;
}

double gain_b(double dist, const ControlParams& cp) {
    if (!(dist > 0.0)) throw std::domain_error("gain_b: dist must be positive");
    if (dist >= cp.sigma_m.d2) return 0.0;
    double sig = bump(dist, cp.sigma_m);
    double dsig = bump_deriv(dist, cp.sigma_m);
    double u = dist / (2.0 * cp.r_s);
    bool identity = u <= cp.ssat.x1;
    double den = identity ? cp.eps_m * dist
                          : (1.0 + cp.eps_m) * dist -
                                2.0 * cp.r_s * smooth_sat(u, cp.ssat);
    double dden = identity
                      ? cp.eps_m
                      : (1.0 + cp.eps_m) - smooth_sat_deriv(u, cp.ssat);
    double dv = cp.k2 * (dsig * den - sig * dden) / (den * den);
    return -dv / dist;
}

double gain_c(double norm_xi_t, double r_t, const ControlParams& cp) {
    if (norm_xi_t < 0.0) throw std::domain_error("gain_c: norm must be >= 0");
    double margin = r_t - norm_xi_t;
    if (margin >= cp.sigma_t.d2) return 0.0;
    if (norm_xi_t == 0.0) return 0.0;
    double sig = bump(margin, cp.sigma_t);
    double dsig_dn = -bump_deriv(margin, cp.sigma_t);
    double band = r_t - cp.r_s;
    double ne = norm_xi_t + cp.eps_t;
    double q = band / ne;
    bool identity = q <= cp.ssat.x1;
    // Identity branch: den = band e / (n+e), dden = -band e / (n+e)^2,
    // both exact rewrites of the direct expressions below.
    double den = identity ? band * cp.eps_t / ne
                          : band - norm_xi_t * smooth_sat(q, cp.ssat);
    double dden = identity
                      ? -band * cp.eps_t / (ne * ne)
                      : -smooth_sat(q, cp.ssat) +
                            norm_xi_t * smooth_sat_deriv(q, cp.ssat) * band /
                                (ne * ne);
    double dv = cp.k3 * (dsig_dn * den - sig * dden) / (den * den);
    return dv / norm_xi_t;
}

double total_v(std::span<const Vec2> xi, std::span<const double> vm,
               const TubeSpec& tube, const ControlParams& cp) {
    if (xi.size() != vm.size())
        throw std::invalid_argument("total_v: xi/vm size mismatch");
    double total = 0.0;
    for (size_t i = 0; i < xi.size(); ++i) {
        TubeErrors e = tube_errors(xi[i], xi[i], tube);
        total += v_l(e.xi_l.norm(), vm[i], cp);
        total += v_t(e.xi_t.norm(), tube.r_t(), cp);
        for (size_t j = 0; j < xi.size(); ++j) {
            if (j == i) continue;
            total += 0.5 * v_m((xi[i] - xi[j]).norm(), cp);
        }
    }
    return total;
}

}  // namespace vtube
