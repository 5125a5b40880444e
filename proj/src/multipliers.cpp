#include "magvir/multipliers.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "magvir/errors.hpp"

namespace magvir {

Vec RadialMultiplier::gradient(const Vec& x) const {
    const double r = x.norm();
    if (r == 0.0) throw DomainError(id + ": gradient undefined at x = 0");
    return dphi(r) * x / r;
}

Mat RadialMultiplier::hessian(const Vec& x) const {
    const double r = x.norm();
    if (r == 0.0) throw DomainError(id + ": hessian undefined at x = 0");
    const Vec xh = x / r;
    const Mat P = xh * xh.transpose();
    return d2phi(r) * P + dphi(r) / r * (Mat::Identity(x.size(), x.size()) - P);
}

RadialMultiplier make_morawetz_3d(double M, double R) {
    if (R <= 0) throw ArgumentError("make_morawetz_3d: R must be positive");
    if (M < 0) throw ArgumentError("make_morawetz_3d: M must be nonnegative");
    RadialMultiplier m;
    m.id = "morawetz-3d";
    m.n = 3;
    m.M = M;
    m.R = R;
    m.phi = [M, R](double r) {
        return r <= R ? M * r + r * r / (6 * R) : M * r + 0.5 * r + R * R / (6 * r) - 0.5 * R;
    };
    m.dphi = [M, R](double r) { return r <= R ? M + r / (3 * R) : M + 0.5 - R * R / (6 * r * r); };
    m.d2phi = [R](double r) { return r <= R ? 1.0 / (3 * R) : R * R / (3 * r * r * r); };
    m.bilap_regular = [](double) { return 0.0; };
    // Delta^2 phi = Delta(2M/r) near 0 and the jump of d_r(Delta phi) across r = R.
    m.point_mass = -8.0 * kPi * M;
    m.surface_masses = {{R, -1.0 / (R * R)}};
    m.breaks = {R};
    m.bounded_dphi = true;
    m.bounded_r_d2phi = true;
    return m;
}

RadialMultiplier make_abs(int n) {
    if (n < 3) throw ArgumentError("make_abs: unsupported dimension " + std::to_string(n));
    RadialMultiplier m;
    m.id = "abs";
    m.n = n;
    m.phi = [](double r) { return r; };
    m.dphi = [](double) { return 1.0; };
    m.d2phi = [](double) { return 0.0; };
    const double c = -double((n - 1) * (n - 3));
    m.bilap_regular = [c](double r) { return c / (r * r * r); };
    if (n == 3) m.point_mass = -8.0 * kPi;
    m.bounded_dphi = true;
    m.bounded_r_d2phi = true;
    return m;
}

RadialMultiplier make_perturbation_part(double R, int n) {
    if (R <= 0) throw ArgumentError("make_perturbed_nd: R must be positive");
    if (n < 3) throw ArgumentError("make_perturbed_nd: unsupported dimension " + std::to_string(n));
    RadialMultiplier m;
    m.id = "perturbation";
    m.n = n;
    m.R = R;
    const double nn = n;
    const double Rn1 = std::pow(R, n - 1);
    const double c0 = R * ((nn - 1) / (4 * nn) - 0.5 - 1.0 / (2 * nn * (nn - 2)));
    m.phi = [=](double r) {
        return r <= R ? (nn - 1) * r * r / (4 * nn * R)
                      : 0.5 * r + Rn1 / (2 * nn * (nn - 2) * std::pow(r, n - 2)) + c0;
    };
    m.dphi = [=](double r) {
        return r <= R ? (nn - 1) * r / (2 * nn * R) : 0.5 - Rn1 / (2 * nn * std::pow(r, n - 1));
    };
    m.d2phi = [=](double r) {
        return r <= R ? (nn - 1) / (2 * nn * R) : (nn - 1) * Rn1 / (2 * nn * std::pow(r, n));
    };
    const double c = -(nn - 1) * (nn - 3) / 2.0;
    m.bilap_regular = [=](double r) { return r <= R ? 0.0 : c / (r * r * r); };
    m.surface_masses = {{R, -(nn - 1) / (2 * R * R)}};
    m.breaks = {R};
    m.bounded_dphi = true;
    m.bounded_r_d2phi = true;
    return m;
}

RadialMultiplier make_perturbed_nd(double R, int n) {
    const RadialMultiplier p = make_perturbation_part(R, n);
    const RadialMultiplier a = make_abs(n);
    RadialMultiplier m = p;
    m.id = "perturbed-abs";
    m.phi = [p](double r) { return r + p.phi(r); };
    m.dphi = [p](double r) { return 1.0 + p.dphi(r); };
    m.d2phi = [p](double r) { return p.d2phi(r); };
    m.bilap_regular = [p, a](double r) { return a.bilap_regular(r) + p.bilap_regular(r); };
    m.point_mass = a.point_mass;
    return m;
}

RadialMultiplier make_variance(int n) {
    RadialMultiplier m;
    m.id = "variance";
    m.n = n;
    m.phi = [](double r) { return r * r; };
    m.dphi = [](double r) { return 2 * r; };
    m.d2phi = [](double) { return 2.0; };
    m.bilap_regular = [](double) { return 0.0; };
    m.bounded_dphi = false;
    m.bounded_r_d2phi = false;
    return m;
}

RadialMultiplier make_constant(double c, int n) {
    RadialMultiplier m;
    m.id = "constant";
    m.n = n;
    m.phi = [c](double) { return c; };
    m.dphi = [](double) { return 0.0; };
    m.d2phi = [](double) { return 0.0; };
    m.bilap_regular = [](double) { return 0.0; };
    m.bounded_dphi = m.bounded_r_d2phi = true;
    return m;
}

PlateauWeight make_plateau(double R) {
    if (R <= 0) throw ArgumentError("make_plateau: R must be positive");
    return PlateauWeight{R, 1.0 / (2 * R), 0.0};
}

PlateauWeight make_uniform_weight(double c) {
    return PlateauWeight{std::numeric_limits<double>::infinity(), c, c};
}

double hessian_form(const RadialMultiplier& m, const Vec& x, const CVec& w) {
    const double r = x.norm();
    if (r == 0.0) throw DomainError("hessian_form: x = 0");
    const Vec xh = x / r;
    const cplx wr = w.dot(xh.cast<cplx>());  // conj(w) . x^ ; |w_r| is all that matters
    const double wr2 = std::norm(wr);
    const double wt2 = std::max(0.0, w.squaredNorm() - wr2);
    return m.d2phi(r) * wr2 + m.dphi(r) / r * wt2;
}

void write_profile_csv(const RadialMultiplier& m, const std::string& path, double r_max, int rows) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    os << "r,phi,dphi,d2phi,lap_phi\n" << std::setprecision(17);
    for (int i = 1; i <= rows; ++i) {
        const double r = r_max * i / rows;
        os << r << ',' << m.phi(r) << ',' << m.dphi(r) << ',' << m.d2phi(r) << ',' << m.lap(r) << '\n';
    }
}

}  // namespace magvir
