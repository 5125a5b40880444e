#include "magvir/biot_savart.hpp"

#include <algorithm>
#include <cmath>

#include "magvir/errors.hpp"
#include "magvir/quadrature.hpp"

namespace magvir {

namespace {

using V3 = Eigen::Vector3d;

struct RawSum {
    V3 A = V3::Zero();
    double mag = 0.0;
};

RawSum integrate_once(const VectorRule3& B, const V3& x, const QuadratureConfig& q, int nr,
                      int nt, int np, double hx) {
    const double r0 = x.norm();
    const V3 e = r0 > 0 ? V3(-x / r0) : V3(0, 0, 1);
    const V3 t = std::abs(e[0]) < 0.9 ? V3(1, 0, 0) : V3(0, 1, 0);
    const V3 e1 = (t - t.dot(e) * e).normalized();
    const V3 e2 = e.cross(e1);

    std::vector<double> spheres;
    if (q.support_inner > 0) spheres.push_back(q.support_inner);
    spheres.push_back(q.support_outer);
    for (double c : q.breaks)
        if (c > q.support_inner && c < q.support_outer) spheres.push_back(c);

    std::vector<double> tcuts{0.0, kPi};
    for (double c : spheres)
        if (c < r0) tcuts.push_back(std::asin(c / r0));
    std::sort(tcuts.begin(), tcuts.end());

    const Rule1D gs = gauss_legendre(nt, 0.0, 1.0);
    const Rule1D gr = gauss_legendre(nr, 0.0, 1.0);
    RawSum acc;
    std::vector<double> cuts;
    for (size_t ti = 0; ti + 1 < tcuts.size(); ++ti) {
        const double ta = tcuts[ti], tb = tcuts[ti + 1];
        if (tb - ta < 1e-15) continue;
        for (int i = 0; i < nt; ++i) {
            const double s = gs.x[i];
            const double th = ta + (tb - ta) * s * s * (3.0 - 2.0 * s);
            const double wt = gs.w[i] * (tb - ta) * 6.0 * s * (1.0 - s) * std::sin(th);
            if (wt == 0.0) continue;
            for (int k = 0; k < np; ++k) {
                const double ph = 2.0 * kPi * (k + 0.5) / np;
                const V3 w = std::cos(th) * e + std::sin(th) * (std::cos(ph) * e1 + std::sin(ph) * e2);
                const double wgt = wt * 2.0 * kPi / np;
                const double p = x.dot(w);
                cuts.assign(1, hx);
                double rho_end = -1.0;
                for (double c : spheres) {
                    const double disc = p * p - (r0 * r0 - c * c);
                    if (disc <= 0) continue;
                    const double sq = std::sqrt(disc);
                    for (double rho : {-p - sq, -p + sq})
                        if (rho > hx) cuts.push_back(rho);
                    if (c == q.support_outer) rho_end = -p + sq;
                }
                if (rho_end <= hx) continue;
                std::sort(cuts.begin(), cuts.end());
                for (size_t m = 0; m + 1 < cuts.size(); ++m) {
                    const double l = cuts[m], u = cuts[m + 1];
                    if (u - l < 1e-14 || u > rho_end + 1e-12) continue;
                    const double rm = (x + 0.5 * (l + u) * w).norm();
                    if (rm < q.support_inner || rm > q.support_outer) continue;
                    for (int j = 0; j < nr; ++j) {
                        const double rho = l + (u - l) * gr.x[j];
                        const V3 b = B(x + rho * w);
                        const double ww = wgt * gr.w[j] * (u - l);
                        acc.A += ww * w.cross(b);  // B(y) x (x - y) / abs(x - y)^3 with y = x + rho w
                        acc.mag += ww * b.norm();
                    }
                }
            }
        }
    }
    acc.A /= 4.0 * kPi;
    acc.mag /= 4.0 * kPi;
    return acc;
}

}  // namespace

BiotSavartResult biot_savart_fixed(const VectorRule3& B, const Eigen::Vector3d& x,
                                   const QuadratureConfig& q, int level) {
    if (!(q.support_outer > 0)) throw ArgumentError("biot_savart: truncation radius must be positive");
    const int f = 1 << level;
    const int nr = q.n_radial * f, nt = q.n_polar * f, np = q.n_azimuth * f;
    const double h = q.exclusion / f;
    const RawSum a = integrate_once(B, x, q, nr, nt, np, h);
    const RawSum b = integrate_once(B, x, q, nr, nt, np, 0.5 * h);
    BiotSavartResult r;
    r.A = (4.0 * b.A - a.A) / 3.0;
    r.scale = b.mag;
    r.level = level;
    return r;
}

BiotSavartResult biot_savart_refined(const VectorRule3& B, const Eigen::Vector3d& x,
                                     const QuadratureConfig& q) {
    BiotSavartResult prev = biot_savart_fixed(B, x, q, 0);
    for (int lev = 1; lev <= q.max_refinements; ++lev) {
        BiotSavartResult cur = biot_savart_fixed(B, x, q, lev);
        cur.change = (cur.A - prev.A).norm();
        if (cur.change <= q.rel_tol * std::max(cur.scale, 1e-300) || cur.change == 0.0) return cur;
        prev = cur;
    }
    BiotSavartResult last = biot_savart_fixed(B, x, q, q.max_refinements);
    throw ConvergenceError("biot_savart: refinements disagree beyond tolerance",
                           prev.A.norm(), last.A.norm());
}

Eigen::Vector3d biot_savart(const VectorRule3& B, const Eigen::Vector3d& x,
                            const QuadratureConfig& q) {
    return biot_savart_refined(B, x, q).A;
}

PotentialSpec biot_savart_potential(const VectorRule3& B, const QuadratureConfig& q, int level,
                                    const std::string& name) {
    PotentialSpec s;
    s.name = name;
    s.n = 3;
    s.zero_V = true;
    s.radial_breaks = q.breaks;
    if (q.support_inner > 0) s.radial_breaks.push_back(q.support_inner);
    s.radial_breaks.push_back(q.support_outer);
    s.A_rule = [B, q, level](const Vec& x) {
        const Eigen::Vector3d a = biot_savart_fixed(B, Eigen::Vector3d(x[0], x[1], x[2]), q, level).A;
        return Vec(a);
    };
    s.V_rule = [](const Vec&) { return 0.0; };
    s.grad_V_rule = [](const Vec&) { return Vec::Zero(3); };
    return s;
}

}  // namespace magvir
