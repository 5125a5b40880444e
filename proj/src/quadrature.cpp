#include "magvir/quadrature.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "magvir/errors.hpp"

namespace magvir {

Rule1D gauss_legendre(int npts, double a, double b) {
    if (npts < 1) throw ArgumentError("gauss_legendre: need at least one node");
    Rule1D r;
    r.x.resize(npts);
    r.w.resize(npts);
    const int m = (npts + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (npts + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < npts; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = npts * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
        const double wi = 2.0 / ((1.0 - z * z) * pp * pp) * half;
        r.x[i] = mid - half * z;
        r.x[npts - 1 - i] = mid + half * z;
        r.w[i] = wi;
        r.w[npts - 1 - i] = wi;
    }
    return r;
}

namespace {

double radical_inverse(int base, long long i) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

}  // namespace

std::vector<Vec> sphere_directions(int n, int count) {
    if (n < 2 || count < 1) throw ArgumentError("sphere_directions: need n >= 2 and count >= 1");
    std::vector<Vec> out;
    out.reserve(count);
    if (n == 2) {
        for (int i = 0; i < count; ++i) {
            const double t = 2.0 * kPi * (i + 0.5) / count;
            Vec v(2);
            v << std::cos(t), std::sin(t);
            out.push_back(v);
        }
        return out;
    }
    if (n == 3) {
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            Vec v(3);
            v << s * std::cos(golden * i), s * std::sin(golden * i), z;
            out.push_back(v);
        }
        return out;
    }
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    if (n > 15) throw ArgumentError("sphere_directions: dimension too large");
    boost::math::normal_distribution<double> gauss;
    for (int i = 0; i < count; ++i) {
        Vec v(n);
        for (int d = 0; d < n; ++d) {
            const double u = radical_inverse(primes[d], i + 1);
            v[d] = boost::math::quantile(gauss, std::clamp(u, 1e-12, 1.0 - 1e-12));
        }
        out.push_back(v / v.norm());
    }
    return out;
}

SphereRule sphere_rule_3d(int n_polar, int n_azimuth) {
    SphereRule s;
    const Rule1D g = gauss_legendre(n_polar);
    for (int i = 0; i < n_polar; ++i) {
        const double ct = g.x[i], st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < n_azimuth; ++j) {
            const double p = 2.0 * kPi * j / n_azimuth;
            s.dirs.emplace_back(st * std::cos(p), st * std::sin(p), ct);
            s.w.push_back(g.w[i] * 2.0 * kPi / n_azimuth);
        }
    }
    return s;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breaks, double rel_tol, int max_depth) {
    std::vector<double> pts{a};
    for (double c : breaks)
        if (c > a && c < b) pts.push_back(c);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] <= pts[i]) continue;
        double err = 0.0;
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            f, pts[i], pts[i + 1], max_depth, rel_tol, &err);
    }
    return total;
}

}  // namespace magvir
