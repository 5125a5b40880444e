#include "magvir/potentials.hpp"

#include <cmath>

#include "magvir/errors.hpp"

namespace magvir {

PotentialSpec free_potential(int n) {
    if (n < 2) throw ArgumentError("free_potential: n must be >= 2");
    PotentialSpec s;
    s.name = "free";
    s.n = n;
    s.zero_A = s.zero_V = true;
    s.A_rule = [n](const Vec&) { return Vec::Zero(n); };
    s.V_rule = [](const Vec&) { return 0.0; };
    s.jacobian_rule = [n](const Vec&) { return Mat::Zero(n, n); };
    s.grad_V_rule = [n](const Vec&) { return Vec::Zero(n); };
    return s;
}

namespace {

Singularity origin_point() {
    Singularity s;
    s.kind = Singularity::Kind::point;
    s.point = Vec::Zero(3);
    return s;
}

// Jacobian of c(x) / q(x) with c = (-y, x, 0), given q and grad q.
Mat rotation_over(const Vec& x, double q, const Vec& gq) {
    Mat Dc = Mat::Zero(3, 3);
    Dc(0, 1) = -1.0;
    Dc(1, 0) = 1.0;
    Vec c(3);
    c << -x[1], x[0], 0.0;
    return Dc / q - c * gq.transpose() / (q * q);
}

}  // namespace

PotentialSpec azimuthal_point(double lambda, double eps) {
    if (eps < 0) throw ArgumentError("azimuthal_point: eps must be >= 0");
    PotentialSpec s;
    s.name = "azimuthal-point";
    s.n = 3;
    s.mollify_eps = eps;
    s.singular_set = {origin_point()};
    if (eps > 0) s.radial_breaks = {eps};
    s.zero_V = true;
    auto raw = [lambda](const Vec& x) {
        Vec a(3);
        a << -x[1], x[0], 0.0;
        return Vec(lambda * a / x.squaredNorm());
    };
    s.A_raw = raw;
    s.A_rule = [lambda, eps](const Vec& x) {
        Vec a(3);
        a << -x[1], x[0], 0.0;
        return Vec(lambda * a / std::max(x.squaredNorm(), eps * eps));
    };
    s.jacobian_rule = [lambda, eps](const Vec& x) {
        const double q = x.squaredNorm();
        if (q <= eps * eps) return Mat(rotation_over(x, eps * eps, Vec::Zero(3)) * lambda);
        return Mat(rotation_over(x, q, 2.0 * x) * lambda);
    };
    s.V_rule = [](const Vec&) { return 0.0; };
    s.grad_V_rule = [](const Vec&) { return Vec::Zero(3); };
    return s;
}

PotentialSpec azimuthal_line(double lambda, double eps) {
    if (eps < 0) throw ArgumentError("azimuthal_line: eps must be >= 0");
    PotentialSpec s;
    s.name = "azimuthal-line";
    s.n = 3;
    s.mollify_eps = eps;
    Singularity line;
    line.kind = Singularity::Kind::line;
    line.point = Vec::Zero(3);
    line.direction = Vec::Unit(3, 2);
    s.singular_set = {line};
    s.zero_V = true;
    s.A_raw = [lambda](const Vec& x) {
        Vec a(3);
        a << -x[1], x[0], 0.0;
        return Vec(lambda * a / (x[0] * x[0] + x[1] * x[1]));
    };
    s.A_rule = [lambda, eps](const Vec& x) {
        Vec a(3);
        a << -x[1], x[0], 0.0;
        return Vec(lambda * a / std::max(x[0] * x[0] + x[1] * x[1], eps * eps));
    };
    s.jacobian_rule = [lambda, eps](const Vec& x) {
        const double q = x[0] * x[0] + x[1] * x[1];
        if (q <= eps * eps) return Mat(rotation_over(x, eps * eps, Vec::Zero(3)) * lambda);
        Vec g(3);
        g << 2 * x[0], 2 * x[1], 0.0;
        return Mat(rotation_over(x, q, g) * lambda);
    };
    s.V_rule = [](const Vec&) { return 0.0; };
    s.grad_V_rule = [](const Vec&) { return Vec::Zero(3); };
    return s;
}

namespace {

// C^3 smoothstep on [0,1] and its derivative.
double smoothstep(double t) {
    if (t <= 0) return 0.0;
    if (t >= 1) return 1.0;
    return t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
}
double smoothstep_d(double t) {
    if (t <= 0 || t >= 1) return 0.0;
    return 140.0 * t * t * t * (1.0 - t) * (1.0 - t) * (1.0 - t);
}

struct Taper {
    double a0, a1, b0, b1;
    double value(double r) const {
        return smoothstep((r - a0) / (a1 - a0)) * (1.0 - smoothstep((r - b0) / (b1 - b0)));
    }
    double deriv(double r) const {
        const double s1 = smoothstep((r - a0) / (a1 - a0));
        const double s2 = 1.0 - smoothstep((r - b0) / (b1 - b0));
        return smoothstep_d((r - a0) / (a1 - a0)) / (a1 - a0) * s2 -
               s1 * smoothstep_d((r - b0) / (b1 - b0)) / (b1 - b0);
    }
};

}  // namespace

PotentialSpec tapered_azimuthal(double lambda, double a0, double a1, double b0, double b1) {
    if (!(0 < a0 && a0 < a1 && a1 <= b0 && b0 < b1))
        throw ArgumentError("tapered_azimuthal: need 0 < a0 < a1 <= b0 < b1");
    Taper tp{a0, a1, b0, b1};
    PotentialSpec s;
    s.name = "tapered-azimuthal";
    s.n = 3;
    s.zero_V = true;
    s.radial_breaks = {a0, a1, b0, b1};
    s.A_rule = [lambda, tp](const Vec& x) {
        const double r2 = x.squaredNorm();
        Vec a(3);
        a << -x[1], x[0], 0.0;
        if (r2 == 0.0) return Vec(Vec::Zero(3));
        return Vec(lambda * tp.value(std::sqrt(r2)) * a / r2);
    };
    s.jacobian_rule = [lambda, tp](const Vec& x) {
        const double r2 = x.squaredNorm(), r = std::sqrt(r2);
        if (r2 == 0.0) return Mat(Mat::Zero(3, 3));
        Vec a(3);
        a << -x[1], x[0], 0.0;
        const Mat J0 = rotation_over(x, r2, 2.0 * x);
        return Mat(lambda * (tp.value(r) * J0 + (a / r2) * (tp.deriv(r) * x / r).transpose()));
    };
    s.V_rule = [](const Vec&) { return 0.0; };
    s.grad_V_rule = [](const Vec&) { return Vec::Zero(3); };
    return s;
}

std::function<Eigen::Vector3d(const Eigen::Vector3d&)> tapered_azimuthal_curl(
    double lambda, double a0, double a1, double b0, double b1) {
    Taper tp{a0, a1, b0, b1};
    return [lambda, tp](const Eigen::Vector3d& y) -> Eigen::Vector3d {
        const double r2 = y.squaredNorm();
        if (r2 == 0.0) return Eigen::Vector3d::Zero();
        const double r = std::sqrt(r2);
        const Eigen::Vector3d a(-y[1] / r2, y[0] / r2, 0.0);
        const Eigen::Vector3d curl0 = 2.0 * y[2] * y / (r2 * r2);
        return lambda * (tp.value(r) * curl0 + tp.deriv(r) * (y / r).cross(a));
    };
}

PotentialSpec vortex(const VortexParams& p) {
    if (p.n < 2) throw ArgumentError("vortex: n must be >= 2");
    if (p.width <= 0 || p.well_width <= 0) throw ArgumentError("vortex: widths must be positive");
    PotentialSpec s;
    s.name = "vortex";
    s.n = p.n;
    s.zero_A = (p.strength == 0.0);
    s.zero_V = (p.well_depth == 0.0);
    const int n = p.n;
    // profile g(r) and g'(r)/r
    auto prof = [p](double r2, double& g, double& gr) {
        if (p.algebraic_power > 0) {
            const double b = 1.0 + r2 / (p.width * p.width);
            g = std::pow(b, -0.5 * p.algebraic_power);
            gr = -p.algebraic_power * g / (b * p.width * p.width);
        } else {
            g = std::exp(-r2 / (p.width * p.width));
            gr = -2.0 * g / (p.width * p.width);
        }
    };
    s.A_rule = [p, n, prof](const Vec& x) {
        double g, gr;
        prof(x.squaredNorm(), g, gr);
        Vec a = Vec::Zero(n);
        a[0] = -x[1];
        a[1] = x[0];
        return Vec(p.strength * g * a);
    };
    s.jacobian_rule = [p, n, prof](const Vec& x) {
        double g, gr;
        prof(x.squaredNorm(), g, gr);
        Vec a = Vec::Zero(n);
        a[0] = -x[1];
        a[1] = x[0];
        Mat Dc = Mat::Zero(n, n);
        Dc(0, 1) = -1.0;
        Dc(1, 0) = 1.0;
        return Mat(p.strength * (g * Dc + gr * a * x.transpose()));
    };
    s.V_rule = [p](const Vec& x) {
        return p.well_depth * std::exp(-x.squaredNorm() / (p.well_width * p.well_width));
    };
    s.grad_V_rule = [p](const Vec& x) {
        const double w2 = p.well_width * p.well_width;
        return Vec(-2.0 * p.well_depth * std::exp(-x.squaredNorm() / w2) / w2 * x);
    };
    return s;
}

PotentialSpec gauge_transform(const PotentialSpec& base, std::function<double(const Vec&)> psi,
                              std::function<Vec(const Vec&)> grad_psi,
                              std::function<Mat(const Vec&)> hess_psi) {
    (void)psi;
    PotentialSpec s = base;
    s.name = base.name + "+gauge";
    s.zero_A = false;
    auto A0 = base.A_rule;
    const int n = base.n;
    s.A_rule = [A0, grad_psi, n](const Vec& x) {
        return Vec((A0 ? A0(x) : Vec::Zero(n)) + grad_psi(x));
    };
    if (base.A_raw) {
        auto R0 = base.A_raw;
        s.A_raw = [R0, grad_psi](const Vec& x) { return Vec(R0(x) + grad_psi(x)); };
    }
    if (base.jacobian_rule && hess_psi) {
        auto J0 = base.jacobian_rule;
        s.jacobian_rule = [J0, hess_psi](const Vec& x) { return Mat(J0(x) + hess_psi(x)); };
    } else if (base.zero_A && hess_psi) {
        s.jacobian_rule = hess_psi;
    } else {
        s.jacobian_rule = nullptr;
    }
    return s;
}

PotentialSpec scaled(const PotentialSpec& base, double lA, double lV) {
    PotentialSpec s = base;
    s.name = base.name + "*scaled";
    if (base.A_rule) {
        auto f = base.A_rule;
        s.A_rule = [f, lA](const Vec& x) { return Vec(lA * f(x)); };
    }
    if (base.A_raw) {
        auto f = base.A_raw;
        s.A_raw = [f, lA](const Vec& x) { return Vec(lA * f(x)); };
    }
    if (base.jacobian_rule) {
        auto f = base.jacobian_rule;
        s.jacobian_rule = [f, lA](const Vec& x) { return Mat(lA * f(x)); };
    }
    if (base.field_rule) {
        auto f = base.field_rule;
        s.field_rule = [f, lA](const Vec& x) { return Mat(lA * f(x)); };
    }
    if (base.V_rule) {
        auto f = base.V_rule;
        s.V_rule = [f, lV](const Vec& x) { return lV * f(x); };
    }
    if (base.grad_V_rule) {
        auto f = base.grad_V_rule;
        s.grad_V_rule = [f, lV](const Vec& x) { return Vec(lV * f(x)); };
    }
    s.zero_A = base.zero_A || lA == 0.0;
    s.zero_V = base.zero_V || lV == 0.0;
    return s;
}

Eigen::Vector3d HomogeneousFamily::operator()(const Eigen::Vector3d& y) const {
    const double r = y.norm();
    if (r < inner || r > outer || r == 0.0) return Eigen::Vector3d::Zero();
    const Eigen::Vector3d yh = y / r;
    const double s = yh.dot(omega);
    const double h = std::exp(-(1.0 - s) * (1.0 - s) / (2.0 * bump_width * bump_width));
    return h * std::pow(r, -alpha) * yh;
}

}  // namespace magvir
