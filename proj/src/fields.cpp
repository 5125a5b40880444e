#include "magvir/fields.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "magvir/errors.hpp"

namespace magvir {

double Singularity::distance(const Vec& x) const {
    const Vec d = x - point;
    if (kind == Kind::point) return d.norm();
    return (d - d.dot(direction) * direction).norm();
}

std::string Singularity::describe() const {
    std::ostringstream os;
    os << (kind == Kind::point ? "point " : "line through ");
    for (int i = 0; i < point.size(); ++i) os << (i ? "," : "(") << point[i];
    os << ")";
    if (kind == Kind::line) {
        os << " along ";
        for (int i = 0; i < direction.size(); ++i) os << (i ? "," : "(") << direction[i];
        os << ")";
    }
    return os.str();
}

void PotentialSpec::check_point(const Vec& x) const {
    if (x.size() != n) throw ArgumentError(name + ": point dimension " + std::to_string(x.size()) +
                                           " does not match n = " + std::to_string(n));
    if (mollify_eps > 0.0) return;
    const double tol = 1e-12 * (1.0 + x.norm());
    for (const auto& s : singular_set)
        if (s.distance(x) <= tol)
            throw DomainError(name + ": evaluation on the singular set (" + s.describe() + ")");
}

Vec PotentialSpec::A(const Vec& x) const {
    check_point(x);
    if (!A_rule) return Vec::Zero(n);
    return A_rule(x);
}

double PotentialSpec::V(const Vec& x) const {
    check_point(x);
    if (!V_rule) return 0.0;
    return V_rule(x);
}

double numerical_step(const Vec& x) {
    static const double s = std::pow(std::numeric_limits<double>::epsilon(), 0.2);
    return s * (1.0 + x.norm());
}

Mat numerical_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x) {
    const int n = static_cast<int>(x.size());
    const double h = numerical_step(x);
    Mat J;
    for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x, xpp = x, xmm = x;
        xp[j] += h;
        xm[j] -= h;
        xpp[j] += 2 * h;
        xmm[j] -= 2 * h;
        const Vec col = (8.0 * (f(xp) - f(xm)) - (f(xpp) - f(xmm))) / (12.0 * h);
        if (j == 0) J.resize(col.size(), n);
        J.col(j) = col;
    }
    return J;
}

Vec numerical_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
    auto g = [&](const Vec& y) {
        Vec v(1);
        v[0] = f(y);
        return v;
    };
    return numerical_jacobian(g, x).row(0).transpose();
}

Mat PotentialSpec::jacobian(const Vec& x) const {
    check_point(x);
    if (zero_A || !A_rule) return Mat::Zero(n, n);
    if (jacobian_rule) return jacobian_rule(x);
    return numerical_jacobian(A_rule, x);
}

Vec PotentialSpec::grad_V(const Vec& x) const {
    check_point(x);
    if (zero_V || !V_rule) return Vec::Zero(n);
    if (grad_V_rule) return grad_V_rule(x);
    return numerical_gradient(V_rule, x);
}

double PotentialSpec::V_r(const Vec& x) const {
    const double r = x.norm();
    if (r == 0.0) throw DomainError(name + ": radial derivative undefined at x = 0");
    return grad_V(x).dot(x) / r;
}

std::string PotentialSpec::jacobian_path() const {
    if (zero_A) return "zero";
    if (field_rule) return "field-rule";
    return jacobian_rule ? "analytic" : "numerical-5pt";
}

Mat field_matrix(const PotentialSpec& spec, const Vec& x) {
    spec.check_point(x);
    if (spec.field_rule) return spec.field_rule(x);
    const Mat J = spec.jacobian(x);
    return J - J.transpose();
}

FieldMatrixSample eval_B(const PotentialSpec& spec, const Vec& x) {
    const double r = x.norm();
    if (r == 0.0) throw DomainError("B_tau undefined at x = 0 (x/|x| has no limit)");
    FieldMatrixSample s;
    s.x = x;
    s.B = field_matrix(spec, x);
    s.B_tau = (x / r).transpose() * s.B;
    return s;
}

double gauge_residual(const PotentialSpec& spec, const std::vector<Vec>& samples) {
    if (samples.empty()) throw ArgumentError("gauge_residual: empty sample set");
    double worst = 0.0;
    for (const auto& x : samples) worst = std::max(worst, std::abs(spec.jacobian(x).trace()));
    return worst;
}

Eigen::Vector3d curl_from_B(const Mat& B) {
    // B v = w x v  =>  B = [[0,-w3,w2],[w3,0,-w1],[-w2,w1,0]]
    return Eigen::Vector3d(B(2, 1), B(0, 2), B(1, 0));
}

}  // namespace magvir
