#pragma once

#include <functional>
#include <string>
#include <vector>

#include "magvir/linalg.hpp"

namespace magvir {

struct Singularity {
    enum class Kind { point, line };
    Kind kind = Kind::point;
    Vec point;
    Vec direction;  // lines only, unit length
    double distance(const Vec& x) const;
    std::string describe() const;
};

// Analytic description of (A, V). Rules take points of dimension n.
struct PotentialSpec {
    std::string name;
    int n = 3;
    std::function<Vec(const Vec&)> A_rule;
    std::function<double(const Vec&)> V_rule;
    std::function<Mat(const Vec&)> jacobian_rule;  // J_ij = d_j A_i
    std::function<Vec(const Vec&)> grad_V_rule;
    // Magnetic field matrix supplied directly (used when A is only known numerically).
    std::function<Mat(const Vec&)> field_rule;
    std::function<Vec(const Vec&)> A_raw;  // unmollified rule when A_rule is mollified
    std::vector<Singularity> singular_set;
    double mollify_eps = 0.0;
    std::vector<double> radial_breaks;  // radii where sphere suprema have kinks
    bool zero_A = false;
    bool zero_V = false;

    Vec A(const Vec& x) const;
    double V(const Vec& x) const;
    Mat jacobian(const Vec& x) const;
    Vec grad_V(const Vec& x) const;
    double V_r(const Vec& x) const;  // x^ . grad V
    bool analytic_jacobian() const { return static_cast<bool>(jacobian_rule); }
    std::string jacobian_path() const;
    void check_point(const Vec& x) const;
};

// 5-point central difference; step eps^(1/5) (1 + |x|).
Mat numerical_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x);
Vec numerical_gradient(const std::function<double(const Vec&)>& f, const Vec& x);
double numerical_step(const Vec& x);

struct FieldMatrixSample {
    Vec x;
    Mat B;
    Vec B_tau;
};

FieldMatrixSample eval_B(const PotentialSpec& spec, const Vec& x);
// B of a spec at x without the B_tau part (x = 0 allowed).
Mat field_matrix(const PotentialSpec& spec, const Vec& x);
double gauge_residual(const PotentialSpec& spec, const std::vector<Vec>& samples);
// curl A as a 3-vector from an antisymmetric 3x3 matrix B (B v = curl A x v).
Eigen::Vector3d curl_from_B(const Mat& B);

}  // namespace magvir
