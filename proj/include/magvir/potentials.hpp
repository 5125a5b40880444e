#pragma once

#include <functional>
#include <string>

#include "magvir/fields.hpp"

namespace magvir {

PotentialSpec free_potential(int n);

// A = lambda (-y, x, 0) / max(|x|, eps)^2, singular at the origin when eps = 0.
PotentialSpec azimuthal_point(double lambda, double eps);

// A = lambda (-y, x, 0) / max(x^2 + y^2, eps^2), singular on the z-axis when eps = 0.
PotentialSpec azimuthal_line(double lambda, double eps);

// azimuthal_point multiplied by a radial taper equal to 1 on [a1, b0] and 0 outside (a0, b1).
// Still divergence-free; its curl is supported in the annulus.
PotentialSpec tapered_azimuthal(double lambda, double a0, double a1, double b0, double b1);
// curl of tapered_azimuthal in closed form.
std::function<Eigen::Vector3d(const Eigen::Vector3d&)> tapered_azimuthal_curl(
    double lambda, double a0, double a1, double b0, double b1);

// Smooth rotation field in the (x1, x2) plane with profile exp(-|x|^2/w^2) (n >= 2),
// or with algebraic profile (1 + |x|^2)^(-p/2) when algebraic_power > 0.
struct VortexParams {
    int n = 3;
    double strength = 1.0;
    double width = 1.0;
    double algebraic_power = 0.0;
    double well_depth = 0.0;  // V = well_depth * exp(-|x|^2 / well_width^2)
    double well_width = 1.0;
};
PotentialSpec vortex(const VortexParams& p);

// A -> A + grad psi. Hessian of psi keeps the Jacobian analytic when the base has one.
PotentialSpec gauge_transform(const PotentialSpec& base, std::function<double(const Vec&)> psi,
                              std::function<Vec(const Vec&)> grad_psi,
                              std::function<Mat(const Vec&)> hess_psi = {});

PotentialSpec scaled(const PotentialSpec& base, double lambda_A, double lambda_V);

// Radial field with angular bump h(y^.w) and homogeneity -alpha, supported on a <= |y| <= b.
struct HomogeneousFamily {
    double alpha = 3.0;
    Eigen::Vector3d omega{0, 0, 1};
    double bump_width = 0.25;  // h(s) = exp(-(1-s)^2 / (2 width^2))
    double inner = 0.5;
    double outer = 4.0;
    Eigen::Vector3d operator()(const Eigen::Vector3d& y) const;
};

}  // namespace magvir
