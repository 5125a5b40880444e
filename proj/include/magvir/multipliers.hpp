#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "magvir/linalg.hpp"

namespace magvir {

struct RadialMultiplier {
    std::string id;
    int n = 3;
    double M = 0.0;
    double R = 1.0;
    std::function<double(double)> phi;
    std::function<double(double)> dphi;
    std::function<double(double)> d2phi;
    std::function<double(double)> bilap_regular;
    double point_mass = 0.0;                              // weight of delta_0
    std::vector<std::pair<double, double>> surface_masses;  // (radius, weight of delta_{|x|=radius})
    std::vector<double> breaks;                           // piece boundaries
    bool bounded_dphi = false;
    bool bounded_r_d2phi = false;

    double lap(double r) const { return d2phi(r) + (n - 1) * dphi(r) / r; }
    Vec gradient(const Vec& x) const;
    Mat hessian(const Vec& x) const;
};

// Plateau weight Psi = inside for |x| <= R, outside beyond (R = inf gives a constant).
struct PlateauWeight {
    double R = 1.0;
    double inside = 0.5;
    double outside = 0.0;
    double operator()(const Vec& x) const { return x.norm() <= R ? inside : outside; }
};

RadialMultiplier make_morawetz_3d(double M, double R);
RadialMultiplier make_abs(int n);
RadialMultiplier make_perturbed_nd(double R, int n);
// The phi_R perturbation alone (phi~_R = |x| + this).
RadialMultiplier make_perturbation_part(double R, int n);
RadialMultiplier make_variance(int n = 3);
RadialMultiplier make_constant(double c, int n = 3);
PlateauWeight make_plateau(double R);
PlateauWeight make_uniform_weight(double c);

double hessian_form(const RadialMultiplier& m, const Vec& x, const CVec& w);

// Rows r, phi, phi', phi'', lap phi.
void write_profile_csv(const RadialMultiplier& m, const std::string& path, double r_max, int rows);

}  // namespace magvir
