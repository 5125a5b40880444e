#pragma once

#include <functional>
#include <vector>

#include "magvir/linalg.hpp"

namespace magvir {

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int npts, double a = -1.0, double b = 1.0);

// Deterministic, roughly uniform unit directions in R^n.
// n = 2: equispaced angles; n = 3: spherical Fibonacci lattice;
// n >= 4: Halton points pushed through the normal quantile and normalized.
std::vector<Vec> sphere_directions(int n, int count);

// Tensor rule on S^2 (Gauss-Legendre in cos(theta) times trapezoid in phi).
// Weights sum to 4*pi.
struct SphereRule {
    std::vector<Eigen::Vector3d> dirs;
    std::vector<double> w;
};
SphereRule sphere_rule_3d(int n_polar, int n_azimuth);

// Adaptive Gauss-Kronrod on [a, b] split at the given interior breakpoints.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breaks, double rel_tol, int max_depth = 18);

}  // namespace magvir
