#pragma once

#include <functional>
#include <vector>

#include "magvir/fields.hpp"

namespace magvir {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    int max_depth = 18;
    // Radial window for weighted radial integrals.
    double rho_scale = 1.0;
    double rho_max = 1e8;
    int max_shells = 80;
    std::vector<double> breaks;  // radii where the integrand has kinks
    int fixed_nodes = 0;  // > 0: fixed Gauss-Legendre per piece instead of adaptive (expensive profiles)
    // Biot-Savart integral.
    double support_inner = 0.0;
    double support_outer = 0.0;  // truncation radius, required
    int n_radial = 8;
    int n_polar = 8;
    int n_azimuth = 16;
    double exclusion = 0.05;  // radius of the excluded ball around y = x
    int max_refinements = 4;
};

using VectorRule3 = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;

struct BiotSavartResult {
    Eigen::Vector3d A = Eigen::Vector3d::Zero();
    double scale = 0.0;   // (1/4pi) int |B| over the quadrature, the size used for the tolerance
    double change = 0.0;  // |difference| between the last two refinement levels
    int level = 0;
};

// One fixed-resolution evaluation with Richardson over the excluded ball.
BiotSavartResult biot_savart_fixed(const VectorRule3& B, const Eigen::Vector3d& x,
                                   const QuadratureConfig& q, int level);

// Refines until two successive levels agree to rel_tol * scale.
BiotSavartResult biot_savart_refined(const VectorRule3& B, const Eigen::Vector3d& x,
                                     const QuadratureConfig& q);

Eigen::Vector3d biot_savart(const VectorRule3& B, const Eigen::Vector3d& x,
                            const QuadratureConfig& q);

// Potential spec whose A is the fixed-level Biot-Savart integral of B.
PotentialSpec biot_savart_potential(const VectorRule3& B, const QuadratureConfig& q, int level,
                                    const std::string& name);

}  // namespace magvir
