#include <gtest/gtest.h>

#include "magvir/biot_savart.hpp"
#include "magvir/errors.hpp"
#include "magvir/potentials.hpp"

using namespace magvir;

namespace {

QuadratureConfig annulus(double a, double b) {
    QuadratureConfig q;
    q.support_inner = a;
    q.support_outer = b;
    q.rel_tol = 1e-8;
    return q;
}

}  // namespace

TEST(BiotSavart, ZeroFieldGivesZeroPotential) {
    const VectorRule3 zero = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
    const auto A = biot_savart(zero, Eigen::Vector3d(0.3, 0.2, 1.0), annulus(0.5, 2.0));
    EXPECT_EQ(A.norm(), 0.0);
}

TEST(BiotSavart, HomogeneousFamilyVanishesOnItsAxis) {
    HomogeneousFamily fam;  // alpha = 3, omega = e3
    QuadratureConfig q = annulus(fam.inner, fam.outer);
    q.rel_tol = 1e-6;
    const VectorRule3 B = [fam](const Eigen::Vector3d& y) { return fam(y); };
    for (double r : {0.25, 1.0, 2.0}) {
        const auto res = biot_savart_refined(B, r * fam.omega, q);
        EXPECT_LE(res.A.norm(), 10 * q.rel_tol * res.scale) << "r = " << r;
    }
}

TEST(BiotSavart, TaperedAzimuthalRoundTrip) {
    // divergence-free compactly supported B; BS[B] should reproduce the potential
    const double a0 = 0.6, a1 = 0.9, b0 = 1.6, b1 = 2.2;
    const auto A = tapered_azimuthal(1.0, a0, a1, b0, b1);
    const auto curl = tapered_azimuthal_curl(1.0, a0, a1, b0, b1);
    QuadratureConfig q = annulus(a0, b1);
    q.breaks = {a1, b0};
    q.rel_tol = 1e-7;
    const std::vector<Eigen::Vector3d> probes = {{1.2, 0.1, 0.3}, {0.2, -1.0, 0.8}, {0.0, 0.7, -1.1}};
    for (const auto& x : probes) {
        const auto res = biot_savart_refined(curl, x, q);
        const Eigen::Vector3d exact = Eigen::Vector3d(A.A(Vec(x)));
        EXPECT_LE((res.A - exact).norm(), 10 * q.rel_tol * std::max(1.0, res.scale)) << x.transpose();
    }
}

TEST(BiotSavart, RoundTripErrorShrinksWithLevel) {
    const double a0 = 0.6, a1 = 0.9, b0 = 1.6, b1 = 2.2;
    const auto A = tapered_azimuthal(1.0, a0, a1, b0, b1);
    const auto curl = tapered_azimuthal_curl(1.0, a0, a1, b0, b1);
    QuadratureConfig q = annulus(a0, b1);
    q.breaks = {a1, b0};
    const Eigen::Vector3d x(1.1, 0.4, -0.5);
    const Eigen::Vector3d exact = Eigen::Vector3d(A.A(Vec(x)));
    double prev = 1e300;
    for (int level = 0; level <= 2; ++level) {
        const double err = (biot_savart_fixed(curl, x, q, level).A - exact).norm();
        EXPECT_LT(err, prev) << "level " << level;
        prev = err;
    }
    EXPECT_LE(prev, 1e-6);
}

TEST(BiotSavart, FieldOfReconstructionMatchesSource) {
    // eval_B applied to the reconstructed spec recovers B at interior probes
    const double a0 = 0.6, a1 = 0.9, b0 = 1.6, b1 = 2.2;
    const auto curl = tapered_azimuthal_curl(1.0, a0, a1, b0, b1);
    QuadratureConfig q = annulus(a0, b1);
    q.breaks = {a1, b0};
    const auto spec = biot_savart_potential(curl, q, 2, "bs-tapered");
    const Eigen::Vector3d x(0.5, 0.9, 0.4);  // |x| ~ 1.1, inside the annulus
    const Eigen::Vector3d c = curl_from_B(field_matrix(spec, Vec(x)));
    EXPECT_LE((c - curl(x)).norm(), 1e-5 * std::max(1.0, curl(x).norm()));
}

TEST(BiotSavart, RequiresTruncationRadius) {
    const VectorRule3 zero = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
    QuadratureConfig q;
    EXPECT_THROW(biot_savart(zero, Eigen::Vector3d(1, 0, 0), q), ArgumentError);
}
