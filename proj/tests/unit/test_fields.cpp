#include <gtest/gtest.h>

#include <random>

#include "magvir/biot_savart.hpp"
#include "magvir/errors.hpp"
#include "magvir/fields.hpp"
#include "magvir/potentials.hpp"
#include "oracles.hpp"

using namespace magvir;

namespace {

Vec v3(double a, double b, double c) {
    Vec x(3);
    x << a, b, c;
    return x;
}

Vec random_point(std::mt19937_64& rng, int n, double scale = 2.0) {
    std::uniform_real_distribution<double> U(-scale, scale);
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = U(rng);
    return x;
}

PotentialSpec affine_identity(int n) {
    PotentialSpec s;
    s.name = "identity";
    s.n = n;
    s.A_rule = [](const Vec& x) { return x; };
    s.V_rule = [](const Vec&) { return 0.0; };
    return s;
}

// curl of a 3D vector field by the test's own finite differences
Eigen::Vector3d fd_curl(const PotentialSpec& s, const Vec& x) {
    auto J = oracle::fd_jacobian([&](const Vec& y) { return s.A(y); }, x, 1e-3);
    return Eigen::Vector3d(J[2][1] - J[1][2], J[0][2] - J[2][0], J[1][0] - J[0][1]);
}

}  // namespace

TEST(Fields, AzimuthalPointValueAtOneZeroOne) {
    const auto s = azimuthal_point(1.0, 0.0);
    const auto f = eval_B(s, v3(1, 0, 1));
    const Eigen::Vector3d c = curl_from_B(f.B);
    EXPECT_NEAR(c[0], 0.5, 1e-12);
    EXPECT_NEAR(c[1], 0.0, 1e-12);
    EXPECT_NEAR(c[2], 0.5, 1e-12);
    EXPECT_LE(f.B_tau.norm(), 1e-12);
    // B v = curl A x v
    const Eigen::Vector3d v(0.3, -1.2, 0.7);
    const Vec Bv = f.B * Vec(v);
    const Eigen::Vector3d cv = c.cross(v);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(Bv[i], cv[i], 1e-12);
}

TEST(Fields, ConstantPotentialHasNoField) {
    PotentialSpec s;
    s.name = "const";
    s.n = 3;
    s.A_rule = [](const Vec&) { return v3(1.5, -2, 0.25); };
    s.V_rule = [](const Vec&) { return 0.0; };
    const auto f = eval_B(s, v3(0.4, 0.1, -0.9));
    EXPECT_LE(f.B.norm(), 1e-9);
    EXPECT_LE(f.B_tau.norm(), 1e-9);
}

TEST(Fields, GaugeBySineLeavesFieldUnchanged) {
    const auto base = azimuthal_point(1.0, 0.0);
    const auto g = gauge_transform(
        base, [](const Vec& x) { return std::sin(x[0]); }, [](const Vec& x) { return v3(std::cos(x[0]), 0, 0); },
        [](const Vec& x) {
            Mat h = Mat::Zero(3, 3);
            h(0, 0) = -std::sin(x[0]);
            return h;
        });
    std::mt19937_64 rng(1);
    for (int k = 0; k < 10; ++k) {
        const Vec x = random_point(rng, 3);
        EXPECT_LE((eval_B(base, x).B - eval_B(g, x).B).norm(), 1e-10);
    }
}

TEST(Fields, GaugeInvarianceRandomPotentialsNumericalJacobian) {
    // psi without a supplied Hessian: the Jacobian of A + grad psi goes through finite differences
    const auto base = vortex({3, 0.8, 1.2, 0.0, 0.0, 1.0});
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int k = 0; k < 20; ++k) {
        const Vec a = random_point(rng, 3, 1.0);
        const double c = U(rng);
        const auto g = gauge_transform(
            base, [a, c](const Vec& x) { return c * std::sin(a.dot(x)); },
            [a, c](const Vec& x) { return Vec(c * std::cos(a.dot(x)) * a); });
        const Vec x = random_point(rng, 3);
        EXPECT_LE((eval_B(base, x).B - eval_B(g, x).B).norm(), 1e-9) << "sample " << k;
    }
}

TEST(Fields, AntisymmetryAndTangentialityOnRandomSamples) {
    std::mt19937_64 rng(3);
    const std::vector<PotentialSpec> specs = {azimuthal_point(1.0, 0.3), azimuthal_line(0.7, 0.2),
                                              vortex({3, 1.0, 0.8, 0.0, 0.0, 1.0}), vortex({4, 0.5, 1.0, 0.0, 0.0, 1.0})};
    for (const auto& s : specs) {
        for (int k = 0; k < 50; ++k) {
            const Vec x = random_point(rng, s.n);
            const auto f = eval_B(s, x);
            EXPECT_LE((f.B + f.B.transpose()).norm(), 1e-12 * std::max(1.0, f.B.norm())) << s.name;
            EXPECT_LE(std::abs(x.dot(f.B_tau)), 1e-12 * std::max(1e-300, x.norm() * f.B_tau.norm()) + 1e-15)
                << s.name;
        }
    }
}

TEST(Fields, MatrixFieldMatchesCurlCrossProduct) {
    std::mt19937_64 rng(4);
    const auto s = vortex({3, 1.3, 0.9, 0.0, 0.0, 1.0});
    for (int k = 0; k < 50; ++k) {
        const Vec x = random_point(rng, 3);
        const Vec v = random_point(rng, 3, 1.0);
        const Eigen::Vector3d c = fd_curl(s, x);
        const Vec Bv = field_matrix(s, x) * v;
        const Eigen::Vector3d cv = c.cross(Eigen::Vector3d(v));
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(Bv[i], cv[i], 1e-9);
    }
}

TEST(Fields, ExampleFieldsAreTangentialFree) {
    std::mt19937_64 rng(5);
    const auto point = azimuthal_point(1.0, 0.0);
    const auto line = azimuthal_line(1.0, 0.0);
    for (int k = 0; k < 50; ++k) {
        const Vec x = random_point(rng, 3);
        EXPECT_LE(eval_B(point, x).B_tau.norm(), 1e-12 * eval_B(point, x).B.norm());
        EXPECT_LE(eval_B(line, x).B_tau.norm(), 1e-9 * std::max(1.0, eval_B(line, x).B.norm()));
    }
    // the homogeneous family is radial, hence B x^ = b x (x^) = 0
    HomogeneousFamily fam;
    for (int k = 0; k < 50; ++k) {
        const Eigen::Vector3d y = Eigen::Vector3d(random_point(rng, 3));
        const Eigen::Vector3d b = fam(y);
        EXPECT_LE(b.cross(y.normalized()).norm(), 1e-15 + 1e-12 * b.norm());
    }
}

TEST(Fields, OriginAndSingularSetErrors) {
    const auto s = azimuthal_point(1.0, 0.0);
    EXPECT_THROW(eval_B(s, Vec::Zero(3)), DomainError);
    EXPECT_THROW(s.A(Vec::Zero(3)), DomainError);
    const auto line = azimuthal_line(1.0, 0.0);
    EXPECT_THROW(line.A(v3(0, 0, 2)), DomainError);
    EXPECT_THROW(s.A(Vec::Zero(2)), ArgumentError);
}

TEST(Fields, GaugeResidualExamples) {
    std::mt19937_64 rng(6);
    std::vector<Vec> pts;
    for (int k = 0; k < 100; ++k) pts.push_back(random_point(rng, 3));
    EXPECT_LE(gauge_residual(azimuthal_point(1.0, 0.0), pts), 1e-10);
    EXPECT_NEAR(gauge_residual(affine_identity(3), pts), 3.0, 1e-8);
    EXPECT_NEAR(gauge_residual(affine_identity(5), {Vec::Constant(5, 0.3)}), 5.0, 1e-8);
    // harmonic psi = x^2 - y^2 + 3 x z leaves div A alone
    const auto g = gauge_transform(
        azimuthal_point(1.0, 0.0), [](const Vec& x) { return x[0] * x[0] - x[1] * x[1] + 3 * x[0] * x[2]; },
        [](const Vec& x) { return v3(2 * x[0] + 3 * x[2], -2 * x[1], 3 * x[0]); });
    EXPECT_LE(gauge_residual(g, pts), 1e-10);
    EXPECT_THROW(gauge_residual(g, {}), ArgumentError);
}

TEST(Fields, NumericalJacobianMatchesAnalytic) {
    std::mt19937_64 rng(7);
    const auto s = azimuthal_point(1.0, 0.0);
    for (int k = 0; k < 20; ++k) {
        const Vec x = random_point(rng, 3);
        const Mat J = numerical_jacobian([&](const Vec& y) { return s.A(y); }, x);
        EXPECT_LE((J - s.jacobian(x)).norm(), 1e-9 * std::max(1.0, J.norm()));
    }
}
