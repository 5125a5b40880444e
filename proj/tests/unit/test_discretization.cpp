#include <gtest/gtest.h>

#include <random>

#include "magvir/errors.hpp"
#include "magvir/grid.hpp"
#include "magvir/hamiltonian.hpp"
#include "magvir/norms.hpp"
#include "magvir/potentials.hpp"

using namespace magvir;

namespace {

GridSpec grid(int n, int N, double L, Scheme s = Scheme::spectral) {
    GridSpec g;
    g.n = n;
    g.N = N;
    g.L = L;
    g.scheme = s;
    return g;
}

CVec plane_wave(const SpectralOps& ops, const std::vector<int>& mode) {
    CVec u(ops.size());
    const double k0 = kPi / ops.grid().L;
    for (long long i = 0; i < ops.size(); ++i) {
        const Vec x = ops.point(i);
        double ph = 0;
        for (int j = 0; j < ops.n(); ++j) ph += mode[j] * k0 * x[j];
        u[i] = std::polar(1.0, ph);
    }
    return u;
}

CVec gaussian(const SpectralOps& ops, double w, const Vec& p) {
    CVec u(ops.size());
    for (long long i = 0; i < ops.size(); ++i) {
        const Vec x = ops.point(i);
        u[i] = std::exp(-x.squaredNorm() / (w * w)) * std::polar(1.0, p.dot(x));
    }
    return u;
}

CVec random_smooth(const SpectralOps& ops, std::uint64_t seed) {
    // random coefficients on low modes only
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    CVec uh = CVec::Zero(ops.size());
    for (long long i = 0; i < ops.size(); ++i)
        if (ops.ksq()[i] <= 4.0) uh[i] = cplx(N(rng), N(rng));
    return ops.inverse(uh);
}

}  // namespace

TEST(Grid, ValidateRejectsBadSpecs) {
    EXPECT_THROW(grid(3, 7, 4).validate(), ConfigError);
    EXPECT_THROW(grid(3, 8, -1).validate(), ConfigError);
    EXPECT_NO_THROW(grid(3, 8, 4).validate());
    EXPECT_EQ(grid(3, 8, 4).size(), 512);
    EXPECT_DOUBLE_EQ(grid(3, 8, 4).h(), 1.0);
}

TEST(Grid, NodesAvoidTheOrigin) {
    const SpectralOps ops(grid(3, 8, 4));
    for (long long i = 0; i < ops.size(); ++i) EXPECT_GT(ops.radius()[i], 0.0);
}

TEST(Grid, FftRoundTrip) {
    const SpectralOps ops(grid(3, 12, 3));
    const CVec u = random_smooth(ops, 1) + gaussian(ops, 0.7, Vec::Zero(3));
    EXPECT_LE((ops.inverse(ops.forward(u)) - u).norm(), 1e-12 * u.norm());
}

TEST(Discretization, PlaneWaveDerivativesAreExact) {
    const SpectralOps ops(grid(3, 12, 2.5));
    const std::vector<int> mode = {2, -3, 1};
    const CVec u = plane_wave(ops, mode);
    const double k0 = kPi / 2.5;
    for (int j = 0; j < 3; ++j) {
        const CVec du = ops.derivative(u, j);
        EXPECT_LE((du - cplx(0, mode[j] * k0) * u).norm(), 1e-11 * u.norm());
    }
    const double k2 = (4 + 9 + 1) * k0 * k0;
    EXPECT_LE((ops.laplacian(u) + k2 * u).norm(), 1e-10 * k2 * u.norm());
}

TEST(Discretization, NyquistSymbolIsZero) {
    const SpectralOps ops(grid(2, 8, 1));
    const CVec u = plane_wave(ops, {4, 0});
    EXPECT_LE(ops.derivative(u, 0).norm(), 1e-12 * u.norm());
}

TEST(Discretization, Fd4ConvergesAtFourthOrder) {
    double prev = 0;
    for (int N : {16, 32}) {
        const SpectralOps ops(grid(2, N, kPi, Scheme::fd4));
        CVec u(ops.size()), exact(ops.size());
        for (long long i = 0; i < ops.size(); ++i) {
            const Vec x = ops.point(i);
            u[i] = std::sin(x[0]);
            exact[i] = std::cos(x[0]);
        }
        const double err = (ops.derivative(u, 0) - exact).cwiseAbs().maxCoeff();
        if (prev > 0) EXPECT_NEAR(prev / err, 16.0, 1.5);
        prev = err;
    }
}

TEST(Discretization, LeibnizForBandLimitedProducts) {
    const SpectralOps ops(grid(3, 16, 3));
    const CVec f = plane_wave(ops, {1, 0, 2}) + 0.5 * plane_wave(ops, {0, -1, 1});
    const CVec g = plane_wave(ops, {-2, 1, 0});
    for (int j = 0; j < 3; ++j) {
        const CVec lhs = ops.derivative(f.cwiseProduct(g), j);
        const CVec rhs = ops.derivative(f, j).cwiseProduct(g) + f.cwiseProduct(ops.derivative(g, j));
        EXPECT_LE((lhs - rhs).norm(), 1e-11 * lhs.norm());
    }
}

TEST(Discretization, HamiltonianIsCovariantComposition) {
    auto ops = make_ops(grid(3, 12, 3));
    const auto spec = vortex({3, 0.7, 1.0, 0.0, 0.3, 1.0});
    const MagneticOperator H(ops, spec);
    const CVec u = gaussian(*ops, 0.9, Vec::Constant(3, 0.4));
    CVec expect = H.V().cast<cplx>().cwiseProduct(u);
    for (int j = 0; j < 3; ++j) expect -= H.cov_derivative(H.cov_derivative(u, j), j);
    EXPECT_LE((H.apply(u) - expect).norm(), 1e-12 * expect.norm());
    // energy form agrees with <u, Hu>
    EXPECT_NEAR(H.energy_form(u), ops->inner(u, H.apply(u)).real(), 1e-10 * H.energy_form(u));
    EXPECT_LE(std::abs(ops->inner(u, H.apply(u)).imag()), 1e-12 * H.energy_form(u));
}

TEST(Discretization, DenseHamiltonianIsHermitian) {
    auto ops = make_ops(grid(3, 6, 2));
    const MagneticOperator H(ops, vortex({3, 1.0, 1.0, 0.0, 0.5, 1.0}));
    const CMat D = H.dense();
    EXPECT_LE((D - D.adjoint()).norm(), 1e-12 * D.norm());
    // the dense matrix reproduces apply
    const CVec u = random_smooth(*ops, 3);
    EXPECT_LE((D * u - H.apply(u)).norm(), 1e-12 * D.norm() * u.norm());
}

TEST(Discretization, ZeroPotentialIsMinusLaplacian) {
    auto ops = make_ops(grid(3, 10, 2.5));
    const MagneticOperator H(ops, free_potential(3));
    EXPECT_TRUE(H.zero_A());
    const CVec u = random_smooth(*ops, 4);
    EXPECT_LE((H.apply(u) + ops->laplacian(u)).norm(), 1e-12 * ops->laplacian(u).norm());
}

TEST(Discretization, GaugeCovariance) {
    // A -> A + grad psi with psi = c . x; e^{i psi} is a grid plane wave, so only aliasing of the
    // shifted spectrum breaks exactness
    auto ops = make_ops(grid(3, 48, 4));
    const double k0 = kPi / 4;
    Vec c(3);
    c << k0, -2 * k0, 0;
    const auto base = vortex({3, 0.8, 1.0, 0.0, 0.0, 1.0});
    const auto gauged = gauge_transform(
        base, [c](const Vec& x) { return c.dot(x); }, [c](const Vec&) { return c; },
        [](const Vec&) { return Mat::Zero(3, 3); });
    const MagneticOperator H0(ops, base), H1(ops, gauged);
    const CVec u = gaussian(*ops, 0.8, Vec::Zero(3));
    CVec phase(ops->size());
    for (long long i = 0; i < ops->size(); ++i) phase[i] = std::polar(1.0, c.dot(ops->point(i)));
    const CVec lhs = H1.apply(phase.cwiseProduct(u));
    const CVec rhs = phase.cwiseProduct(H0.apply(u));
    EXPECT_LE((lhs - rhs).norm(), 1e-8 * rhs.norm());
}

TEST(Discretization, RadialSplitIsOrthogonalDecomposition) {
    auto ops = make_ops(grid(3, 10, 2.5));
    const MagneticOperator H(ops, vortex({3, 0.5, 1.0, 0.0, 0.0, 1.0}));
    const auto g = H.magnetic_gradient(random_smooth(*ops, 5));
    const auto s = split_radial_tangential(g, *ops);
    for (long long i = 0; i < ops->size(); ++i) {
        cplx dot = 0;
        const Vec xh = ops->point(i) / ops->radius()[i];
        double rad_par = 0;
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(std::abs(s.radial[j][i] + s.tangential[j][i] - g[j][i]), 0.0, 1e-12);
            dot += std::conj(s.radial[j][i]) * s.tangential[j][i];
            rad_par += std::abs(s.tangential[j][i] * xh[j]);
        }
        EXPECT_NEAR(std::abs(dot), 0.0, 1e-10);
    }
}

TEST(Discretization, DiamagneticInequality) {
    auto ops = make_ops(grid(3, 16, 3));
    const MagneticOperator H(ops, vortex({3, 1.2, 1.0, 0.0, 0.0, 1.0}));
    CVec u = gaussian(*ops, 0.9, Vec::Constant(3, 0.3));
    CVec absu = u.cwiseAbs().cast<cplx>();
    double lhs = 0;
    for (const auto& d : ops->gradient(absu)) lhs += ops->norm2(d);
    double rhs = 0;
    for (const auto& d : H.magnetic_gradient(u)) rhs += ops->norm2(d);
    EXPECT_LE(lhs, rhs * (1 + 1e-8));
}

TEST(DistortedNorm, PathsAgreeOnSmallGrid) {
    auto ops = make_ops(grid(3, 8, 2.5));
    auto H = std::make_shared<const MagneticOperator>(ops, vortex({3, 0.6, 1.0, 0.0, 0.4, 1.0}));
    const CVec f = gaussian(*ops, 0.9, Vec::Zero(3));
    NormEngineOptions dense_opt;
    NormEngineOptions lanczos_opt;
    lanczos_opt.prefer_dense = false;
    lanczos_opt.dense_cap = 0;
    lanczos_opt.lanczos_tol = 1e-12;
    const DistortedNormEngine A(H, dense_opt), B(H, lanczos_opt);
    EXPECT_EQ(A.path(), DistortedNormEngine::Path::dense);
    EXPECT_EQ(B.path(), DistortedNormEngine::Path::lanczos);
    for (double s : {0.5, 1.0, 2.0}) EXPECT_NEAR(A.norm(f, s), B.norm(f, s), 1e-7 * A.norm(f, s)) << s;
    // s = 1 is the energy form, s = 2 is ||Hf||
    EXPECT_NEAR(A.norm(f, 1.0), std::sqrt(H->energy_form(f)), 1e-9 * A.norm(f, 1.0));
    EXPECT_NEAR(A.norm(f, 2.0), std::sqrt(ops->norm2(H->apply(f))), 1e-9 * A.norm(f, 2.0));
}

TEST(DistortedNorm, FreeSymbolPath) {
    auto ops = make_ops(grid(3, 12, 3));
    auto H = std::make_shared<const MagneticOperator>(ops, free_potential(3));
    const DistortedNormEngine E(H);
    EXPECT_EQ(E.path(), DistortedNormEngine::Path::free_symbol);
    const CVec u = plane_wave(*ops, {1, 2, 0});
    const double k = std::sqrt(5.0) * kPi / 3;
    EXPECT_NEAR(E.norm(u, 1.0), k * std::sqrt(ops->norm2(u)), 1e-10 * k);
    EXPECT_NEAR(E.norm(u, 0.5), std::sqrt(k) * std::sqrt(ops->norm2(u)), 1e-10 * k);
}

TEST(DistortedNorm, NegativeSpectrumRefused) {
    auto ops = make_ops(grid(3, 6, 2));
    VortexParams p{3, 0.0, 1.0, 0.0, -20.0, 1.0};
    auto H = std::make_shared<const MagneticOperator>(ops, vortex(p));
    EXPECT_THROW(DistortedNormEngine E(H), SpectralError);
}
