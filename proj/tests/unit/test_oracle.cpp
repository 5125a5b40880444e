#include <gtest/gtest.h>

#include "magvir/errors.hpp"
#include "magvir/oracle.hpp"
#include "magvir/potentials.hpp"
#include "magvir/virial.hpp"

using namespace magvir;

namespace {

GridSpec grid(int N, double L) {
    GridSpec g;
    g.n = 3;
    g.N = N;
    g.L = L;
    return g;
}

CVec gaussian(const SpectralOps& ops, double w, double p) {
    CVec u(ops.size());
    for (long long i = 0; i < ops.size(); ++i) {
        const Vec x = ops.point(i);
        u[i] = std::exp(-x.squaredNorm() / (w * w)) * std::polar(1.0, p * (x[0] - 0.5 * x[2]));
    }
    return u;
}

}  // namespace

TEST(Oracle, TIsMinusCommutatorWithPhi) {
    auto ops = make_ops(grid(6, 2.5));
    const MagneticOperator H(ops, vortex({3, 0.8, 1.0, 0.0, 0.3, 1.0}));
    const auto m = make_morawetz_3d(0.5, 1.0);
    const auto Hd = dense_hamiltonian(H);
    const auto T = build_T(H, m);
    Vec phi(ops->size());
    for (long long i = 0; i < ops->size(); ++i) phi[i] = m.phi(ops->radius()[i]);
    const CMat P = phi.cast<cplx>().asDiagonal();
    const CMat expect = -(Hd.M * P - P * Hd.M);
    EXPECT_LE((T.M - expect).norm(), 1e-12 * expect.norm());
    EXPECT_TRUE(T.antihermitian);
    EXPECT_LE(T.symmetry_defect(), 1e-12);
}

TEST(Oracle, ConstantMultiplierGivesZeroT) {
    auto ops = make_ops(grid(6, 2.5));
    const MagneticOperator H(ops, vortex({3, 0.8, 1.0, 0.0, 0.3, 1.0}));
    const auto T = build_T(H, make_constant(3.0, 3));
    EXPECT_LE(T.M.norm(), 1e-10);
}

TEST(Oracle, DenseFormMatchesAssembler) {
    auto ops = make_ops(grid(8, 3));
    const auto spec = vortex({3, 0.7, 1.0, 0.0, 0.3, 1.0});
    const MagneticOperator H(ops, spec);
    for (const auto& m : {make_morawetz_3d(0.5, 1.0), make_abs(3)}) {
        const auto Hd = dense_hamiltonian(H);
        const auto C = commutator(Hd, build_T(H, m));
        const VirialAssembler va(H, m, &spec);
        const CVec u = gaussian(*ops, 1.0, 0.7);
        const cplx q = u.dot(C.M * u) * ops->grid().cell();
        const double total = va.commutator_terms(u).total;
        EXPECT_NEAR(q.real(), total, 1e-10 * std::abs(total)) << m.id;
        // [H, T] is hermitian, so the form is real
        EXPECT_LE(std::abs(q.imag()), 1e-12 * std::abs(q.real())) << m.id;
    }
}

TEST(Oracle, FreeMorawetzFormHasNoMagneticTerms) {
    auto ops = make_ops(grid(8, 3));
    const MagneticOperator H(ops, free_potential(3));
    const VirialAssembler va(H, make_morawetz_3d(0.5, 1.0));
    const auto t = va.commutator_terms(gaussian(*ops, 1.0, 0.5));
    EXPECT_EQ(t.btau, 0.0);
    EXPECT_EQ(t.vr, 0.0);
    EXPECT_NEAR(t.hessian + t.bilap, t.total, 1e-10 * std::abs(t.total));
}

TEST(Oracle, DirectConstructionIsAntihermitian) {
    auto ops = make_ops(grid(8, 3));
    const MagneticOperator H(ops, vortex({3, 0.5, 1.0, 0.0, 0.0, 1.0}));
    const auto b = build_T(H, make_perturbed_nd(1.0, 3), TConstruction::direct);
    EXPECT_TRUE(b.antihermitian);
    EXPECT_LE(b.symmetry_defect(), 1e-12);
    const CVec u = gaussian(*ops, 1.0, 0.5);
    EXPECT_LE(std::abs(u.dot(b.M * u).real()), 1e-12 * (b.M * u).norm() * u.norm());
}

TEST(Oracle, SchrodingerIdentityExactFlow) {
    auto ops = make_ops(grid(8, 3));
    const MagneticOperator H(ops, vortex({3, 0.8, 1.0, 0.0, 0.3, 1.0}));
    const auto rep = commutator_identity_check(gaussian(*ops, 1.0, 0.4), H, make_morawetz_3d(0.5, 1.0), 0.01, 10);
    EXPECT_GT(rep.max_rhs, 0.0);
    EXPECT_LE(rep.max_residual, 1e-6 * rep.max_rhs);
    EXPECT_LE(rep.max_imag, 1e-12);
}

TEST(Oracle, WaveIdentityExactFlow) {
    auto ops = make_ops(grid(8, 3));
    const MagneticOperator H(ops, vortex({3, 0.8, 1.0, 0.0, 0.3, 1.0}));
    const CVec f = gaussian(*ops, 1.0, 0.0);
    const CVec g = 0.5 * gaussian(*ops, 0.9, 0.3);
    const auto rep = wave_identity_check(f, g, H, make_morawetz_3d(0.5, 1.0), make_plateau(1.0), 0.01, 10);
    EXPECT_LE(rep.max_residual, 1e-6 * std::max(1.0, rep.max_rhs));
    // T is antihermitian, so Re <u_t, T u_t> vanishes
    EXPECT_LE(rep.max_re_ut_T_ut, 1e-12);
    EXPECT_LE(rep.max_intermediate_residual, 1e-6);
}

TEST(Oracle, RefusesLargeGrids) {
    auto ops = make_ops(grid(14, 3));
    const MagneticOperator H(ops, free_potential(3));
    EXPECT_THROW(dense_hamiltonian(H), ArgumentError);
}

TEST(Oracle, SymmetryFlagsAreChecked) {
    CMat M = CMat::Identity(3, 3);
    M(0, 1) = 1.0;
    EXPECT_THROW(DenseOperator::make("bad", M, true, false), SpectralError);
    EXPECT_NO_THROW(DenseOperator::make("ok", CMat::Identity(3, 3), true, false));
}

TEST(Oracle, DenseLaplacianPairingApproachesWeakForm) {
    // equal in the continuum; on the grid they differ by aliasing in |u|^2, which shrinks with h
    std::vector<double> gap;
    for (int N : {8, 12}) {
        auto ops = make_ops(grid(N, 3));
        const MagneticOperator H(ops, vortex({3, 0.5, 1.0, 0.0, 0.0, 1.0}));
        Vec psi(ops->size());
        for (long long i = 0; i < ops->size(); ++i) psi[i] = std::exp(-ops->point(i).squaredNorm());
        const CVec u = gaussian(*ops, 1.0, 0.3);
        const double a = dense_laplacian_pairing(H, psi, u);
        gap.push_back(std::abs(a - weak_laplacian_pairing(H, psi, u)) / std::abs(a));
    }
    EXPECT_LT(gap[1], 0.1 * gap[0]);
}
