#include <gtest/gtest.h>

#include <random>

#include "magvir/errors.hpp"
#include "magvir/functionals.hpp"
#include "magvir/potentials.hpp"
#include "magvir/virial.hpp"

using namespace magvir;

namespace {

GridSpec grid(int n, int N, double L) {
    GridSpec g;
    g.n = n;
    g.N = N;
    g.L = L;
    return g;
}

CVec gaussian(const SpectralOps& ops, double w, const Vec& p, const Vec& c) {
    CVec u(ops.size());
    for (long long i = 0; i < ops.size(); ++i) {
        const Vec x = ops.point(i) - c;
        u[i] = std::exp(-x.squaredNorm() / (w * w)) * std::polar(1.0, p.dot(ops.point(i)));
    }
    return u;
}

CVec gaussian(const SpectralOps& ops, double w, const Vec& p) { return gaussian(ops, w, p, Vec::Zero(ops.n())); }

double grad_sq(const SpectralOps& ops, const CVec& u) {
    double s = 0;
    for (const auto& d : ops.gradient(u)) s += ops.norm2(d);
    return s;
}

EvolutionConfig quiet(double dt, int steps, Integrator in) {
    EvolutionConfig c;
    c.dt = dt;
    c.steps = steps;
    c.integrator = in;
    c.monitors = false;
    return c;
}

}  // namespace

// ---- virial terms ---------------------------------------------------------------------------

TEST(Virial, ItemizedTermsSumToCommutator) {
    auto ops = make_ops(grid(3, 12, 3));
    const auto spec = vortex({3, 0.9, 1.0, 0.0, 0.4, 1.0});
    const MagneticOperator H(ops, spec);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> N;
    for (const auto& m : {make_morawetz_3d(0.5, 1.0), make_abs(3), make_perturbed_nd(1.2, 3)}) {
        const VirialAssembler va(H, m, &spec);
        for (int k = 0; k < 3; ++k) {
            Vec p(3), c(3);
            for (int i = 0; i < 3; ++i) p[i] = N(rng), c[i] = 0.3 * N(rng);
            const CVec u = gaussian(*ops, 0.8, p, c);
            const auto t = va.commutator_terms(u);
            EXPECT_NEAR(t.sum(), t.total, 1e-10 * std::max(1.0, std::abs(t.total))) << m.id;
        }
    }
}

TEST(Virial, CommutatorAndDirectTAgreeForSmoothMultiplier) {
    // phi = r^2 is smooth but not periodic; the grid commutator picks up its kink at the box
    // faces, so compare on |x| <= L/2 only
    auto ops = make_ops(grid(3, 48, 5));
    const auto spec = vortex({3, 0.6, 1.0, 0.0, 0.0, 1.0});
    const MagneticOperator H(ops, spec);
    const VirialAssembler va(H, make_variance(3), &spec);
    const CVec u = gaussian(*ops, 0.8, Vec::Constant(3, 0.3));
    CVec d = va.T(u) - va.T_direct(u);
    for (long long i = 0; i < ops->size(); ++i)
        if (ops->radius()[i] > 2.5) d[i] = 0;
    EXPECT_LE(d.norm(), 1e-8 * va.T(u).norm());
}

TEST(Virial, VarianceIdentityFree) {
    // phi = |x|^2, A = V = 0: <u,[H,T]u> = 8 ||grad u||^2
    auto ops = make_ops(grid(3, 24, 4));
    const MagneticOperator H(ops, free_potential(3));
    const VirialAssembler va(H, make_variance(3));
    const CVec u = gaussian(*ops, 0.9, Vec::Unit(3, 0) * 0.7);
    const auto t = va.commutator_terms(u);
    const double g = grad_sq(*ops, u);
    EXPECT_NEAR(t.total, 8 * g, 1e-8 * g);
    EXPECT_NEAR(t.hessian, 8 * g, 1e-8 * g);
    EXPECT_NEAR(t.btau, 0.0, 1e-12 * g);
    EXPECT_NEAR(va.quadrature_terms(u).hessian, 8 * g, 1e-8 * g);
}

TEST(Virial, TangentialTermVanishesForAzimuthalField) {
    // B x^ = 0 pointwise, so the continuum B_tau term is zero; the mollified field is not
    auto ops = make_ops(grid(3, 16, 3));
    const CVec u = gaussian(*ops, 0.8, Vec::Constant(3, 0.4));
    const auto m = make_morawetz_3d(0.5, 1.0);
    {
        const auto spec = azimuthal_point(0.4, 0.0);
        const MagneticOperator H(ops, spec);
        const VirialAssembler va(H, m, &spec);
        EXPECT_NEAR(va.quadrature_terms(u).btau, 0.0, 1e-12);
    }
    {
        const auto spec = azimuthal_point(0.4, 0.8);
        const MagneticOperator H(ops, spec);
        const VirialAssembler va(H, m, &spec);
        EXPECT_GT(std::abs(va.quadrature_terms(u).btau), 1e-4);
    }
}

TEST(Virial, TraceResidualSmallForExactFlow) {
    auto ops = make_ops(grid(3, 8, 3));
    const auto spec = vortex({3, 0.7, 1.0, 0.0, 0.3, 1.0});
    const MagneticOperator H(ops, spec);
    const CVec f = gaussian(*ops, 1.0, Vec::Zero(3));
    const auto tr = evolve_schrodinger(f, H, quiet(0.01, 12, Integrator::exact_dense));
    TraceOptions o;
    o.quadrature = false;
    const auto vt = virial_trace_schrodinger(tr, H, make_morawetz_3d(0.5, 1.0), &spec, o);
    ASSERT_FALSE(vt.rhs.empty());
    EXPECT_LE(vt.max_abs_residual(), 1e-6 * vt.max_abs_rhs());
    EXPECT_LE(vt.max_abs_residual(), vt.max_abs_residual3());
}

TEST(Virial, WeakLaplacianPairingMatchesClassical) {
    auto ops = make_ops(grid(3, 24, 4));
    const MagneticOperator H(ops, vortex({3, 0.5, 1.0, 0.0, 0.0, 1.0}));
    Vec psi(ops->size()), lap(ops->size());
    for (long long i = 0; i < ops->size(); ++i) {
        const double r2 = ops->point(i).squaredNorm();
        psi[i] = std::exp(-r2);
        lap[i] = (4 * r2 - 6) * std::exp(-r2);
    }
    const CVec u = gaussian(*ops, 1.0, Vec::Constant(3, 0.5));
    double classical = 0;
    for (long long i = 0; i < ops->size(); ++i) classical += std::norm(u[i]) * lap[i];
    classical *= ops->grid().cell();
    EXPECT_NEAR(weak_laplacian_pairing(H, psi, u), classical, 1e-8 * std::abs(classical));
}

// ---- smoothing ------------------------------------------------------------------------------

TEST(Smoothing, ZeroTrajectoryIsDegenerate) {
    auto ops = make_ops(grid(3, 8, 3));
    auto H = std::make_shared<const MagneticOperator>(ops, free_potential(3));
    Trajectory tr;
    tr.grid = ops->grid();
    tr.times = {0.0, 0.1};
    tr.u = {CVec::Zero(ops->size()), CVec::Zero(ops->size())};
    EXPECT_THROW(smoothing_report(tr, H, NormalizerTag::distorted_half), DegenerateError);
}

TEST(Smoothing, InvariantUnderAmplitudeScaling) {
    auto ops = make_ops(grid(3, 16, 4));
    const auto spec = vortex({3, 0.5, 1.0, 0.0, 0.0, 1.0});
    auto H = std::make_shared<const MagneticOperator>(ops, spec);
    const CVec f = gaussian(*ops, 0.9, Vec::Zero(3));
    auto cfg = quiet(0.01, 10, Integrator::crank_nicolson);
    const auto a = evolve_schrodinger(f, *H, cfg);
    const auto b = evolve_schrodinger(CVec(3.0 * f), *H, cfg);
    NormEngineOptions no;
    no.prefer_dense = false;
    no.dense_cap = 0;
    const auto ra = smoothing_report(a, H, NormalizerTag::distorted_half, {}, no);
    const auto rb = smoothing_report(b, H, NormalizerTag::distorted_half, {}, no);
    EXPECT_NEAR(ra.sup_local_energy, rb.sup_local_energy, 1e-8 * ra.sup_local_energy);
    EXPECT_NEAR(ra.K1, rb.K1, 1e-8 * ra.K1);
    EXPECT_NEAR(ra.K2, rb.K2, 1e-8 * ra.K2);
    EXPECT_GT(ra.sup_local_energy, 0.0);
}

TEST(Smoothing, DyadicRadii) {
    const auto r = dyadic_radii(grid(3, 40, 6));
    ASSERT_EQ(r.size(), 3u);  // 3, 1.5, 0.75 with h = 0.3
    EXPECT_DOUBLE_EQ(r[0], 3.0);
    EXPECT_DOUBLE_EQ(r.back(), 0.75);
}

TEST(Smoothing, InterpolationRefusesUnboundedGradient) {
    auto ops = make_ops(grid(3, 8, 3));
    const MagneticOperator H(ops, free_potential(3));
    Trajectory tr;
    tr.grid = ops->grid();
    tr.times = {0.0};
    tr.u = {gaussian(*ops, 1.0, Vec::Zero(3))};
    EXPECT_THROW(interpolation_boundedness(tr, H, make_variance(3), 1.0), ArgumentError);
    EXPECT_NO_THROW(interpolation_boundedness(tr, H, make_morawetz_3d(0.5, 1.0), 1.0));
}

// ---- Hardy ----------------------------------------------------------------------------------

TEST(Hardy, Constants) {
    EXPECT_DOUBLE_EQ(hardy_constant(3), 4.0);
    EXPECT_DOUBLE_EQ(hardy_constant(4), 1.0);
    EXPECT_DOUBLE_EQ(hardy_constant(5), 4.0 / 9.0);
    EXPECT_THROW(hardy_constant(2), ArgumentError);
}

TEST(Hardy, RatioBelowConstantAndMagneticImprovesIt) {
    auto ops = make_ops(grid(3, 24, 4));
    const MagneticOperator H0(ops, free_potential(3));
    const MagneticOperator H1(ops, vortex({3, 1.0, 1.0, 0.0, 0.0, 1.0}));
    std::mt19937_64 rng(31);
    std::normal_distribution<double> N;
    for (int k = 0; k < 10; ++k) {
        Vec c(3);
        for (int i = 0; i < 3; ++i) c[i] = 0.4 * N(rng);
        const CVec f = gaussian(*ops, 0.7 + 0.1 * k, Vec::Zero(3), c);
        const double r0 = hardy_ratio(f, H0), r1 = hardy_ratio(f, H1);
        EXPECT_LT(r0, 4.0);
        EXPECT_LE(r1, r0 * (1 + 1e-12));
    }
}

TEST(Hardy, DegenerateInputs) {
    auto ops = make_ops(grid(3, 8, 3));
    const MagneticOperator H(ops, free_potential(3));
    EXPECT_THROW(hardy_ratio(CVec::Zero(ops->size()), H), DegenerateError);
}

// ---- Strichartz -----------------------------------------------------------------------------

TEST(Strichartz, Admissibility) {
    const auto e = [](const char* s) { return Exponent::parse(s); };
    const auto a44 = wave_admissible(e("4"), e("4"), 3);
    EXPECT_TRUE(a44.admissible);
    EXPECT_FALSE(a44.endpoint);
    EXPECT_EQ(a44.sigma, Rational(1, 2));
    const auto ainf2 = wave_admissible(e("inf"), e("2"), 3);
    EXPECT_TRUE(ainf2.admissible);
    EXPECT_EQ(ainf2.sigma, Rational(1));
    EXPECT_EQ(wave_admissible(e("2"), e("inf"), 3).violated, "q != inf");
    EXPECT_EQ(wave_admissible(e("4"), e("3"), 3).violated, "2/p + (n-1)/q = (n-1)/2");
    EXPECT_EQ(wave_admissible(e("3/2"), e("4"), 3).violated, "2 <= p <= inf");
    // n = 5 endpoint (2, 4)
    const auto end5 = wave_admissible(e("2"), e("4"), 5);
    EXPECT_TRUE(end5.admissible);
    EXPECT_TRUE(end5.endpoint);
    EXPECT_EQ(wave_admissible(e("inf"), e("1"), 5).violated, "q >= 2");
    EXPECT_THROW(Exponent::parse("x"), ArgumentError);
    EXPECT_EQ(Exponent::parse("7/2").str(), "7/2");
    EXPECT_TRUE(Exponent::parse("inf").is_infinite());
}

TEST(Strichartz, RefusesBadCouples) {
    auto ops = make_ops(grid(5, 4, 2));
    Trajectory tr;
    tr.grid = ops->grid();
    tr.times = {0.0};
    tr.u = {CVec::Ones(ops->size())};
    try {
        strichartz_norm(tr, *ops, Exponent::parse("4"), Exponent::parse("3"), false);
        FAIL() << "expected a refusal";
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("violates"), std::string::npos);
    }
    EXPECT_THROW(strichartz_norm(tr, *ops, Exponent::parse("2"), Exponent::parse("4"), false), ArgumentError);
    EXPECT_NO_THROW(strichartz_norm(tr, *ops, Exponent::parse("2"), Exponent::parse("4"), true));
}

TEST(Strichartz, EnergyCoupleOfPlaneWave) {
    auto ops = make_ops(grid(3, 8, 2));
    CVec u(ops->size());
    const double k0 = kPi / 2;
    for (long long i = 0; i < ops->size(); ++i) u[i] = std::polar(1.0, k0 * ops->point(i)[1]);
    Trajectory tr;
    tr.grid = ops->grid();
    tr.times = {0.0, 0.5};
    tr.u = {u, 2.0 * u};
    const auto rep = strichartz_norm(tr, *ops, Exponent::parse("inf"), Exponent::parse("2"));
    EXPECT_NEAR(rep.mixed_norm, 2 * k0 * std::sqrt(ops->norm2(u)), 1e-10 * rep.mixed_norm);
}

// ---- dyadic sums ----------------------------------------------------------------------------

TEST(Dyadic, SingleAnnulus) {
    auto ops = make_ops(grid(3, 16, 4));
    CVec F = CVec::Zero(ops->size());
    long long count = 0;
    for (long long i = 0; i < ops->size(); ++i)
        if (ops->radius()[i] >= 1.0 && ops->radius()[i] < 2.0) F[i] = 1.0, ++count;
    const auto d = dyadic_source_sum({F, F}, {0.0, 1.0}, *ops);
    const double norm = std::sqrt(count * ops->grid().cell());
    EXPECT_NEAR(d.total, norm, 1e-12 * norm);  // j = 0, weight 2^0
    for (std::size_t i = 0; i < d.j.size(); ++i)
        EXPECT_EQ(d.contributions[i] > 0, d.j[i] == 0);
}

TEST(Dyadic, WeightsAndAdditivityOverAnnuli) {
    auto ops = make_ops(grid(3, 16, 4));
    CVec F1 = CVec::Zero(ops->size()), F2 = CVec::Zero(ops->size());
    for (long long i = 0; i < ops->size(); ++i) {
        const double r = ops->radius()[i];
        if (r >= 0.5 && r < 1.0) F1[i] = 2.0;
        if (r >= 2.0 && r < 4.0) F2[i] = cplx(0, 1);
    }
    const std::vector<double> t = {0.0, 0.5, 1.0};
    const auto a = dyadic_source_sum({F1, F1, F1}, t, *ops);
    const auto b = dyadic_source_sum({F2, F2, F2}, t, *ops);
    const auto ab = dyadic_source_sum({F1 + F2, F1 + F2, F1 + F2}, t, *ops);
    EXPECT_NEAR(ab.total, a.total + b.total, 1e-12 * ab.total);
    // j = 1 contribution is sqrt(2) times its norm
    for (std::size_t i = 0; i < b.j.size(); ++i)
        if (b.j[i] == 1) EXPECT_NEAR(b.contributions[i], std::sqrt(2.0) * b.norms[i], 1e-12);
    EXPECT_THROW(dyadic_source_sum({F1}, {0.0, 1.0}, *ops), ArgumentError);
}
