#include "magvir/oracle.hpp"

#include <cmath>
#include <limits>

#include "magvir/errors.hpp"
#include "magvir/virial.hpp"

namespace magvir {

namespace {

template <class Apply>
CMat dense_from(long long S, Apply&& apply) {
    CMat M(S, S);
    CVec e = CVec::Zero(S);
    for (long long j = 0; j < S; ++j) {
        e[j] = 1;
        M.col(j) = apply(e);
        e[j] = 0;
    }
    return M;
}

void check_cap(const SpectralOps& ops, long long cap) {
    if (ops.size() > cap)
        throw ArgumentError("dense oracle: " + std::to_string(ops.size()) + " unknowns exceed the memory cap " +
                            std::to_string(cap));
    if (ops.grid().scheme != Scheme::spectral)
        throw ArgumentError("dense oracle: only the spectral scheme has exact summation by parts");
}

struct SecondDifferences {
    double d3, d5, dR;
};

SecondDifferences second_differences(const std::vector<double>& th, int m, double dt) {
    const int K = static_cast<int>(th.size());
    const double dt2 = dt * dt;
    SecondDifferences s;
    s.d3 = (th[m + 1] - 2 * th[m] + th[m - 1]) / dt2;
    const double d2 = (th[m + 2] - 2 * th[m] + th[m - 2]) / (4 * dt2);
    s.d5 = (4 * s.d3 - d2) / 3;
    s.dR = std::numeric_limits<double>::quiet_NaN();
    if (m - 4 >= 0 && m + 4 < K) {
        const double e1 = (th[m + 4] - 2 * th[m] + th[m - 4]) / (16 * dt2);
        s.dR = (16 * s.d5 - (4 * d2 - e1) / 3) / 15;
    }
    return s;
}

void finish(IdentityReport& r) {
    for (std::size_t i = 0; i < r.rhs.size(); ++i) {
        r.max_rhs = std::max(r.max_rhs, std::abs(r.rhs[i]));
        r.max_residual = std::max(r.max_residual, std::abs(r.residual[i]));
        r.max_residual3 = std::max(r.max_residual3, std::abs(r.residual3[i]));
    }
}

}  // namespace

DenseOperator DenseOperator::make(std::string label, CMat M, bool hermitian, bool antihermitian, double tol) {
    DenseOperator d{std::move(label), std::move(M), hermitian, antihermitian};
    const double defect = d.symmetry_defect();
    if (defect > tol)
        throw SpectralError("dense operator '" + d.label + "': flagged symmetry violated, relative defect " +
                            std::to_string(defect));
    return d;
}

double DenseOperator::symmetry_defect() const {
    const double nrm = M.norm();
    if (nrm == 0) return 0;
    if (hermitian) return (M - M.adjoint()).norm() / nrm;
    if (antihermitian) return (M + M.adjoint()).norm() / nrm;
    return 0;
}

DenseOperator dense_hamiltonian(const MagneticOperator& H, long long cap) {
    check_cap(H.ops(), cap);
    return DenseOperator::make("H", H.dense(), true, false);
}

DenseOperator dense_multiplication(const Vec& f, const std::string& label) {
    CMat M = CMat::Zero(f.size(), f.size());
    M.diagonal() = f.cast<cplx>();
    return DenseOperator::make(label, std::move(M), true, false);
}

DenseOperator build_T(const MagneticOperator& H, const RadialMultiplier& m, TConstruction c, long long cap) {
    check_cap(H.ops(), cap);
    const VirialAssembler va(H, m);
    const long long S = H.size();
    if (c == TConstruction::commutator) {
        const CMat Hd = H.dense();
        const CVec phi = va.phi().cast<cplx>();
        // T = -[H, phi] = phi H - H phi
        CMat T = phi.asDiagonal() * Hd - Hd * phi.asDiagonal();
        return DenseOperator::make("T", std::move(T), false, true);
    }
    CMat T = dense_from(S, [&](const CVec& e) { return va.T_direct(e); });
    return DenseOperator::make("T-direct", std::move(T), false, true);
}

DenseOperator build_T(const RadialMultiplier& m, const PotentialSpec& spec, const GridSpec& g, TConstruction c,
                      long long cap) {
    const auto ops = make_ops(g);
    check_cap(*ops, cap);
    HamiltonianOptions o;
    o.check_gauge = false;
    const MagneticOperator H(ops, spec, o);
    return build_T(H, m, c, cap);
}

DenseOperator commutator(const DenseOperator& H, const DenseOperator& T) {
    return DenseOperator::make("[H,T]", H.M * T.M - T.M * H.M, true, false, 1e-9);
}

IdentityReport commutator_identity_check(const CVec& f, const MagneticOperator& H, const RadialMultiplier& m,
                                         double dt, int steps) {
    if (steps < 4) throw ArgumentError("commutator_identity_check: at least 4 steps");
    const SpectralOps& ops = H.ops();
    const DenseOperator Hd = dense_hamiltonian(H);
    const DenseOperator T = build_T(H, m);
    const DenseOperator HT = commutator(Hd, T);
    const auto spec = dense_spectrum(H, kOracleCap);
    const VirialAssembler va(H, m);
    const CVec c0 = spec->evecs.adjoint() * f;
    IdentityReport r;
    r.dt = dt;
    std::vector<double> th(steps + 1), comm(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        const double t = k * dt;
        CVec c = c0;
        for (long long i = 0; i < c.size(); ++i) c[i] *= std::exp(cplx(0, -spec->evals[i] * t));
        const CVec u = spec->evecs * c;
        th[k] = ops.dot_re(u, va.phi().cast<cplx>().cwiseProduct(u));
        const cplx q = ops.inner(u, HT.M * u);
        comm[k] = q.real();
        r.max_imag = std::max(r.max_imag, std::abs(q.imag()) / ops.norm2(u));
    }
    for (int k = 2; k + 2 <= steps; ++k) {
        const auto s = second_differences(th, k, dt);
        r.times.push_back(k * dt);
        r.theta.push_back(th[k]);
        r.dd3.push_back(s.d3);
        r.dd5.push_back(s.d5);
        r.ddR.push_back(s.dR);
        r.rhs.push_back(comm[k]);
        r.residual.push_back((std::isfinite(s.dR) ? s.dR : s.d5) - comm[k]);
        r.residual3.push_back(s.d3 - comm[k]);
    }
    finish(r);
    return r;
}

IdentityReport commutator_identity_check(const Field& f, const RadialMultiplier& m, const PotentialSpec& spec,
                                         double dt, int steps) {
    HamiltonianOptions o;
    o.check_gauge = false;
    const MagneticOperator H(make_ops(f.grid), spec, o);
    return commutator_identity_check(f.values, H, m, dt, steps);
}

IdentityReport wave_identity_check(const CVec& f, const CVec& g, const MagneticOperator& H, const RadialMultiplier& m,
                                   const PlateauWeight& psi, double dt, int steps) {
    if (steps < 4) throw ArgumentError("wave_identity_check: at least 4 steps");
    const SpectralOps& ops = H.ops();
    const DenseOperator Hd = dense_hamiltonian(H);
    const DenseOperator T = build_T(H, m);
    const DenseOperator HT = commutator(Hd, T);
    const auto spec = dense_spectrum(H, kOracleCap);
    const VirialAssembler va(H, m, nullptr, &psi);
    const CVec phi = va.phi().cast<cplx>();
    const CVec ps = va.psi().cast<cplx>();
    const CVec cf = spec->evecs.adjoint() * f;
    const CVec cg = spec->evecs.adjoint() * g;
    for (long long i = 0; i < spec->evals.size(); ++i)
        if (spec->evals[i] < -1e-9 * std::max(1.0, spec->evals.cwiseAbs().maxCoeff()))
            throw SpectralError("wave_identity_check: H has a negative eigenvalue");
    IdentityReport r;
    r.dt = dt;
    std::vector<double> th(steps + 1), rhs(steps + 1), comm(steps + 1), flux(steps + 1);
    double max_comm = 0;
    for (int k = 0; k <= steps; ++k) {
        const double t = k * dt;
        CVec cu(cf.size()), cut(cf.size());
        for (long long i = 0; i < cf.size(); ++i) {
            const double w = std::sqrt(std::max(0.0, spec->evals[i]));
            const double cs = std::cos(w * t);
            const double sn = w > 0 ? std::sin(w * t) / w : t;
            cu[i] = cs * cf[i] + sn * cg[i];
            cut[i] = -w * w * sn * cf[i] + cs * cg[i];
        }
        const CVec u = spec->evecs * cu;
        const CVec ut = spec->evecs * cut;
        const CVec Hu = Hd.M * u;
        th[k] = ops.dot_re(ut, phi.cwiseProduct(ut)) + ops.dot_re(Hu, phi.cwiseProduct(u)) +
                ops.dot_re(u, ps.cwiseProduct(u));
        const cplx q = ops.inner(u, HT.M * u);
        comm[k] = q.real();
        max_comm = std::max(max_comm, std::abs(comm[k]));
        r.max_imag = std::max(r.max_imag, std::abs(q.imag()) / std::max(ops.norm2(u), 1e-300));
        rhs[k] = 0.5 * comm[k] + 2 * ops.dot_re(ut, ps.cwiseProduct(ut)) - 2 * ops.dot_re(Hu, ps.cwiseProduct(u));
        const CVec Tut = T.M * ut;
        const double den = std::sqrt(ops.norm2(ut) * ops.norm2(Tut));
        if (den > 0) r.max_re_ut_T_ut = std::max(r.max_re_ut_T_ut, std::abs(ops.dot_re(ut, Tut)) / den);
        flux[k] = ops.dot_re(ut, T.M * u);
    }
    for (int k = 2; k + 2 <= steps; ++k) {
        const auto s = second_differences(th, k, dt);
        r.times.push_back(k * dt);
        r.theta.push_back(th[k]);
        r.dd3.push_back(s.d3);
        r.dd5.push_back(s.d5);
        r.ddR.push_back(s.dR);
        r.rhs.push_back(rhs[k]);
        r.residual.push_back((std::isfinite(s.dR) ? s.dR : s.d5) - rhs[k]);
        r.residual3.push_back(s.d3 - rhs[k]);
        // 4th-order central first derivative of Re<u_t, T u>
        const double d1 = (flux[k - 2] - 8 * flux[k - 1] + 8 * flux[k + 1] - flux[k + 2]) / (12 * dt);
        if (max_comm > 0)
            r.max_intermediate_residual =
                std::max(r.max_intermediate_residual, std::abs(d1 + 0.5 * comm[k]) / max_comm);
    }
    finish(r);
    return r;
}

IdentityReport wave_identity_check(const WaveState& s, const RadialMultiplier& m, const PlateauWeight& psi,
                                   const PotentialSpec& spec, double dt, int steps) {
    if (!(s.u.grid == s.ut.grid)) throw ArgumentError("wave_identity_check: u and u_t on different grids");
    HamiltonianOptions o;
    o.check_gauge = false;
    const MagneticOperator H(make_ops(s.u.grid), spec, o);
    return wave_identity_check(s.u.values, s.ut.values, H, m, psi, dt, steps);
}

double dense_laplacian_pairing(const MagneticOperator& H, const Vec& psi, const CVec& u) {
    const SpectralOps& ops = H.ops();
    check_cap(ops, kOracleCap);
    const CMat Lm = dense_from(ops.size(), [&](const CVec& e) { return ops.laplacian(e); });
    const CVec lp = Lm * psi.cast<cplx>();
    double s = 0;
    for (long long i = 0; i < ops.size(); ++i) s += std::norm(u[i]) * lp[i].real();
    return ops.grid().cell() * s;
}

}  // namespace magvir
