#include "magvir/virial.hpp"

#include <cmath>
#include <limits>

#include "magvir/errors.hpp"
#include "magvir/quadrature.hpp"

namespace magvir {

namespace {

const cplx I1(0, 1);

CVec mul(const Vec& a, const CVec& v) { return a.cast<cplx>().cwiseProduct(v); }

double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

double sphere_integral_abs2(const SpectralOps& ops, const Vec& u2, double R, const SphereQuadrature& sq) {
    const int n = ops.n();
    double s = 0;
    if (n == 3) {
        const SphereRule rule = sphere_rule_3d(sq.n_polar, sq.n_azimuth);
        for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
            const Vec x = R * Vec(rule.dirs[i]);
            s += rule.w[i] * interpolate(ops, u2, x);
        }
        return s * R * R;
    }
    const int count = n == 2 ? 4 * sq.n_azimuth : sq.qmc_points;
    const auto dirs = sphere_directions(n, count);
    for (const auto& d : dirs) s += interpolate(ops, u2, Vec(R * d));
    return sphere_area(n) * std::pow(R, n - 1) * s / dirs.size();
}

}  // namespace

double interpolate(const SpectralOps& ops, const Vec& f, const Vec& x) {
    const GridSpec& g = ops.grid();
    const int n = g.n;
    const double h = g.h();
    std::vector<long long> i0(n);
    std::vector<double> t(n);
    for (int a = 0; a < n; ++a) {
        const double s = (x[a] + g.L) / h - g.offset;
        const double fl = std::floor(s);
        i0[a] = static_cast<long long>(fl);
        t[a] = s - fl;
    }
    double out = 0;
    for (int corner = 0; corner < (1 << n); ++corner) {
        double w = 1;
        long long idx = 0;
        for (int a = 0; a < n; ++a) {
            const int bit = (corner >> a) & 1;
            w *= bit ? t[a] : 1 - t[a];
            long long ia = (i0[a] + bit) % g.N;
            if (ia < 0) ia += g.N;
            idx = idx * g.N + ia;
        }
        if (w != 0) out += w * f[idx];
    }
    return out;
}

VirialAssembler::VirialAssembler(const MagneticOperator& H, const RadialMultiplier& m,
                                 const PotentialSpec* spec, const PlateauWeight* psi)
    : H_(H), m_(m), spec_(spec) {
    const SpectralOps& ops = H.ops();
    if (m.n != ops.n())
        throw ArgumentError("multiplier dimension " + std::to_string(m.n) + " does not match the grid");
    const long long S = ops.size();
    const int n = ops.n();
    phi_.resize(S);
    psi_ = Vec::Zero(S);
    lap_phi_ = Vec::Zero(S);
    grad_phi_.assign(n, Vec::Zero(S));
    for (long long i = 0; i < S; ++i) {
        const Vec x = ops.point(i);
        const double r = x.norm();
        phi_[i] = m.phi(r);
        if (r > 0) {
            const double d = m.dphi(r);
            for (int j = 0; j < n; ++j) grad_phi_[j][i] = d * x[j] / r;
            lap_phi_[i] = m.lap(r);
        }
        if (psi) psi_[i] = (*psi)(x);
    }
    has_psi_ = psi != nullptr;
}

CVec VirialAssembler::C(int j, const CVec& v) const {
    const SpectralOps& ops = H_.ops();
    return ops.derivative(mul(phi_, v), j) - mul(phi_, ops.derivative(v, j));
}

CVec VirialAssembler::G(int k, int j, const CVec& v) const {
    return H_.cov_derivative(C(j, v), k) - C(j, H_.cov_derivative(v, k));
}

CVec VirialAssembler::F(int k, int j, const CVec& v) const {
    if (H_.zero_A() || k == j) return CVec::Zero(v.size());
    const SpectralOps& ops = H_.ops();
    const auto& A = H_.A();
    return ops.derivative(mul(A[j], v), k) - mul(A[j], ops.derivative(v, k)) - ops.derivative(mul(A[k], v), j) +
           mul(A[k], ops.derivative(v, j));
}

CVec VirialAssembler::T(const CVec& u) const {
    CVec out = CVec::Zero(u.size());
    for (int j = 0; j < H_.n(); ++j)
        out += H_.cov_derivative(C(j, u), j) + C(j, H_.cov_derivative(u, j));
    return out;
}

CVec VirialAssembler::T_direct(const CVec& u) const {
    CVec out = CVec::Zero(u.size());
    for (int j = 0; j < H_.n(); ++j)
        out += mul(grad_phi_[j], H_.cov_derivative(u, j)) + H_.cov_derivative(mul(grad_phi_[j], u), j);
    return out;
}

CommutatorTerms VirialAssembler::commutator_terms(const CVec& u) const {
    const SpectralOps& ops = H_.ops();
    const int n = H_.n();
    CommutatorTerms t;
    const auto w = H_.magnetic_gradient(u);
    std::vector<CVec> Cu(n);
    for (int j = 0; j < n; ++j) Cu[j] = C(j, u);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            const CVec Gw = G(k, j, w[j]);
            t.hessian += 4 * ops.dot_re(w[k], Gw);
            const CVec Gu = H_.cov_derivative(C(j, u), k) - C(j, w[k]);
            t.bilap += 2 * ops.dot_re(w[k], H_.cov_derivative(Gu, j) - Gw);
            if (!H_.zero_A() && k != j) {
                const CVec b = F(k, j, Cu[j]) + C(j, F(k, j, u));
                t.btau += 2 * ops.dot_re(w[k], -I1 * b);
            }
        }
    }
    CVec Tu = CVec::Zero(u.size());
    for (int j = 0; j < n; ++j) Tu += H_.cov_derivative(Cu[j], j) + C(j, w[j]);
    if (!H_.zero_V()) t.vr = 2 * ops.dot_re(mul(H_.V(), u), Tu);
    t.total = 2 * ops.dot_re(H_.apply(u), Tu);
    return t;
}

QuadratureTerms VirialAssembler::quadrature_terms(const CVec& u, const SphereQuadrature& sq) const {
    const SpectralOps& ops = H_.ops();
    const int n = H_.n();
    const long long S = ops.size();
    const double cell = ops.grid().cell();
    const auto w = H_.magnetic_gradient(u);
    const Vec u2 = u.cwiseAbs2();
    const bool with_B = spec_ && !H_.zero_A() && !spec_->zero_A;
    const bool with_V = spec_ && !H_.zero_V() && !spec_->zero_V;
    QuadratureTerms q;
    CVec wx(n);
    for (long long i = 0; i < S; ++i) {
        const Vec x = ops.point(i);
        const double r = x.norm();
        if (r == 0) continue;  // measure zero
        for (int k = 0; k < n; ++k) wx[k] = w[k][i];
        q.hessian += 4 * cell * hessian_form(m_, x, wx);
        if (m_.bilap_regular) q.bilap_regular -= cell * u2[i] * m_.bilap_regular(r);
        if (with_V) q.vr -= 2 * cell * m_.dphi(r) * spec_->V_r(x) * u2[i];
        if (with_B) {
            Vec bt;
            try {
                bt = eval_B(*spec_, x).B_tau;
            } catch (const DomainError&) {
                continue;
            }
            cplx s = 0;
            for (int k = 0; k < n; ++k) s += bt[k] * std::conj(wx[k]);
            q.btau += 4 * cell * m_.dphi(r) * (u[i] * s).imag();
        }
    }
    if (m_.point_mass != 0) q.bilap_point = -m_.point_mass * interpolate(ops, u2, Vec::Zero(n));
    for (const auto& [R, wt] : m_.surface_masses) q.bilap_surface -= wt * sphere_integral_abs2(ops, u2, R, sq);
    return q;
}

double VirialAssembler::theta_s(const CVec& u) const { return H_.ops().dot_re(u, mul(phi_, u)); }

double VirialAssembler::theta_s_dot(const CVec& u) const { return H_.ops().inner(u, T(u)).imag(); }

double VirialAssembler::theta_w(const CVec& u, const CVec& ut) const {
    const SpectralOps& ops = H_.ops();
    double th = ops.dot_re(ut, mul(phi_, ut)) + ops.dot_re(H_.apply(u), mul(phi_, u));
    if (has_psi_) th += ops.dot_re(u, mul(psi_, u));
    return th;
}

double VirialAssembler::theta_w_dot(const CVec& u, const CVec& ut) const {
    const SpectralOps& ops = H_.ops();
    double d = -ops.dot_re(ut, T(u));
    if (has_psi_) d += 2 * ops.dot_re(ut, mul(psi_, u));
    return d;
}

double weak_laplacian_pairing(const MagneticOperator& H, const Vec& psi, const CVec& u) {
    const SpectralOps& ops = H.ops();
    double s = 0;
    for (int k = 0; k < H.n(); ++k) {
        const CVec comm = ops.derivative(mul(psi, u), k) - mul(psi, ops.derivative(u, k));
        s -= 2 * ops.dot_re(H.cov_derivative(u, k), comm);
    }
    return s;
}

VirialAssembler::PsiTerms VirialAssembler::psi_terms(const CVec& u, const CVec& ut) const {
    PsiTerms p;
    if (!has_psi_) return p;
    const SpectralOps& ops = H_.ops();
    p.ut2 = 2 * ops.dot_re(ut, mul(psi_, ut));
    for (const auto& wk : H_.magnetic_gradient(u)) p.grad2 -= 2 * ops.dot_re(wk, mul(psi_, wk));
    p.lap = weak_laplacian_pairing(H_, psi_, u);
    if (!H_.zero_V()) p.vpsi = -2 * ops.dot_re(u, mul(H_.V().cwiseProduct(psi_), u));
    return p;
}

double VirialTrace::max_abs_rhs() const {
    double m = 0;
    for (double v : rhs) m = std::max(m, std::abs(v));
    return m;
}

double VirialTrace::max_abs_residual() const {
    double m = 0;
    for (double v : residual) m = std::max(m, std::abs(v));
    return m;
}

double VirialTrace::max_abs_residual3() const {
    double m = 0;
    for (double v : residual3) m = std::max(m, std::abs(v));
    return m;
}

namespace {

double uniform_step(const Trajectory& tr, bool require) {
    if (tr.times.size() < 5) throw ArgumentError("virial trace needs at least 5 stored samples");
    const double dt = tr.times[1] - tr.times[0];
    if (require)
        for (std::size_t i = 1; i < tr.times.size(); ++i)
            if (std::abs(tr.times[i] - tr.times[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
                throw ArgumentError("virial trace needs uniformly spaced samples");
    return dt;
}

template <class ThetaFn, class TermFn>
VirialTrace build_trace(const Trajectory& tr, bool wave, const TraceOptions& opt, ThetaFn theta_of,
                        TermFn terms_of) {
    VirialTrace vt;
    vt.wave = wave;
    vt.dt = uniform_step(tr, opt.require_uniform);
    const int K = static_cast<int>(tr.times.size());
    std::vector<double> th(K);
    for (int i = 0; i < K; ++i) th[i] = theta_of(i);
    const double dt2 = vt.dt * vt.dt;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const int stride = std::max(1, opt.stride);
    for (int m = 2; m + 2 < K; m += stride) {
        const double d1 = (th[m + 1] - 2 * th[m] + th[m - 1]) / dt2;
        const double d2 = (th[m + 2] - 2 * th[m] + th[m - 2]) / (4 * dt2);
        const double d5 = (4 * d1 - d2) / 3;
        double dR = nan;
        if (m - 4 >= 0 && m + 4 < K) {
            const double e1 = (th[m + 4] - 2 * th[m] + th[m - 4]) / (16 * dt2);
            const double d5b = (4 * d2 - e1) / 3;
            dR = (16 * d5 - d5b) / 15;
        }
        vt.times.push_back(tr.times[m]);
        vt.theta.push_back(th[m]);
        vt.dd3.push_back(d1);
        vt.dd5.push_back(d5);
        vt.ddR.push_back(dR);
        terms_of(m, vt);
        const double rhs = vt.rhs.back();
        vt.residual.push_back((std::isfinite(dR) ? dR : d5) - rhs);
        vt.residual3.push_back(d1 - rhs);
    }
    return vt;
}

void push_named(VirialTrace& vt, std::vector<std::string>& names, std::vector<std::vector<double>>& store,
                const std::vector<std::pair<std::string, double>>& items) {
    if (names.empty()) {
        for (const auto& it : items) names.push_back(it.first);
        store.assign(items.size(), {});
    }
    for (std::size_t i = 0; i < items.size(); ++i) store[i].push_back(items[i].second);
    (void)vt;
}

}  // namespace

VirialTrace virial_trace_schrodinger(const Trajectory& tr, const MagneticOperator& H, const RadialMultiplier& m,
                                     const PotentialSpec* spec, const TraceOptions& opt) {
    if (tr.wave) throw ArgumentError("virial_trace_schrodinger: trajectory is a wave trajectory");
    const VirialAssembler va(H, m, spec);
    return build_trace(
        tr, false, opt, [&](int i) { return va.theta_s(tr.u[i]); },
        [&](int i, VirialTrace& vt) {
            const CVec& u = tr.u[i];
            vt.theta_dot.push_back(va.theta_s_dot(u));
            const CommutatorTerms c = va.commutator_terms(u);
            push_named(vt, vt.term_names, vt.terms,
                       {{"hessian", c.hessian}, {"bilap", c.bilap}, {"vr", c.vr}, {"btau", c.btau}});
            vt.rhs.push_back(c.sum());
            if (opt.quadrature) {
                const QuadratureTerms q = va.quadrature_terms(u, opt.sphere);
                push_named(vt, vt.quad_names, vt.quad_terms,
                           {{"hessian", q.hessian},
                            {"bilap", q.bilap_regular + q.bilap_point + q.bilap_surface},
                            {"vr", q.vr},
                            {"btau", q.btau}});
                vt.rhs_quad.push_back(q.sum());
            }
        });
}

VirialTrace virial_trace_wave(const Trajectory& tr, const MagneticOperator& H, const RadialMultiplier& m,
                              const PlateauWeight& psi, const PotentialSpec* spec, const TraceOptions& opt) {
    if (!tr.wave) throw ArgumentError("virial_trace_wave: trajectory is a Schrodinger trajectory");
    const VirialAssembler va(H, m, spec, &psi);
    return build_trace(
        tr, true, opt, [&](int i) { return va.theta_w(tr.u[i], tr.ut[i]); },
        [&](int i, VirialTrace& vt) {
            const CVec& u = tr.u[i];
            const CVec& ut = tr.ut[i];
            vt.theta_dot.push_back(va.theta_w_dot(u, ut));
            const CommutatorTerms c = va.commutator_terms(u);
            const auto p = va.psi_terms(u, ut);
            push_named(vt, vt.term_names, vt.terms,
                       {{"hessian", 0.5 * c.hessian},
                        {"bilap", 0.5 * c.bilap},
                        {"vr", 0.5 * c.vr},
                        {"btau", 0.5 * c.btau},
                        {"psi_ut", p.ut2},
                        {"psi_grad", p.grad2},
                        {"psi_lap", p.lap},
                        {"psi_v", p.vpsi}});
            vt.rhs.push_back(0.5 * c.sum() + p.sum());
            if (opt.quadrature) {
                const QuadratureTerms q = va.quadrature_terms(u, opt.sphere);
                push_named(vt, vt.quad_names, vt.quad_terms,
                           {{"hessian", 0.5 * q.hessian},
                            {"bilap", 0.5 * (q.bilap_regular + q.bilap_point + q.bilap_surface)},
                            {"vr", 0.5 * q.vr},
                            {"btau", 0.5 * q.btau},
                            {"psi_ut", p.ut2},
                            {"psi_grad", p.grad2},
                            {"psi_lap", p.lap},
                            {"psi_v", p.vpsi}});
                vt.rhs_quad.push_back(0.5 * q.sum() + p.sum());
            }
        });
}

}  // namespace magvir
