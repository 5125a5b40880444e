#include "magvir/propagators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>

#include "magvir/errors.hpp"

namespace magvir {

std::string to_string(Integrator i) {
    switch (i) {
        case Integrator::crank_nicolson: return "crank-nicolson";
        case Integrator::exact_dense: return "exact-dense";
        case Integrator::wave_leapfrog: return "wave-leapfrog";
        case Integrator::free_spectral: return "free-spectral";
    }
    return "?";
}

Integrator integrator_from_string(const std::string& s) {
    for (auto i : {Integrator::crank_nicolson, Integrator::exact_dense, Integrator::wave_leapfrog,
                   Integrator::free_spectral})
        if (to_string(i) == s) return i;
    throw ConfigError("unknown integrator '" + s + "'");
}

std::shared_ptr<const DenseSpectrum> dense_spectrum(const MagneticOperator& H, long long cap) {
    if (H.size() > cap)
        throw ConfigError("dense path: " + std::to_string(H.size()) + " unknowns exceed the cap " +
                          std::to_string(cap));
    Eigen::SelfAdjointEigenSolver<CMat> es(H.dense());
    if (es.info() != Eigen::Success) throw SpectralError("eigendecomposition failed");
    auto d = std::make_shared<DenseSpectrum>();
    d->evals = es.eigenvalues();
    d->evecs = es.eigenvectors();
    return d;
}

namespace {

std::string num_str(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void check_cfg(const EvolutionConfig& c) {
    if (!(c.dt > 0)) throw ConfigError("evolution: dt must be positive");
    if (!(c.solve_tol > 0)) throw ConfigError("evolution: solver tolerance must be positive");
    if (c.steps < 0 || c.store_every < 1) throw ConfigError("evolution: bad step counts");
}

void check_datum(const SpectralOps& ops, const CVec& f, const EvolutionConfig& c) {
    if (!c.monitors) return;
    const double tail = spectral_tail(ops, f);
    if (tail > c.tail_tol)
        throw MonitorError("resolution monitor: spectral tail " + num_str(tail) + " above " + num_str(c.tail_tol));
    const double leak = leakage_fraction(ops, f);
    if (leak > c.leak_tol)
        throw MonitorError("leakage monitor: datum mass fraction " + num_str(leak) +
                           " outside the half-radius ball");
}

bool leak_breach(const SpectralOps& ops, const CVec& u, const EvolutionConfig& c, double t,
                 std::string& msg) {
    if (!c.monitors) return false;
    const double leak = leakage_fraction(ops, u);
    if (leak > c.leak_tol) {
        msg = "leakage monitor: mass fraction " + num_str(leak) + " outside |x| <= L/2 at t = " + num_str(t);
        return true;
    }
    return false;
}

}  // namespace

int solve_cn_normal(const MagneticOperator& H, double a, const CVec& b, CVec& x, double tol, int max_it) {
    auto A = [&](const CVec& v) { return CVec(v + a * a * H.apply(H.apply(v))); };
    CVec r = b - A(x);
    CVec p = r;
    double rr = r.squaredNorm();
    const double bn = b.norm();
    if (bn == 0.0) {
        x.setZero();
        return 0;
    }
    for (int it = 0; it < max_it; ++it) {
        if (std::sqrt(rr) <= tol * bn) return it;
        const CVec Ap = A(p);
        const double alpha = rr / p.dot(Ap).real();
        x += alpha * p;
        r -= alpha * Ap;
        const double rr2 = r.squaredNorm();
        p = r + (rr2 / rr) * p;
        rr = rr2;
    }
    if (std::sqrt(rr) <= tol * bn) return max_it;
    throw ConvergenceError("Crank-Nicolson solve did not converge", tol * bn, std::sqrt(rr));
}

Trajectory evolve_schrodinger(const CVec& f, const MagneticOperator& H, const EvolutionConfig& cfg,
                              std::shared_ptr<const DenseSpectrum> spec) {
    check_cfg(cfg);
    const SpectralOps& ops = H.ops();
    check_datum(ops, f, cfg);
    Trajectory tr;
    tr.grid = ops.grid();
    auto record = [&](double t, const CVec& u) {
        tr.times.push_back(t);
        tr.u.push_back(u);
        tr.log.push_back({t, ops.norm2(u), H.energy_form(u)});
    };
    CVec u = f;
    record(0.0, u);
    if (cfg.integrator == Integrator::crank_nicolson) {
        const double a = 0.5 * cfg.dt;
        for (int k = 1; k <= cfg.steps; ++k) {
            const CVec Hu = H.apply(u);
            CVec rhs = u - cplx(0, a) * Hu;
            rhs = rhs - cplx(0, a) * H.apply(rhs);
            CVec x = u - cplx(0, 2 * a) * Hu;
            const int it = solve_cn_normal(H, a, rhs, x, cfg.solve_tol, cfg.max_iterations);
            tr.max_solver_iterations = std::max(tr.max_solver_iterations, it);
            u = x;
            const double t = k * cfg.dt;
            if (k % cfg.store_every == 0) record(t, u);
            if (k % cfg.monitor_every == 0 && leak_breach(ops, u, cfg, t, tr.breach)) break;
        }
    } else if (cfg.integrator == Integrator::exact_dense) {
        if (!spec) spec = dense_spectrum(H);
        const CVec c = spec->evecs.adjoint() * f;
        for (int k = 1; k <= cfg.steps; ++k) {
            const double t = k * cfg.dt;
            if (k % cfg.store_every != 0) continue;
            CVec ct(c.size());
            for (long long i = 0; i < c.size(); ++i) ct[i] = std::exp(cplx(0, -spec->evals[i] * t)) * c[i];
            u = spec->evecs * ct;
            record(t, u);
            if (leak_breach(ops, u, cfg, t, tr.breach)) break;
        }
    } else if (cfg.integrator == Integrator::free_spectral) {
        if (!(H.zero_A() && H.zero_V())) throw ConfigError("free-spectral integrator needs A = 0 and V = 0");
        const CVec fh = ops.forward(f);
        for (int k = 1; k <= cfg.steps; ++k) {
            const double t = k * cfg.dt;
            if (k % cfg.store_every != 0) continue;
            CVec uh(fh.size());
            for (long long i = 0; i < fh.size(); ++i) uh[i] = std::exp(cplx(0, -ops.ksq()[i] * t)) * fh[i];
            u = ops.inverse(uh);
            record(t, u);
            if (leak_breach(ops, u, cfg, t, tr.breach)) break;
        }
    } else {
        throw ConfigError("evolve_schrodinger: integrator must be crank-nicolson, exact-dense or free-spectral");
    }
    return tr;
}

namespace {

// sin(w t)/w with the t-limit at w = 0.
double sinc_t(double w, double t) {
    const double x = w * t;
    if (std::abs(x) < 1e-6) return t * (1.0 - x * x / 6.0);
    return std::sin(x) / w;
}

double wave_energy(const MagneticOperator& H, const CVec& u, const CVec& ut) {
    return 0.5 * H.ops().norm2(ut) + 0.5 * H.energy_form(u);
}

}  // namespace

Trajectory evolve_wave(const CVec& f, const CVec& g, const MagneticOperator& H, const EvolutionConfig& cfg,
                       std::shared_ptr<const DenseSpectrum> spec) {
    check_cfg(cfg);
    const SpectralOps& ops = H.ops();
    check_datum(ops, f, cfg);
    Trajectory tr;
    tr.grid = ops.grid();
    tr.wave = true;
    tr.convention = "u_tt + H u = 0";
    auto record = [&](double t, const CVec& u, const CVec& ut) {
        tr.times.push_back(t);
        tr.u.push_back(u);
        tr.ut.push_back(ut);
        tr.log.push_back({t, ops.norm2(u), wave_energy(H, u, ut)});
    };
    record(0.0, f, g);
    if (cfg.integrator == Integrator::wave_leapfrog) {
        CVec u = f, v = g;
        CVec Hu = H.apply(u);
        const double dt = cfg.dt;
        for (int k = 1; k <= cfg.steps; ++k) {
            v -= 0.5 * dt * Hu;
            u += dt * v;
            Hu = H.apply(u);
            v -= 0.5 * dt * Hu;
            const double t = k * dt;
            if (k % cfg.store_every == 0) record(t, u, v);
            if (k % cfg.monitor_every == 0 && leak_breach(ops, u, cfg, t, tr.breach)) break;
        }
    } else if (cfg.integrator == Integrator::exact_dense || cfg.integrator == Integrator::free_spectral) {
        const bool dense = cfg.integrator == Integrator::exact_dense;
        if (!dense && !(H.zero_A() && H.zero_V()))
            throw ConfigError("free-spectral integrator needs A = 0 and V = 0");
        if (dense && !spec) spec = dense_spectrum(H);
        Vec lam = dense ? spec->evals : ops.ksq();
        const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
        if (lam.minCoeff() < -cfg.negative_tol * scale)
            throw SpectralError("H has a negative eigenvalue " + num_str(lam.minCoeff()) +
                                "; sqrt(H) undefined");
        const Vec w = lam.cwiseMax(0.0).cwiseSqrt();
        const CVec cf = dense ? CVec(spec->evecs.adjoint() * f) : ops.forward(f);
        const CVec cg = dense ? CVec(spec->evecs.adjoint() * g) : ops.forward(g);
        for (int k = 1; k <= cfg.steps; ++k) {
            const double t = k * cfg.dt;
            if (k % cfg.store_every != 0) continue;
            CVec a(cf.size()), b(cf.size());
            for (long long i = 0; i < cf.size(); ++i) {
                const double c = std::cos(w[i] * t), s = std::sin(w[i] * t);
                a[i] = c * cf[i] + sinc_t(w[i], t) * cg[i];
                b[i] = -w[i] * s * cf[i] + c * cg[i];
            }
            const CVec u = dense ? CVec(spec->evecs * a) : ops.inverse(a);
            const CVec ut = dense ? CVec(spec->evecs * b) : ops.inverse(b);
            record(t, u, ut);
            if (leak_breach(ops, u, cfg, t, tr.breach)) break;
        }
    } else {
        throw ConfigError("evolve_wave: integrator must be wave-leapfrog, exact-dense or free-spectral");
    }
    return tr;
}

Trajectory evolve_schrodinger(const Field& f, const PotentialSpec& spec, const EvolutionConfig& cfg) {
    HamiltonianOptions o;
    o.check_gauge = false;
    MagneticOperator H(make_ops(f.grid), spec, o);
    return evolve_schrodinger(f.values, H, cfg);
}

Trajectory evolve_wave(const WaveState& s, const PotentialSpec& spec, const EvolutionConfig& cfg) {
    if (!(s.u.grid == s.ut.grid)) throw ArgumentError("evolve_wave: u and u_t on different grids");
    HamiltonianOptions o;
    o.check_gauge = false;
    MagneticOperator H(make_ops(s.u.grid), spec, o);
    return evolve_wave(s.u.values, s.ut.values, H, cfg);
}

namespace {

// int_0^dt cos(w s) s^p ds and sin(w s) s^p ds for p = 0, 1.
struct Moments {
    double c0, s0, c1, s1;
};

Moments moments(double w, double dt) {
    const double x = w * dt;
    Moments m;
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        m.c0 = dt * (1 - x2 / 6 + x2 * x2 / 120 - x2 * x2 * x2 / 5040);
        m.s0 = dt * x * (0.5 - x2 / 24 + x2 * x2 / 720 - x2 * x2 * x2 / 40320);
        m.c1 = dt * dt * (0.5 - x2 / 8 + x2 * x2 / 144 - x2 * x2 * x2 / 5760);
        m.s1 = dt * dt * x * (1.0 / 3 - x2 / 30 + x2 * x2 / 840 - x2 * x2 * x2 / 45360);
    } else {
        const double c = std::cos(x), s = std::sin(x);
        m.c0 = s / w;
        m.s0 = (1 - c) / w;
        m.c1 = (c + x * s - 1) / (w * w);
        m.s1 = (s - x * c) / (w * w);
    }
    return m;
}

}  // namespace

Trajectory duhamel_free_wave(const CVec& f, const CVec& g, const std::vector<CVec>& F, double dt,
                             const SpectralOps& ops) {
    if (!(dt > 0)) throw ArgumentError("duhamel_free_wave: dt must be positive");
    const long long S = ops.size();
    const Vec& k2 = ops.ksq();
    const Vec w = k2.cwiseSqrt();
    const CVec fh = ops.forward(f), gh = ops.forward(g);
    std::vector<CVec> Fh;
    for (const auto& x : F) Fh.push_back(ops.forward(x));
    const int K = static_cast<int>(F.size());
    Trajectory tr;
    tr.grid = ops.grid();
    tr.wave = true;
    tr.convention = "u_tt - Lap u = F";
    CVec C = CVec::Zero(S), Sn = CVec::Zero(S);  // cumulative cosine / sine transforms (or int F, int sF)
    const int steps = std::max(K - 1, 0);
    for (int m = 0; m <= steps; ++m) {
        const double t = m * dt;
        if (m > 0) {
            const double a = (m - 1) * dt;
            for (long long i = 0; i < S; ++i) {
                const cplx al = Fh[m - 1][i];
                const cplx be = (Fh[m][i] - Fh[m - 1][i]) / dt;
                if (w[i] == 0.0) {
                    const cplx I0 = al * dt + be * dt * dt / 2.0;
                    C[i] += I0;
                    Sn[i] += a * I0 + al * dt * dt / 2.0 + be * dt * dt * dt / 3.0;
                } else {
                    const Moments mo = moments(w[i], dt);
                    const double ca = std::cos(w[i] * a), sa = std::sin(w[i] * a);
                    const cplx pc = al * mo.c0 + be * mo.c1, ps = al * mo.s0 + be * mo.s1;
                    C[i] += ca * pc - sa * ps;
                    Sn[i] += sa * pc + ca * ps;
                }
            }
        }
        CVec uh(S), uth(S);
        for (long long i = 0; i < S; ++i) {
            if (w[i] == 0.0) {
                uh[i] = fh[i] + t * gh[i] + (t * C[i] - Sn[i]);
                uth[i] = gh[i] + C[i];
            } else {
                const double c = std::cos(w[i] * t), s = std::sin(w[i] * t);
                uh[i] = c * fh[i] + s / w[i] * gh[i] + (s * C[i] - c * Sn[i]) / w[i];
                uth[i] = -w[i] * s * fh[i] + c * gh[i] + (c * C[i] + s * Sn[i]);
            }
        }
        tr.times.push_back(t);
        tr.u.push_back(ops.inverse(uh));
        tr.ut.push_back(ops.inverse(uth));
        tr.log.push_back({t, ops.norm2(tr.u.back()), 0.0});
    }
    return tr;
}

}  // namespace magvir
