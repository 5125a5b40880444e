#include "magvir/certificates.hpp"

#include <algorithm>
#include <cmath>

#include "magvir/errors.hpp"
#include "magvir/quadrature.hpp"

namespace magvir {

double triple_norm(const std::function<double(double)>& profile, double alpha,
                   const QuadratureConfig& q) {
    auto f = [&](double r) { return r <= 0 ? 0.0 : std::pow(r, alpha) * profile(r); };
    auto integ = [&](double a, double b) {
        if (q.fixed_nodes <= 0) return integrate_adaptive(f, a, b, q.breaks, q.rel_tol, q.max_depth);
        std::vector<double> pts{a};
        for (double c : q.breaks)
            if (c > a && c < b) pts.push_back(c);
        pts.push_back(b);
        std::sort(pts.begin(), pts.end());
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const Rule1D g = gauss_legendre(q.fixed_nodes, pts[i], pts[i + 1]);
            for (std::size_t k = 0; k < g.x.size(); ++k) s += g.w[k] * f(g.x[k]);
        }
        return s;
    };
    const double R0 = q.rho_scale;
    double total = integ(0.0, R0);
    double prev = -1.0, prev_ratio = -1.0;
    double lo = R0;
    int zeros = 0;
    for (int k = 0; k < q.max_shells; ++k) {
        const double hi = 2.0 * lo;
        if (lo >= q.rho_max) break;
        const double d = integ(lo, std::min(hi, q.rho_max));
        total += d;
        lo = hi;
        if (d == 0.0) {
            if (++zeros >= 2) return total;
            prev = d;
            continue;
        }
        zeros = 0;
        if (prev > 0.0) {
            const double ratio = d / prev;
            if (ratio < 0.75) {
                const double tail = d * ratio / (1.0 - ratio);
                if (tail <= q.rel_tol * std::abs(total)) return total + tail;
                // pure power tails have constant shell ratios; the geometric sum is then exact
                if (prev_ratio > 0.0 && std::abs(ratio - prev_ratio) <= q.rel_tol * ratio) return total + tail;
            }
            prev_ratio = ratio;
        }
        prev = d;
    }
    throw DivergenceError("triple_norm: tail does not decay on the truncation window", total);
}

std::string to_string(TheoremTag t) {
    switch (t) {
        case TheoremTag::small3d_schrodinger: return "small-3D-schrodinger";
        case TheoremTag::highdim_schrodinger: return "highdim-schrodinger";
        case TheoremTag::small3d_wave: return "small-3D-wave";
        case TheoremTag::highdim_wave: return "highdim-wave";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::fails: return "fails";
        case Verdict::holds: return "holds";
        case Verdict::holds_strictly: return "holds-strictly";
    }
    return "?";
}

TheoremTag theorem_tag_from_string(const std::string& s) {
    for (auto t : {TheoremTag::small3d_schrodinger, TheoremTag::highdim_schrodinger,
                   TheoremTag::small3d_wave, TheoremTag::highdim_wave})
        if (to_string(t) == s) return t;
    throw ConfigError("unknown certificate mode '" + s + "'");
}

Verdict judge(double value, double threshold, double strict_tol, bool diverged) {
    if (diverged || !(value <= threshold)) return Verdict::fails;
    if (threshold - value > strict_tol) return Verdict::holds_strictly;
    return Verdict::holds;
}

double sphere_sup_btau2(const PotentialSpec& spec, double rho, const std::vector<Vec>& dirs) {
    if (spec.zero_A) return 0.0;
    double s = 0.0;
    for (const auto& d : dirs) {
        const FieldMatrixSample f = eval_B(spec, Vec(rho * d));
        // roundoff floor: otherwise an exactly tangential B leaves noise that
        // the relative-tolerance quadrature chases to its maximum depth
        const double bt2 = f.B_tau.squaredNorm();
        if (bt2 > 1e-24 * f.B.squaredNorm()) s = std::max(s, bt2);
    }
    return s;
}

double sphere_sup_vr_plus(const PotentialSpec& spec, double rho, const std::vector<Vec>& dirs) {
    if (spec.zero_V) return 0.0;
    double s = 0.0;
    for (const auto& d : dirs) s = std::max(s, spec.V_r(Vec(rho * d)));
    return s;
}

Certificate certify(const PotentialSpec& spec, int n, TheoremTag mode, const CertifyConfig& cfg) {
    if (spec.n != n) throw ArgumentError("certify: spec dimension does not match n");
    Certificate c;
    c.tag = mode;
    c.n = n;
    c.strict_tol = cfg.strict_tol;
    c.sphere_samples = cfg.sphere_samples;
    const auto dirs = sphere_directions(n, cfg.sphere_samples);
    const bool three = (mode == TheoremTag::small3d_schrodinger || mode == TheoremTag::small3d_wave);
    if (three) {
        if (n != 3) throw ArgumentError("certify: 3D smallness modes need n = 3");
        QuadratureConfig q = cfg.quad;
        q.breaks.insert(q.breaks.end(), spec.radial_breaks.begin(), spec.radial_breaks.end());
        c.M = 0.5;
        c.threshold = 0.5;
        try {
            c.bt3 = spec.zero_A ? 0.0
                                : triple_norm([&](double r) { return sphere_sup_btau2(spec, r, dirs); }, 3.0, q);
            c.vr2 = spec.zero_V ? 0.0
                                : triple_norm([&](double r) { return sphere_sup_vr_plus(spec, r, dirs); }, 2.0, q);
        } catch (const DivergenceError& e) {
            c.diverged = true;
            c.partial = e.partial;
        }
        c.value = c.bt3 + c.vr2;
    } else {
        if (n < 4) throw ArgumentError("certify: high-dimensional modes need n >= 4");
        for (int i = 0; i < cfg.n_radii; ++i) {
            const double t = cfg.n_radii == 1 ? 0.0 : double(i) / (cfg.n_radii - 1);
            const double r = cfg.rho_min * std::pow(cfg.rho_max / cfg.rho_min, t);
            if (!spec.zero_A) c.C1 = std::max(c.C1, std::sqrt(sphere_sup_btau2(spec, r, dirs)) * r * r);
            if (!spec.zero_V) c.C2 = std::max(c.C2, sphere_sup_vr_plus(spec, r, dirs) * r * r * r);
        }
        c.value = c.C1 * c.C1 + 2.0 * c.C2;
        c.threshold = 2.0 / 3.0 * (n - 1) * (n - 3);
        c.M = 0.0;
    }
    c.verdict = judge(c.value, c.threshold, c.strict_tol, c.diverged);
    return c;
}

OptimizeM optimize_M(double bt, double vr) {
    if (bt < 0 || vr < 0) throw ArgumentError("optimize_M: norms must be nonnegative");
    // d/dM (M+1/2)^2/M = (M+1/2)(M-1/2)/M^2 vanishes only at M = 1/2 on M > 0.
    OptimizeM o;
    o.M = 0.5;
    o.coefficient = (o.M + 0.5) * (o.M + 0.5) / o.M;
    o.lhs = o.coefficient * bt + 2.0 * (o.M + 0.5) * vr;
    o.feasible = o.lhs <= 1.0;
    return o;
}

Rational highdim_threshold(int n) { return Rational(2 * (n - 1) * (n - 3), 3); }

Verdict certify_highdim_exact(Rational C1, Rational C2, int n) {
    const Rational v = C1 * C1 + Rational(2) * C2;
    const Rational t = highdim_threshold(n);
    if (v > t) return Verdict::fails;
    return v == t ? Verdict::holds : Verdict::holds_strictly;
}

Rational ellipse_lhs(Rational M, Rational bt, Rational vr) {
    const Rational h(1, 2);
    return (M + h) * (M + h) / M * bt + Rational(2) * (M + h) * vr;
}

}  // namespace magvir
