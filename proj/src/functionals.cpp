#include "magvir/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magvir/errors.hpp"
#include "magvir/quadrature.hpp"

namespace magvir {

namespace {

int sample_count(const Trajectory& tr, int last) {
    const int K = static_cast<int>(tr.times.size());
    if (last < 0 || last >= K) return K;
    return last + 1;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
    double s = 0;
    for (std::size_t i = 1; i < v.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (v[i] + v[i - 1]);
    return s;
}

double sphere_abs2(const SpectralOps& ops, const Vec& u2, double R, const SphereQuadrature& sq) {
    const int n = ops.n();
    if (n == 3) {
        static thread_local int cached_p = -1, cached_a = -1;
        static thread_local SphereRule rule;
        if (cached_p != sq.n_polar || cached_a != sq.n_azimuth) {
            rule = sphere_rule_3d(sq.n_polar, sq.n_azimuth);
            cached_p = sq.n_polar;
            cached_a = sq.n_azimuth;
        }
        double s = 0;
        for (std::size_t i = 0; i < rule.dirs.size(); ++i) s += rule.w[i] * interpolate(ops, u2, Vec(R * rule.dirs[i]));
        return s * R * R;
    }
    const int count = n == 2 ? 4 * sq.n_azimuth : sq.qmc_points;
    const auto dirs = sphere_directions(n, count);
    double s = 0;
    for (const auto& d : dirs) s += interpolate(ops, u2, Vec(R * d));
    const double area = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
    return area * std::pow(R, n - 1) * s / dirs.size();
}

}  // namespace

std::string to_string(NormalizerTag t) { return t == NormalizerTag::energy ? "energy" : "distorted-half"; }

std::vector<double> dyadic_radii(const GridSpec& g) {
    std::vector<double> r;
    for (double R = 0.5 * g.L; R >= 2 * g.h() * (1 - 1e-12); R *= 0.5) r.push_back(R);
    return r;
}

double distorted_half_normalizer(const CVec& f, const DistortedNormEngine& engine) {
    const double v = engine.norm(f, 0.5);
    return v * v;
}

double wave_energy(const MagneticOperator& H, const CVec& u, const CVec& ut) {
    return 0.5 * H.ops().norm2(ut) + 0.5 * H.energy_form(u);
}

SmoothingReport smoothing_report(const Trajectory& tr, const MagneticOperator& H, double normalizer,
                                 const std::string& tag, const SmoothingOptions& opt) {
    if (!(normalizer > opt.degenerate_tol))
        throw DegenerateError("smoothing_report: normalizer " + std::to_string(normalizer) + " is (nearly) zero");
    const SpectralOps& ops = H.ops();
    if (!(tr.grid == ops.grid())) throw ArgumentError("smoothing_report: trajectory grid differs from operator grid");
    const int K = sample_count(tr, opt.last_sample);
    if (K < 2) throw ArgumentError("smoothing_report: need at least two samples");
    const int n = ops.n();
    const long long S = ops.size();
    const double cell = ops.grid().cell();
    const Vec& r = ops.radius();

    SmoothingReport rep;
    rep.wave = tr.wave;
    rep.normalizer = normalizer;
    rep.normalizer_tag = tag;
    rep.radii = dyadic_radii(ops.grid());
    const std::size_t NR = rep.radii.size();
    std::vector<double> times(tr.times.begin(), tr.times.begin() + K);
    rep.T = times.back() - times.front();

    std::vector<std::vector<double>> ball(NR, std::vector<double>(K)), sph(NR, std::vector<double>(K));
    std::vector<double> k1(K), wm(K);
    for (int t = 0; t < K; ++t) {
        const CVec& u = tr.u[t];
        const auto w = H.magnetic_gradient(u);
        Vec dens = Vec::Zero(S);
        for (int k = 0; k < n; ++k) dens += w[k].cwiseAbs2();
        if (tr.wave) dens += tr.ut[t].cwiseAbs2();
        const Vec u2 = u.cwiseAbs2();
        double a1 = 0, a2 = 0;
        for (long long i = 0; i < S; ++i) {
            const double ri = r[i];
            if (ri == 0) continue;
            cplx wr = 0;
            for (int k = 0; k < n; ++k) wr += w[k][i] * ops.coord(k)[i] / ri;
            double wt2 = 0;
            for (int k = 0; k < n; ++k) wt2 += std::norm(w[k][i] - wr * ops.coord(k)[i] / ri);
            a1 += wt2 / ri;
            a2 += u2[i] / (ri * ri * ri);
        }
        k1[t] = cell * a1;
        wm[t] = cell * a2;
        for (std::size_t j = 0; j < NR; ++j) {
            const double R = rep.radii[j];
            double e = 0;
            for (long long i = 0; i < S; ++i)
                if (r[i] <= R) e += dens[i];
            ball[j][t] = cell * e;
            sph[j][t] = sphere_abs2(ops, u2, R, opt.sphere);
        }
    }
    rep.local_energy.resize(NR);
    rep.sphere_mass.resize(NR);
    double k2 = 0;
    for (std::size_t j = 0; j < NR; ++j) {
        const double R = rep.radii[j];
        rep.local_energy[j] = trapezoid(times, ball[j]) / R / normalizer;
        rep.sphere_mass[j] = trapezoid(times, sph[j]) / (R * R) / normalizer;
        if (rep.local_energy[j] > rep.sup_local_energy || j == 0) {
            rep.sup_local_energy = rep.local_energy[j];
            rep.R_star = R;
        }
        k2 = std::max(k2, rep.sphere_mass[j]);
    }
    rep.K1 = std::sqrt(std::max(0.0, trapezoid(times, k1) / normalizer));
    rep.K2 = std::sqrt(std::max(0.0, k2));
    rep.weighted_mass = trapezoid(times, wm) / normalizer;
    return rep;
}

SmoothingReport smoothing_report(const Trajectory& tr, std::shared_ptr<const MagneticOperator> H, NormalizerTag tag,
                                 const SmoothingOptions& opt, const NormEngineOptions& nopt) {
    if (tr.u.empty()) throw ArgumentError("smoothing_report: empty trajectory");
    double N = 0;
    if (tag == NormalizerTag::energy) {
        if (!tr.wave) throw ArgumentError("smoothing_report: energy normalizer needs a wave trajectory");
        N = wave_energy(*H, tr.u[0], tr.ut[0]);
    } else {
        if (tr.u[0].cwiseAbs2().sum() == 0) N = 0;
        else N = distorted_half_normalizer(tr.u[0], DistortedNormEngine(H, nopt));
    }
    return smoothing_report(tr, *H, N, to_string(tag), opt);
}

InterpolationSeries interpolation_boundedness(const Trajectory& tr, const MagneticOperator& H,
                                              const RadialMultiplier& m, double normalizer) {
    if (!m.bounded_dphi || !m.bounded_r_d2phi)
        throw ArgumentError("interpolation_boundedness: multiplier '" + m.id +
                            "' lacks bounded phi' / bounded r phi'' metadata");
    if (!(normalizer > 0)) throw DegenerateError("interpolation_boundedness: zero normalizer");
    const SpectralOps& ops = H.ops();
    const int n = ops.n();
    const long long S = ops.size();
    std::vector<Vec> gphi(n, Vec::Zero(S));
    for (long long i = 0; i < S; ++i) {
        const double r = ops.radius()[i];
        if (r == 0) continue;
        const double d = m.dphi(r);
        for (int k = 0; k < n; ++k) gphi[k][i] = d * ops.coord(k)[i] / r;
    }
    InterpolationSeries s;
    for (std::size_t t = 0; t < tr.u.size(); ++t) {
        const CVec& u = tr.u[t];
        const auto w = H.magnetic_gradient(u);
        cplx acc = 0;
        for (int k = 0; k < n; ++k) acc += ops.inner(u, gphi[k].cast<cplx>().cwiseProduct(w[k]));
        s.times.push_back(tr.times[t]);
        s.values.push_back(std::abs(acc) / normalizer);
        s.sup = std::max(s.sup, s.values.back());
    }
    return s;
}

// ---- Hardy ----

double hardy_constant(int n) {
    if (n < 3) throw ArgumentError("hardy_constant: n >= 3 required");
    return 4.0 / ((n - 2.0) * (n - 2.0));
}

HardyParts hardy_parts(const CVec& f, const MagneticOperator& H) {
    const SpectralOps& ops = H.ops();
    if (ops.n() < 3) throw ArgumentError("hardy_ratio: n >= 3 required");
    const Vec& r = ops.radius();
    HardyParts p;
    double s = 0;
    for (long long i = 0; i < ops.size(); ++i) {
        if (r[i] == 0) throw DomainError("hardy_ratio: the origin is a grid node");
        s += std::norm(f[i]) / (r[i] * r[i]);
    }
    p.weighted = ops.grid().cell() * s;
    for (const auto& w : H.magnetic_gradient(f)) p.gradient += ops.norm2(w);
    if (!(p.gradient > 0)) throw DegenerateError("hardy_ratio: ||grad_A f|| = 0");
    p.ratio = p.weighted / p.gradient;
    return p;
}

double hardy_ratio(const CVec& f, const MagneticOperator& H) { return hardy_parts(f, H).ratio; }

double hardy_ratio(const Field& f, const PotentialSpec& spec) {
    HamiltonianOptions o;
    o.check_gauge = false;
    const MagneticOperator H(make_ops(f.grid), spec, o);
    return hardy_ratio(f.values, H);
}

// ---- Strichartz ----

Exponent Exponent::parse(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "oo") return infinity();
    const auto slash = s.find('/');
    try {
        std::size_t pos = 0;
        if (slash == std::string::npos) {
            const long long p = std::stoll(s, &pos);
            if (pos != s.size() || p <= 0) throw ArgumentError("");
            return finite(p);
        }
        const long long a = std::stoll(s.substr(0, slash), &pos);
        if (pos != slash) throw ArgumentError("");
        const std::string rest = s.substr(slash + 1);
        const long long b = std::stoll(rest, &pos);
        if (pos != rest.size() || a <= 0 || b <= 0) throw ArgumentError("");
        return Exponent{Rational(b, a)};
    } catch (const std::exception&) {
        throw ArgumentError("cannot parse exponent '" + s + "' (integer, a/b or inf)");
    }
}

double Exponent::value() const {
    if (is_infinite()) return std::numeric_limits<double>::infinity();
    return double(inv.denominator()) / double(inv.numerator());
}

std::string Exponent::str() const {
    if (is_infinite()) return "inf";
    const Rational p = Rational(1) / inv;
    std::ostringstream os;
    os << p.numerator();
    if (p.denominator() != 1) os << '/' << p.denominator();
    return os.str();
}

Admissibility wave_admissible(Exponent p, Exponent q, int n) {
    if (n < 2) throw ArgumentError("wave_admissible: n >= 2 required");
    Admissibility a;
    const Rational half(1, 2);
    a.sigma = q.inv - p.inv + half;
    if (p.inv < Rational(0) || p.inv > half) a.violated = "2 <= p <= inf";
    else if (q.is_infinite()) a.violated = "q != inf";
    else if (q.inv > half) a.violated = "q >= 2";
    else if (n > 3 && q.inv < Rational(n - 3, 2 * (n - 1))) a.violated = "q <= 2(n-1)/(n-3)";
    else if (Rational(2) * p.inv + Rational(n - 1) * q.inv != Rational(n - 1, 2)) a.violated = "2/p + (n-1)/q = (n-1)/2";
    a.admissible = a.violated.empty();
    a.endpoint = a.admissible && p.inv == half;
    return a;
}

StrichartzReport strichartz_norm(const Trajectory& tr, const SpectralOps& ops, Exponent p, Exponent q,
                                 bool allow_endpoint) {
    const int n = ops.n();
    const Admissibility a = wave_admissible(p, q, n);
    if (!a.admissible)
        throw ArgumentError("couple (" + p.str() + "," + q.str() + ") is not wave admissible for n = " +
                            std::to_string(n) + ": violates " + a.violated);
    if (a.endpoint && !allow_endpoint)
        throw ArgumentError("couple (" + p.str() + "," + q.str() + ") is an endpoint couple; refused for bound checks");
    StrichartzReport rep;
    rep.p = p;
    rep.q = q;
    rep.n = n;
    rep.admissible = true;
    rep.endpoint = a.endpoint;
    rep.sigma = a.sigma;
    const double sigma = boost::rational_cast<double>(a.sigma);
    const double qv = q.value();
    const double cell = ops.grid().cell();
    std::vector<double> spatial;
    for (const auto& u : tr.u) {
        const CVec d = ops.apply_radial_symbol(u, [sigma](double k2) { return k2 > 0 ? std::pow(k2, 0.5 * sigma) : 0.0; });
        double s = 0;
        for (long long i = 0; i < d.size(); ++i) s += std::pow(std::abs(d[i]), qv);
        spatial.push_back(std::pow(cell * s, 1.0 / qv));
    }
    if (p.is_infinite()) {
        rep.mixed_norm = spatial.empty() ? 0.0 : *std::max_element(spatial.begin(), spatial.end());
    } else {
        const double pv = p.value();
        std::vector<double> pw(spatial.size());
        for (std::size_t i = 0; i < spatial.size(); ++i) pw[i] = std::pow(spatial[i], pv);
        rep.mixed_norm = std::pow(trapezoid(tr.times, pw), 1.0 / pv);
    }
    return rep;
}

std::vector<double> DyadicSum::ratios(int j_min) const {
    std::vector<double> r;
    for (std::size_t i = 0; i + 1 < j.size(); ++i)
        if (j[i] >= j_min) r.push_back(contributions[i] > 0 ? contributions[i + 1] / contributions[i] : 0.0);
    return r;
}

DyadicSum dyadic_source_sum(const std::vector<CVec>& F, const std::vector<double>& times, const SpectralOps& ops) {
    if (F.size() != times.size()) throw ArgumentError("dyadic_source_sum: samples and times differ in length");
    const Vec& r = ops.radius();
    const long long S = ops.size();
    std::vector<int> jj(S);
    int jmin = 1 << 20, jmax = -(1 << 20);
    for (long long i = 0; i < S; ++i) {
        if (r[i] == 0) {
            jj[i] = std::numeric_limits<int>::min();
            continue;
        }
        int e = 0;
        std::frexp(r[i], &e);  // r = m 2^e, m in [1/2, 1)  ->  r in [2^(e-1), 2^e)
        jj[i] = e - 1;
        jmin = std::min(jmin, jj[i]);
        jmax = std::max(jmax, jj[i]);
    }
    DyadicSum out;
    if (S == 0 || jmin > jmax) return out;
    const int NJ = jmax - jmin + 1;
    std::vector<std::vector<double>> dens(NJ, std::vector<double>(F.size(), 0.0));
    for (std::size_t t = 0; t < F.size(); ++t)
        for (long long i = 0; i < S; ++i)
            if (jj[i] != std::numeric_limits<int>::min()) dens[jj[i] - jmin][t] += std::norm(F[t][i]);
    const double cell = ops.grid().cell();
    for (int k = 0; k < NJ; ++k) {
        for (auto& v : dens[k]) v *= cell;
        const double nrm = F.size() > 1 ? std::sqrt(std::max(0.0, trapezoid(times, dens[k]))) : std::sqrt(dens[k][0]);
        out.j.push_back(jmin + k);
        out.norms.push_back(nrm);
        out.contributions.push_back(std::pow(2.0, 0.5 * (jmin + k)) * nrm);
        out.total += out.contributions.back();
    }
    return out;
}

}  // namespace magvir
