#include "magvir/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <sstream>

#include "magvir/errors.hpp"

namespace magvir {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

double GridSpec::cell() const { return std::pow(h(), n); }

long long GridSpec::size() const {
    long long s = 1;
    for (int i = 0; i < n; ++i) s *= N;
    return s;
}

void GridSpec::validate() const {
    if (n < 1 || n > 6) throw ConfigError("grid: dimension must be in [1, 6]");
    if (N < 2) throw ConfigError("grid: need N >= 2");
    if (scheme == Scheme::spectral && N % 2 != 0) throw ConfigError("grid: spectral scheme needs even N");
    if (!(L > 0)) throw ConfigError("grid: half-width L must be positive");
    if (!(offset >= 0 && offset < 1)) throw ConfigError("grid: offset must lie in [0, 1)");
}

std::string GridSpec::signature() const {
    std::ostringstream os;
    os << "n" << n << "_N" << N << "_L" << L << "_o" << offset << (scheme == Scheme::fd4 ? "_fd4" : "");
    return os.str();
}

SpectralOps::SpectralOps(const GridSpec& g) : g_(g) {
    g.validate();
    size_ = g.size();
    const int n = g.n, N = g.N;
    const double h = g.h();
    stride_.assign(n, 1);
    for (int j = n - 2; j >= 0; --j) stride_[j] = stride_[j + 1] * N;

    kap_.assign(n, Vec(N));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < N; ++i) {
            const int m = i <= N / 2 ? i : i - N;
            const double k = kPi * m / g.L;
            double s;
            if (g.scheme == Scheme::spectral)
                s = (N % 2 == 0 && i == N / 2) ? 0.0 : k;
            else
                s = (8.0 * std::sin(k * h) - std::sin(2.0 * k * h)) / (6.0 * h);
            kap_[j][i] = s;
        }
    }
    x_.assign(n, Vec(size_));
    r_ = Vec::Zero(size_);
    ksq_ = Vec::Zero(size_);
    for (long long idx = 0; idx < size_; ++idx) {
        double r2 = 0, k2 = 0;
        for (int j = 0; j < n; ++j) {
            const long long i = (idx / stride_[j]) % N;
            const double xj = -g.L + (i + g.offset) * h;
            x_[j][idx] = xj;
            r2 += xj * xj;
            k2 += kap_[j][i] * kap_[j][i];
        }
        r_[idx] = std::sqrt(r2);
        ksq_[idx] = k2;
    }

    std::vector<int> dims(n, N);
    CVec tmp(size_);
    auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_f_ = fftw_plan_dft(n, dims.data(), p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_b_ = fftw_plan_dft(n, dims.data(), p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_f_ || !plan_b_) throw std::runtime_error("FFTW planning failed");
}

SpectralOps::~SpectralOps() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_f_) fftw_destroy_plan(static_cast<fftw_plan>(plan_f_));
    if (plan_b_) fftw_destroy_plan(static_cast<fftw_plan>(plan_b_));
}

void SpectralOps::forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_f_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void SpectralOps::inverse(const cplx* in, cplx* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(plan_b_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double s = 1.0 / static_cast<double>(size_);
    for (long long i = 0; i < size_; ++i) out[i] *= s;
}

CVec SpectralOps::forward(const CVec& u) const {
    CVec out(size_);
    forward(u.data(), out.data());
    return out;
}

CVec SpectralOps::inverse(const CVec& uh) const {
    CVec out(size_);
    inverse(uh.data(), out.data());
    return out;
}

long long SpectralOps::axis_index(long long idx, int axis) const {
    return (idx / stride_[axis]) % g_.N;
}

CVec SpectralOps::derivative(const CVec& u, int axis) const {
    CVec uh = forward(u);
    const Vec& k = kap_[axis];
    for (long long i = 0; i < size_; ++i) uh[i] *= cplx(0.0, k[axis_index(i, axis)]);
    return inverse(uh);
}

std::vector<CVec> SpectralOps::gradient(const CVec& u) const {
    const CVec uh = forward(u);
    std::vector<CVec> out;
    CVec tmp(size_);
    for (int j = 0; j < g_.n; ++j) {
        const Vec& k = kap_[j];
        for (long long i = 0; i < size_; ++i) tmp[i] = uh[i] * cplx(0.0, k[axis_index(i, j)]);
        out.push_back(inverse(tmp));
    }
    return out;
}

CVec SpectralOps::laplacian(const CVec& u) const {
    return apply_radial_symbol(u, [](double k2) { return -k2; });
}

Vec SpectralOps::point(long long idx) const {
    Vec p(g_.n);
    for (int j = 0; j < g_.n; ++j) p[j] = x_[j][idx];
    return p;
}

cplx SpectralOps::inner(const CVec& a, const CVec& b) const { return g_.cell() * a.dot(b); }

double SpectralOps::dot_re(const CVec& a, const CVec& b) const { return inner(a, b).real(); }

double SpectralOps::norm2(const CVec& a) const { return g_.cell() * a.squaredNorm(); }

OpsPtr make_ops(const GridSpec& g) { return std::make_shared<const SpectralOps>(g); }

Field make_field(const GridSpec& g, const CVec& v) {
    if (v.size() != g.size()) throw ArgumentError("make_field: value count does not match the grid");
    if (!v.allFinite()) throw ArgumentError("make_field: non-finite entries");
    return Field{g, v};
}

double l2_norm(const Field& f) { return std::sqrt(f.grid.cell() * f.values.squaredNorm()); }

double leakage_fraction(const SpectralOps& ops, const CVec& u) {
    const double half = 0.5 * ops.grid().L;
    double out = 0, tot = 0;
    const Vec& r = ops.radius();
    for (long long i = 0; i < ops.size(); ++i) {
        const double a = std::norm(u[i]);
        tot += a;
        if (r[i] > half) out += a;
    }
    return tot > 0 ? out / tot : 0.0;
}

double spectral_tail(const SpectralOps& ops, const CVec& u) {
    const CVec uh = ops.forward(u);
    const GridSpec& g = ops.grid();
    const int cut = g.N / 3;
    double tail = 0, tot = 0;
    for (long long i = 0; i < ops.size(); ++i) {
        const double a = std::norm(uh[i]);
        tot += a;
        bool hi = false;
        for (int j = 0; j < g.n && !hi; ++j) {
            const long long m = ops.axis_index(i, j);
            const long long mm = m <= g.N / 2 ? m : g.N - m;
            hi = mm > cut;
        }
        if (hi) tail += a;
    }
    return tot > 0 ? std::sqrt(tail / tot) : 0.0;
}

}  // namespace magvir
