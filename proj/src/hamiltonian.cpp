#include "magvir/hamiltonian.hpp"

#include <cmath>

#include "magvir/errors.hpp"

namespace magvir {

MagneticOperator::MagneticOperator(OpsPtr ops, const PotentialSpec& spec, const HamiltonianOptions& opt)
    : ops_(std::move(ops)), gauge_tol_(opt.gauge_tol) {
    const int n = ops_->n();
    if (spec.n != n)
        throw ArgumentError("grid dimension " + std::to_string(n) + " does not match potential dimension " +
                            std::to_string(spec.n));
    const long long S = ops_->size();
    A_.assign(n, Vec::Zero(S));
    V_ = Vec::Zero(S);
    zero_A_ = spec.zero_A;
    zero_V_ = spec.zero_V;
    for (long long i = 0; i < S; ++i) {
        const Vec x = ops_->point(i);
        if (!zero_A_) {
            const Vec a = spec.A(x);
            for (int j = 0; j < n; ++j) A_[j][i] = a[j];
        }
        if (!zero_V_) V_[i] = spec.V(x);
    }
    if (opt.check_gauge && !zero_A_) {
        std::vector<Vec> pts;
        pts.reserve(S);
        for (long long i = 0; i < S; ++i) pts.push_back(ops_->point(i));
        gauge_residual_ = magvir::gauge_residual(spec, pts);
        gauge_checked_ = true;
    } else if (zero_A_) {
        gauge_checked_ = true;
    }
    finish();
}

MagneticOperator::MagneticOperator(OpsPtr ops, std::vector<Vec> A, Vec V)
    : ops_(std::move(ops)), A_(std::move(A)), V_(std::move(V)) {
    if (static_cast<int>(A_.size()) != ops_->n()) throw ArgumentError("MagneticOperator: A has wrong arity");
    zero_A_ = true;
    for (const auto& a : A_) zero_A_ = zero_A_ && a.isZero(0.0);
    zero_V_ = V_.isZero(0.0);
    gauge_checked_ = zero_A_;
    finish();
}

void MagneticOperator::finish() {
    A2_ = Vec::Zero(ops_->size());
    for (const auto& a : A_) A2_ += a.cwiseProduct(a);
}

CVec MagneticOperator::cov_derivative(const CVec& u, int j) const {
    CVec d = ops_->derivative(u, j);
    if (!zero_A_) d -= cplx(0, 1) * (A_[j].cast<cplx>().cwiseProduct(u));
    return d;
}

std::vector<CVec> MagneticOperator::magnetic_gradient(const CVec& u) const {
    std::vector<CVec> g = ops_->gradient(u);
    if (!zero_A_)
        for (int j = 0; j < n(); ++j) g[j] -= cplx(0, 1) * (A_[j].cast<cplx>().cwiseProduct(u));
    return g;
}

CVec MagneticOperator::apply(const CVec& u) const {
    CVec out = CVec::Zero(size());
    if (zero_A_) {
        out = -ops_->laplacian(u);
    } else {
        const auto g = magnetic_gradient(u);
        for (int j = 0; j < n(); ++j) out -= cov_derivative(g[j], j);
    }
    if (!zero_V_) out += V_.cast<cplx>().cwiseProduct(u);
    return out;
}

CVec MagneticOperator::apply_expanded(const CVec& u) const {
    if (!gauge_checked_)
        throw ConfigError("apply_H: Coulomb gauge residual was not checked for this potential");
    if (gauge_residual_ > gauge_tol_)
        throw ConfigError("apply_H: gauge residual " + std::to_string(gauge_residual_) +
                          " above tolerance; the expanded form drops the i div A term");
    CVec out = -ops_->laplacian(u);
    if (!zero_A_) {
        const auto g = ops_->gradient(u);
        for (int j = 0; j < n(); ++j) out += cplx(0, 2) * A_[j].cast<cplx>().cwiseProduct(g[j]);
        out += A2_.cast<cplx>().cwiseProduct(u);
    }
    if (!zero_V_) out += V_.cast<cplx>().cwiseProduct(u);
    return out;
}

double MagneticOperator::energy_form(const CVec& u) const {
    double e = 0;
    for (const auto& g : magnetic_gradient(u)) e += ops_->norm2(g);
    if (!zero_V_) e += ops_->grid().cell() * (V_.array() * u.array().abs2()).sum();
    return e;
}

CVec MagneticOperator::source(const CVec& u) const {
    CVec F = CVec::Zero(size());
    if (!zero_A_) {
        const auto g = ops_->gradient(u);
        for (int j = 0; j < n(); ++j) {
            const CVec Au = A_[j].cast<cplx>().cwiseProduct(u);
            F -= cplx(0, 1) * (ops_->derivative(Au, j) + A_[j].cast<cplx>().cwiseProduct(g[j]));
        }
        F -= A2_.cast<cplx>().cwiseProduct(u);
    }
    if (!zero_V_) F -= V_.cast<cplx>().cwiseProduct(u);
    return F;
}

CMat MagneticOperator::dense() const {
    const long long S = size();
    CMat H(S, S);
    CVec e = CVec::Zero(S);
    for (long long i = 0; i < S; ++i) {
        e[i] = 1.0;
        H.col(i) = apply(e);
        e[i] = 0.0;
    }
    return H;
}

std::vector<Field> magnetic_gradient(const Field& u, const PotentialSpec& spec) {
    if (u.grid.n != spec.n) throw ArgumentError("magnetic_gradient: grid/spec dimension mismatch");
    HamiltonianOptions o;
    o.check_gauge = false;
    MagneticOperator H(make_ops(u.grid), spec, o);
    std::vector<Field> out;
    for (auto& c : H.magnetic_gradient(u.values)) out.push_back(Field{u.grid, c});
    return out;
}

Field apply_H(const Field& u, const PotentialSpec& spec) {
    MagneticOperator H(make_ops(u.grid), spec);
    return Field{u.grid, H.apply_expanded(u.values)};
}

RadialSplit split_radial_tangential(const std::vector<CVec>& g, const SpectralOps& ops) {
    const int n = ops.n();
    if (static_cast<int>(g.size()) != n) throw ArgumentError("split_radial_tangential: need n components");
    const long long S = ops.size();
    RadialSplit s;
    s.radial.assign(n, CVec(S));
    s.tangential.assign(n, CVec(S));
    for (long long i = 0; i < S; ++i) {
        const double r = ops.radius()[i];
        if (r == 0.0) throw ConfigError("split_radial_tangential: a grid node sits at the origin");
        cplx p = 0;
        for (int j = 0; j < n; ++j) p += g[j][i] * (ops.coord(j)[i] / r);
        for (int j = 0; j < n; ++j) {
            s.radial[j][i] = p * (ops.coord(j)[i] / r);
            s.tangential[j][i] = g[j][i] - s.radial[j][i];
        }
    }
    return s;
}

}  // namespace magvir
