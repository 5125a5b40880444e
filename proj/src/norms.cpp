#include "magvir/norms.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "magvir/errors.hpp"

namespace magvir {

DistortedNormEngine::DistortedNormEngine(std::shared_ptr<const MagneticOperator> H,
                                         const NormEngineOptions& opt)
    : H_(std::move(H)), opt_(opt) {
    if (H_->zero_A() && H_->zero_V()) {
        path_ = Path::free_symbol;
    } else if (opt.prefer_dense && H_->size() <= opt.dense_cap) {
        path_ = Path::dense;
        Eigen::SelfAdjointEigenSolver<CMat> es(H_->dense());
        if (es.info() != Eigen::Success) throw SpectralError("eigendecomposition failed");
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
        if (evals_.minCoeff() < -opt.negative_tol * std::max(1.0, evals_.cwiseAbs().maxCoeff()))
            throw SpectralError("H has a negative eigenvalue " + std::to_string(evals_.minCoeff()) +
                                "; fractional powers undefined");
    } else {
        path_ = Path::lanczos;
    }
}

namespace {

double power(double lam, double s) {
    if (lam <= 0.0) return s == 0.0 ? 1.0 : 0.0;
    return std::pow(lam, s);
}

}  // namespace

double DistortedNormEngine::norm(const CVec& f, double s) const {
    const SpectralOps& ops = H_->ops();
    if (s == 0.0) return std::sqrt(ops.norm2(f));
    if (path_ == Path::free_symbol) {
        const CVec fh = ops.forward(f);
        double acc = 0;
        for (long long i = 0; i < ops.size(); ++i) acc += power(ops.ksq()[i], s) * std::norm(fh[i]);
        return std::sqrt(ops.grid().cell() * acc / static_cast<double>(ops.size()));
    }
    if (path_ == Path::dense) {
        const CVec c = evecs_.adjoint() * f;
        double acc = 0;
        for (long long i = 0; i < c.size(); ++i) acc += power(evals_[i], s) * std::norm(c[i]);
        return std::sqrt(ops.grid().cell() * acc);
    }
    // Lanczos with full reorthogonalization: <f, H^s f> = |f|^2 e1^T T^s e1.
    const double fn = f.norm();
    if (fn == 0.0) return 0.0;
    std::vector<CVec> Q{f / fn};
    std::vector<double> alpha, beta;
    double prev = -1.0;
    for (int k = 0; k < opt_.lanczos_max; ++k) {
        CVec w = H_->apply(Q.back());
        const double a = Q.back().dot(w).real();
        alpha.push_back(a);
        if (opt_.reorthogonalize) {
            for (const auto& q : Q) w -= q.dot(w) * q;
            for (const auto& q : Q) w -= q.dot(w) * q;
        } else {
            w -= a * Q.back();
            if (Q.size() > 1) w -= beta.back() * Q[Q.size() - 2];
        }
        const double b = w.norm();
        const int m = static_cast<int>(alpha.size());
        Mat T = Mat::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(T);
        const Vec& th = es.eigenvalues();
        if (th.minCoeff() < -opt_.negative_tol * std::max(1.0, th.cwiseAbs().maxCoeff()))
            throw SpectralError("negative Ritz value; fractional power undefined");
        double val = 0;
        for (int i = 0; i < m; ++i) val += power(th[i], s) * std::pow(es.eigenvectors()(0, i), 2);
        if (prev >= 0 && std::abs(val - prev) <= opt_.lanczos_tol * std::abs(val)) {
            return std::sqrt(ops.grid().cell() * fn * fn * val);
        }
        if (b < 1e-13 * std::max(1.0, std::abs(a))) return std::sqrt(ops.grid().cell() * fn * fn * val);
        prev = val;
        beta.push_back(b);
        Q.push_back(w / b);
        if (!opt_.reorthogonalize && Q.size() > 2) Q.erase(Q.begin());
    }
    throw ConvergenceError("distorted_norm: Lanczos quadrature did not converge", prev, prev);
}

double distorted_norm(const Field& f, double s, const DistortedNormEngine& engine) {
    if (!(f.grid == engine.op().ops().grid())) throw ArgumentError("distorted_norm: grid mismatch");
    return engine.norm(f.values, s);
}

}  // namespace magvir
