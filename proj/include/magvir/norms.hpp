#pragma once

#include <memory>

#include "magvir/hamiltonian.hpp"

namespace magvir {

struct NormEngineOptions {
    long long dense_cap = 4096;
    double negative_tol = 1e-9;
    double lanczos_tol = 1e-10;
    int lanczos_max = 300;
    // false keeps three vectors instead of the whole basis (large grids)
    bool reorthogonalize = true;
    bool prefer_dense = true;
};

// ||H^{s/2} f||: dense eigendecomposition, exact free symbol, or Lanczos quadrature.
class DistortedNormEngine {
public:
    enum class Path { dense, free_symbol, lanczos };
    DistortedNormEngine(std::shared_ptr<const MagneticOperator> H, const NormEngineOptions& opt = {});

    double norm(const CVec& f, double s) const;
    Path path() const { return path_; }
    const Vec& eigenvalues() const { return evals_; }
    const CMat& eigenvectors() const { return evecs_; }
    const MagneticOperator& op() const { return *H_; }

private:
    std::shared_ptr<const MagneticOperator> H_;
    NormEngineOptions opt_;
    Path path_;
    Vec evals_;
    CMat evecs_;
};

double distorted_norm(const Field& f, double s, const DistortedNormEngine& engine);

}  // namespace magvir
