#pragma once

#include <string>
#include <vector>

#include "magvir/fields.hpp"
#include "magvir/grid.hpp"

namespace magvir {

struct HamiltonianOptions {
    bool check_gauge = true;  // needed only by the expanded form
    double gauge_tol = 1e-8;
};

// A and V sampled on the grid; covariant derivatives D~_j = D_j - i A_j.
class MagneticOperator {
public:
    MagneticOperator(OpsPtr ops, const PotentialSpec& spec, const HamiltonianOptions& opt = {});
    // From already-sampled coefficient arrays.
    MagneticOperator(OpsPtr ops, std::vector<Vec> A, Vec V);

    const SpectralOps& ops() const { return *ops_; }
    OpsPtr ops_ptr() const { return ops_; }
    int n() const { return ops_->n(); }
    long long size() const { return ops_->size(); }
    const std::vector<Vec>& A() const { return A_; }
    const Vec& V() const { return V_; }
    bool zero_A() const { return zero_A_; }
    bool zero_V() const { return zero_V_; }
    double gauge_residual() const { return gauge_residual_; }
    bool gauge_checked() const { return gauge_checked_; }

    CVec cov_derivative(const CVec& u, int j) const;
    std::vector<CVec> magnetic_gradient(const CVec& u) const;
    // Covariant, exactly hermitian H = -sum_j D~_j D~_j + V.
    CVec apply(const CVec& u) const;
    // Expanded form -Lap u + 2i A.grad u + A^2 u + V u (requires the gauge check).
    CVec apply_expanded(const CVec& u) const;
    // Quadratic form <u, H u> = sum ||D~_j u||^2 + <u, V u>.
    double energy_form(const CVec& u) const;
    // Expansion-consistent wave source -i sum_j (D_j(A_j u) + A_j D_j u) - A^2 u - V u.
    CVec source(const CVec& u) const;
    CMat dense() const;

private:
    void finish();
    OpsPtr ops_;
    std::vector<Vec> A_;
    Vec V_;
    Vec A2_;
    bool zero_A_ = false;
    bool zero_V_ = false;
    double gauge_residual_ = 0.0;
    bool gauge_checked_ = false;
    double gauge_tol_ = 1e-8;
};

// Convenience wrappers matching the module's operations.
std::vector<Field> magnetic_gradient(const Field& u, const PotentialSpec& spec);
Field apply_H(const Field& u, const PotentialSpec& spec);

struct RadialSplit {
    std::vector<CVec> radial;
    std::vector<CVec> tangential;
};
RadialSplit split_radial_tangential(const std::vector<CVec>& g, const SpectralOps& ops);

}  // namespace magvir
