#pragma once

#include <string>
#include <vector>

#include "magvir/hamiltonian.hpp"
#include "magvir/multipliers.hpp"
#include "magvir/propagators.hpp"

namespace magvir {

struct DenseOperator {
    std::string label;
    CMat M;
    bool hermitian = false;
    bool antihermitian = false;
    // Verifies the flagged symmetry: ||M -+ M^*|| <= tol ||M||, else throws SpectralError.
    static DenseOperator make(std::string label, CMat M, bool hermitian, bool antihermitian, double tol = 1e-10);
    double symmetry_defect() const;  // ||M -+ M^*|| / ||M|| for the flagged symmetry
};

enum class TConstruction { commutator, direct };

constexpr long long kOracleCap = 1728;  // 12^3

DenseOperator dense_hamiltonian(const MagneticOperator& H, long long cap = kOracleCap);
DenseOperator dense_multiplication(const Vec& f, const std::string& label);
// T = -[H, phi] (commutator) or sum_j (phi_j D~_j + D~_j phi_j) with analytic grad phi (direct).
DenseOperator build_T(const MagneticOperator& H, const RadialMultiplier& m,
                      TConstruction c = TConstruction::commutator, long long cap = kOracleCap);
DenseOperator build_T(const RadialMultiplier& m, const PotentialSpec& spec, const GridSpec& g,
                      TConstruction c = TConstruction::commutator, long long cap = kOracleCap);
DenseOperator commutator(const DenseOperator& H, const DenseOperator& T);  // [H, T], hermitian

struct IdentityReport {
    double dt = 0;
    std::vector<double> times;
    std::vector<double> theta;
    std::vector<double> dd3;
    std::vector<double> dd5;
    std::vector<double> ddR;
    std::vector<double> rhs;       // <u,[H,T]u> (Schrodinger) or the dense wave right-hand side
    std::vector<double> residual;  // best second difference - rhs
    std::vector<double> residual3;
    double max_rhs = 0;
    double max_residual = 0;
    double max_residual3 = 0;
    double max_imag = 0;  // max |Im <u,[H,T]u>| / ||u||^2
    // wave only
    double max_re_ut_T_ut = 0;            // max |Re<u_t,T u_t>| / (||u_t|| ||T u_t||)
    double max_intermediate_residual = 0;  // |d/dt Re<u_t,Tu> + 1/2 <u,[H,T]u>| / max|<u,[H,T]u>|
};

// Exact flow through the dense spectrum; samples at k dt, k = 0..steps.
IdentityReport commutator_identity_check(const CVec& f, const MagneticOperator& H, const RadialMultiplier& m,
                                         double dt, int steps);
IdentityReport commutator_identity_check(const Field& f, const RadialMultiplier& m, const PotentialSpec& spec,
                                         double dt, int steps);
IdentityReport wave_identity_check(const CVec& f, const CVec& g, const MagneticOperator& H, const RadialMultiplier& m,
                                   const PlateauWeight& psi, double dt, int steps);
IdentityReport wave_identity_check(const WaveState& s, const RadialMultiplier& m, const PlateauWeight& psi,
                                   const PotentialSpec& spec, double dt, int steps);

// int |u|^2 Lap Psi with Lap the dense spectral Laplacian matrix applied to Psi.
double dense_laplacian_pairing(const MagneticOperator& H, const Vec& psi, const CVec& u);

}  // namespace magvir
