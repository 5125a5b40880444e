#pragma once

#include <map>
#include <string>
#include <vector>

#include "magvir/hamiltonian.hpp"
#include "magvir/multipliers.hpp"
#include "magvir/propagators.hpp"

namespace magvir {

// Terms of <u,[H,T]u> with T = -[H, phi], computed exactly on the grid.
struct CommutatorTerms {
    double hessian = 0;   // 4 Re sum <D~_k u, [D~_k,[D_j,phi]] D~_j u>
    double bilap = 0;     // 2 Re sum <D~_k u, [D~_j, [D~_k,[D_j,phi]]] u>
    double vr = 0;        // 2 Re <V u, T u>
    double btau = 0;      // 2 Re sum <D~_k u, -i (F_kj C_j + C_j F_kj) u>
    double total = 0;     // 2 Re <H u, T u>
    double sum() const { return hessian + bilap + vr + btau; }
};

// Continuum-form quadrature of the same terms (pointwise hessian_form, mass pairings).
struct QuadratureTerms {
    double hessian = 0;
    double bilap_regular = 0;
    double bilap_point = 0;
    double bilap_surface = 0;
    double vr = 0;
    double btau = 0;
    double sum() const { return hessian + bilap_regular + bilap_point + bilap_surface + vr + btau; }
};

struct SphereQuadrature {
    int n_polar = 24;
    int n_azimuth = 48;
    int qmc_points = 2048;  // n >= 4
};

class VirialAssembler {
public:
    VirialAssembler(const MagneticOperator& H, const RadialMultiplier& m,
                    const PotentialSpec* spec = nullptr, const PlateauWeight* psi = nullptr);

    const MagneticOperator& H() const { return H_; }
    const Vec& phi() const { return phi_; }
    const Vec& psi() const { return psi_; }

    CVec C(int j, const CVec& v) const;                // [D_j, phi] v
    CVec G(int k, int j, const CVec& v) const;         // [D~_k, C_j] v
    CVec F(int k, int j, const CVec& v) const;         // i [D~_k, D~_j] v
    CVec T(const CVec& u) const;                       // -[H, phi] u
    CVec T_direct(const CVec& u) const;                // sum_j (phi_j D~_j + D~_j phi_j) with analytic grad phi
    CommutatorTerms commutator_terms(const CVec& u) const;
    QuadratureTerms quadrature_terms(const CVec& u, const SphereQuadrature& sq = {}) const;

    double theta_s(const CVec& u) const;
    double theta_s_dot(const CVec& u) const;
    // Theta_W = <u_t, phi u_t> + Re<Hu, phi u> + <u, Psi u>
    double theta_w(const CVec& u, const CVec& ut) const;
    double theta_w_dot(const CVec& u, const CVec& ut) const;

    struct PsiTerms {
        double ut2 = 0;     // 2 <u_t, Psi u_t>
        double grad2 = 0;   // -2 sum <D~_k u, Psi D~_k u>
        double lap = 0;     // -2 Re sum <D~_k u, [D_k, Psi] u>  (weak int |u|^2 Lap Psi)
        double vpsi = 0;    // -2 <u, V Psi u>
        double sum() const { return ut2 + grad2 + lap + vpsi; }
    };
    PsiTerms psi_terms(const CVec& u, const CVec& ut) const;

private:
    const MagneticOperator& H_;
    RadialMultiplier m_;
    const PotentialSpec* spec_;
    Vec phi_;
    Vec psi_;
    std::vector<Vec> grad_phi_;
    Vec lap_phi_;
    bool has_psi_ = false;
};

// Weak pairing int |u|^2 Lap Psi := -2 Re sum_k <D~_k u, [D_k, Psi] u>.
double weak_laplacian_pairing(const MagneticOperator& H, const Vec& psi, const CVec& u);

// n-linear interpolation of a real grid function at an arbitrary point (periodic wrap).
double interpolate(const SpectralOps& ops, const Vec& f, const Vec& x);

struct VirialTrace {
    bool wave = false;
    double dt = 0;
    std::vector<double> times;
    std::vector<double> theta;
    std::vector<double> theta_dot;
    std::vector<double> dd3;   // 3-point second difference
    std::vector<double> dd5;   // 5-point (one Richardson level of dd3)
    std::vector<double> ddR;   // Richardson of dd5 (NaN where the stencil does not fit)
    std::vector<std::string> term_names;
    std::vector<std::vector<double>> terms;  // [term][sample]
    std::vector<double> rhs;
    std::vector<double> residual;   // best available second difference minus rhs
    std::vector<double> residual3;  // dd3 - rhs
    std::vector<std::string> quad_names;
    std::vector<std::vector<double>> quad_terms;
    std::vector<double> rhs_quad;
    double max_abs_rhs() const;
    double max_abs_residual() const;
    double max_abs_residual3() const;
};

struct TraceOptions {
    int stride = 1;            // evaluate every stride-th admissible sample
    bool quadrature = true;    // also assemble the continuum quadrature form
    SphereQuadrature sphere;
    bool require_uniform = true;
};

VirialTrace virial_trace_schrodinger(const Trajectory& tr, const MagneticOperator& H,
                                     const RadialMultiplier& m, const PotentialSpec* spec,
                                     const TraceOptions& opt = {});
VirialTrace virial_trace_wave(const Trajectory& tr, const MagneticOperator& H, const RadialMultiplier& m,
                              const PlateauWeight& psi, const PotentialSpec* spec,
                              const TraceOptions& opt = {});

}  // namespace magvir
