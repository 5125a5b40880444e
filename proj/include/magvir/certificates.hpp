#pragma once

#include <boost/rational.hpp>
#include <functional>
#include <string>

#include "magvir/biot_savart.hpp"
#include "magvir/fields.hpp"

namespace magvir {

struct DivergenceError : std::runtime_error {
    double partial;
    DivergenceError(const std::string& w, double p) : std::runtime_error(w), partial(p) {}
};

// int_0^inf rho^alpha profile(rho) d rho. Inner part [0, rho_scale] adaptively; outside by
// dyadic shells with a geometric tail estimate. Throws DivergenceError when shells stop shrinking.
double triple_norm(const std::function<double(double)>& profile, double alpha,
                   const QuadratureConfig& q);

enum class TheoremTag { small3d_schrodinger, highdim_schrodinger, small3d_wave, highdim_wave };
enum class Verdict { fails, holds, holds_strictly };

std::string to_string(TheoremTag t);
std::string to_string(Verdict v);
TheoremTag theorem_tag_from_string(const std::string& s);

struct CertifyConfig {
    int sphere_samples = 256;
    double strict_tol = 1e-9;
    QuadratureConfig quad;
    // high-dimensional sup over radii in [rho_min, rho_max], log-spaced
    double rho_min = 1e-2;
    double rho_max = 1e2;
    int n_radii = 200;
};

struct Certificate {
    TheoremTag tag = TheoremTag::small3d_schrodinger;
    int n = 3;
    double bt3 = 0.0;  // |||B_tau^2|||_3
    double vr2 = 0.0;  // |||V_r^+|||_2
    double C1 = 0.0;
    double C2 = 0.0;
    double value = 0.0;
    double threshold = 0.0;
    double strict_tol = 0.0;
    double M = 0.5;
    bool diverged = false;
    double partial = 0.0;
    int sphere_samples = 0;
    Verdict verdict = Verdict::fails;
};

Verdict judge(double value, double threshold, double strict_tol, bool diverged);

// sup over a sampled sphere of |B_tau|^2 and of max(V_r, 0).
double sphere_sup_btau2(const PotentialSpec& spec, double rho, const std::vector<Vec>& dirs);
double sphere_sup_vr_plus(const PotentialSpec& spec, double rho, const std::vector<Vec>& dirs);

Certificate certify(const PotentialSpec& spec, int n, TheoremTag mode,
                    const CertifyConfig& cfg = {});

struct OptimizeM {
    double M = 0.5;
    double coefficient = 2.0;  // (M + 1/2)^2 / M at the minimizer
    double lhs = 0.0;
    bool feasible = true;
};
OptimizeM optimize_M(double bTau3, double vr2);

// Exact checks in rational arithmetic.
using Rational = boost::rational<long long>;
Rational highdim_threshold(int n);
Verdict certify_highdim_exact(Rational C1, Rational C2, int n);
// (M+1/2)^2/M * bt + 2(M+1/2) * vr
Rational ellipse_lhs(Rational M, Rational bt, Rational vr);

}  // namespace magvir
