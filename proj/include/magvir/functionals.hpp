#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "magvir/certificates.hpp"
#include "magvir/hamiltonian.hpp"
#include "magvir/multipliers.hpp"
#include "magvir/norms.hpp"
#include "magvir/propagators.hpp"
#include "magvir/virial.hpp"

namespace magvir {

struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- smoothing -----------------------------------------------------------------------------

enum class NormalizerTag { distorted_half, energy };
std::string to_string(NormalizerTag t);

struct SmoothingOptions {
    SphereQuadrature sphere;
    double degenerate_tol = 1e-14;
    int last_sample = -1;  // use samples [0, last_sample]; -1 means all
};

struct SmoothingReport {
    bool wave = false;
    double T = 0;
    double normalizer = 0;
    std::string normalizer_tag;
    std::vector<double> radii;          // dyadic, descending from L/2 to >= 2h
    std::vector<double> local_energy;   // (1/R) int_0^T int_{|x|<=R} |grad_A u|^2 (+|u_t|^2) / normalizer
    std::vector<double> sphere_mass;    // R^-2 int_0^T oint_{|x|=R} |u|^2 / normalizer
    double sup_local_energy = 0;
    double R_star = 0;
    double K1 = 0;  // (int int |grad_A^tau u|^2 / |x| / normalizer)^(1/2)
    double K2 = 0;  // (sup_R sphere_mass)^(1/2)
    double weighted_mass = 0;  // int int |u|^2 / |x|^3 / normalizer
};

std::vector<double> dyadic_radii(const GridSpec& g);

double distorted_half_normalizer(const CVec& f, const DistortedNormEngine& engine);
double wave_energy(const MagneticOperator& H, const CVec& u, const CVec& ut);

SmoothingReport smoothing_report(const Trajectory& tr, const MagneticOperator& H, double normalizer,
                                 const std::string& tag, const SmoothingOptions& opt = {});
// Builds the normalizer from the tag (distorted Hdot^{1/2} norm of u(0), or E(0) for waves).
SmoothingReport smoothing_report(const Trajectory& tr, std::shared_ptr<const MagneticOperator> H,
                                 NormalizerTag tag, const SmoothingOptions& opt = {},
                                 const NormEngineOptions& nopt = {});

struct InterpolationSeries {
    std::vector<double> times;
    std::vector<double> values;  // |int conj(u) grad_A u . grad phi| / normalizer
    double sup = 0;
};
InterpolationSeries interpolation_boundedness(const Trajectory& tr, const MagneticOperator& H,
                                              const RadialMultiplier& m, double normalizer);

// ---- Hardy ---------------------------------------------------------------------------------

struct HardyParts {
    double weighted = 0;  // int |f|^2 / |x|^2
    double gradient = 0;  // int |grad_A f|^2
    double ratio = 0;
};
HardyParts hardy_parts(const CVec& f, const MagneticOperator& H);
double hardy_ratio(const CVec& f, const MagneticOperator& H);
double hardy_ratio(const Field& f, const PotentialSpec& spec);
double hardy_constant(int n);  // 4 / (n-2)^2

// ---- Strichartz ----------------------------------------------------------------------------

// Exponent stored as its reciprocal, so p = infinity is inv = 0.
struct Exponent {
    Rational inv{0};
    static Exponent finite(long long p) { return Exponent{Rational(1, p)}; }
    static Exponent infinity() { return Exponent{Rational(0)}; }
    static Exponent parse(const std::string& s);  // "4", "inf", "7/2"
    bool is_infinite() const { return inv.numerator() == 0; }
    double value() const;
    std::string str() const;
};

struct Admissibility {
    bool admissible = false;
    bool endpoint = false;
    std::string violated;  // empty when admissible
    Rational sigma{0};
};
Admissibility wave_admissible(Exponent p, Exponent q, int n);

struct StrichartzReport {
    Exponent p;
    Exponent q;
    int n = 3;
    bool admissible = false;
    bool endpoint = false;
    Rational sigma{0};
    double mixed_norm = 0;
    double dyadic_sum = 0;
};

// Mixed norm || |grad|^sigma u ||_{L^p_t L^q_x}. Rejects inadmissible couples (ArgumentError naming
// the constraint) and endpoint couples unless allow_endpoint.
StrichartzReport strichartz_norm(const Trajectory& tr, const SpectralOps& ops, Exponent p, Exponent q,
                                 bool allow_endpoint = false);

struct DyadicSum {
    std::vector<int> j;
    std::vector<double> norms;          // ||F_j||_{L^2_t L^2_x}
    std::vector<double> contributions;  // 2^{j/2} ||F_j||
    double total = 0;
    // contributions[j+1] / contributions[j] for consecutive j >= j_min
    std::vector<double> ratios(int j_min = 0) const;
};
// Annuli |x| in [2^j, 2^{j+1}); F sampled at the given times.
DyadicSum dyadic_source_sum(const std::vector<CVec>& F, const std::vector<double>& times, const SpectralOps& ops);

}  // namespace magvir
