#pragma once

#include <memory>
#include <string>
#include <vector>

#include "magvir/hamiltonian.hpp"

namespace magvir {

enum class Integrator { crank_nicolson, exact_dense, wave_leapfrog, free_spectral };
std::string to_string(Integrator i);
Integrator integrator_from_string(const std::string& s);

struct EvolutionConfig {
    double dt = 0.01;
    int steps = 100;
    Integrator integrator = Integrator::crank_nicolson;
    double solve_tol = 1e-14;
    int max_iterations = 1000;
    int store_every = 1;
    int monitor_every = 1;
    bool monitors = true;
    double tail_tol = 1e-8;   // spectral tail of the datum
    double leak_tol = 1e-3;   // mass fraction allowed outside |x| <= L/2
    double negative_tol = 1e-9;
};

struct ConservationRow {
    double t = 0;
    double mass = 0;
    double energy = 0;
};

struct Trajectory {
    GridSpec grid;
    bool wave = false;
    std::vector<double> times;
    std::vector<CVec> u;
    std::vector<CVec> ut;  // wave only
    std::vector<ConservationRow> log;
    std::string convention = "i u_t = H u";
    std::string breach;  // non-empty when a monitor stopped the run
    int max_solver_iterations = 0;
};

// Eigendecomposition of the dense H, shared by the exact-dense paths.
struct DenseSpectrum {
    Vec evals;
    CMat evecs;
};
std::shared_ptr<const DenseSpectrum> dense_spectrum(const MagneticOperator& H, long long cap = 4096);

Trajectory evolve_schrodinger(const CVec& f, const MagneticOperator& H, const EvolutionConfig& cfg,
                              std::shared_ptr<const DenseSpectrum> spec = nullptr);
Trajectory evolve_wave(const CVec& f, const CVec& g, const MagneticOperator& H,
                       const EvolutionConfig& cfg, std::shared_ptr<const DenseSpectrum> spec = nullptr);

// Field-level wrappers.
Trajectory evolve_schrodinger(const Field& f, const PotentialSpec& spec, const EvolutionConfig& cfg);
Trajectory evolve_wave(const WaveState& s, const PotentialSpec& spec, const EvolutionConfig& cfg);

// Free wave with source: u = cos(tw) f + sin(tw)/w g + int_0^t sin((t-s)w)/w F(s) ds, w = sqrt(-Lap).
// F sampled at t_k = k dt, k = 0..K; F is taken piecewise linear in time and the kernel integrated
// exactly. Returns u and u_t at every t_k.
Trajectory duhamel_free_wave(const CVec& f, const CVec& g, const std::vector<CVec>& F, double dt,
                             const SpectralOps& ops);

// Conjugate gradients for (I + a^2 H^2) x = b, returns iterations.
int solve_cn_normal(const MagneticOperator& H, double a, const CVec& b, CVec& x, double tol, int max_it);

}  // namespace magvir
