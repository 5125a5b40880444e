#pragma once

#include <memory>
#include <string>
#include <vector>

#include "magvir/linalg.hpp"

namespace magvir {

enum class Scheme { spectral, fd4 };

struct GridSpec {
    int n = 3;
    int N = 16;
    double L = 8.0;       // domain [-L, L)^n
    double offset = 0.5;  // node i sits at -L + (i + offset) h
    Scheme scheme = Scheme::spectral;

    double h() const { return 2.0 * L / N; }
    double cell() const;
    long long size() const;
    void validate() const;
    std::string signature() const;
    bool operator==(const GridSpec& o) const {
        return n == o.n && N == o.N && L == o.L && offset == o.offset && scheme == o.scheme;
    }
};

struct Field {
    GridSpec grid;
    CVec values;
};

struct WaveState {
    Field u;
    Field ut;
};

// FFT plans, node coordinates and derivative symbols for one grid.
class SpectralOps {
public:
    explicit SpectralOps(const GridSpec& g);
    ~SpectralOps();
    SpectralOps(const SpectralOps&) = delete;
    SpectralOps& operator=(const SpectralOps&) = delete;

    const GridSpec& grid() const { return g_; }
    long long size() const { return size_; }
    int n() const { return g_.n; }

    void forward(const cplx* in, cplx* out) const;
    void inverse(const cplx* in, cplx* out) const;  // normalized
    CVec forward(const CVec& u) const;
    CVec inverse(const CVec& uh) const;

    // D_j u with the grid's scheme (Nyquist symbol zero for spectral).
    CVec derivative(const CVec& u, int axis) const;
    std::vector<CVec> gradient(const CVec& u) const;
    CVec laplacian(const CVec& u) const;  // sum_j D_j D_j
    // Multiply the Fourier coefficients by s(|kappa|^2) where kappa is the derivative symbol.
    template <class F>
    CVec apply_radial_symbol(const CVec& u, F&& s) const {
        CVec uh = forward(u);
        for (long long i = 0; i < size_; ++i) uh[i] *= s(ksq_[i]);
        return inverse(uh);
    }

    const Vec& coord(int axis) const { return x_[axis]; }
    const Vec& radius() const { return r_; }
    const Vec& ksq() const { return ksq_; }
    const Vec& symbol(int axis) const { return kap_[axis]; }  // real kappa_j on the 1-D axis
    Vec point(long long idx) const;
    long long axis_index(long long idx, int axis) const;
    double dot_re(const CVec& a, const CVec& b) const;  // Re <a,b> with cell weight
    cplx inner(const CVec& a, const CVec& b) const;      // <a,b> = cell * sum conj(a) b
    double norm2(const CVec& a) const;                   // cell * sum |a|^2

private:
    GridSpec g_;
    long long size_ = 0;
    void* plan_f_ = nullptr;
    void* plan_b_ = nullptr;
    std::vector<Vec> x_;
    Vec r_;
    std::vector<Vec> kap_;
    Vec ksq_;
    std::vector<long long> stride_;
};

using OpsPtr = std::shared_ptr<const SpectralOps>;
OpsPtr make_ops(const GridSpec& g);

Field make_field(const GridSpec& g, const CVec& v);
double l2_norm(const Field& f);

// Mass fraction outside the ball of radius L/2.
double leakage_fraction(const SpectralOps& ops, const CVec& u);
// Relative L2 weight of Fourier modes with some |k_j| above 2/3 of the axis maximum.
double spectral_tail(const SpectralOps& ops, const CVec& u);

}  // namespace magvir
