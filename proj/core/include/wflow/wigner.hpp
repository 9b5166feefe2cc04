#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "wflow/eigensolver.hpp"
#include "wflow/grid.hpp"
#include "wflow/units.hpp"

namespace wflow {

// Phase-space distribution W(x,p) = (1/pi hbar) Int dy psi*(x+y) psi(x-y)
// e^{2ipy/hbar} and its two-state superpositions
//
//   W(t) = cos^2(th) W_mm + sin^2(th) W_nn
//        + 2 cos(th) sin(th) Re[e^{-i(E_n-E_m)t/hbar} W_mn].
//
// Numerically each x-row is the FFT of the sampled shift product; the y
// spacing is tied to the requested p window (dy = pi*hbar / (np*dp)), so the
// transform lands exactly on the grid's p lattice. The shift product of
// states sampled on [a,b] vanishes for |y| > min(b-x, x-a); that compact
// support is retained on the field and drives the spectral-derivative
// band limit.

struct WignerField {
    PhaseSpaceGrid grid;
    UnitsConfig units;
    double time = 0.0;
    std::string source;
    double support_lo = 0.0, support_hi = 0.0;
    std::vector<double> v;

    double at(int i, int j) const { return v[grid.index(i, j)]; }
    double& at(int i, int j) { return v[grid.index(i, j)]; }
    double max_abs() const;
};

struct CrossWignerField {
    PhaseSpaceGrid grid;
    UnitsConfig units;
    int bra = 0, ket = 0;
    double support_lo = 0.0, support_hi = 0.0;
    double p_edge_amplitude = 0.0; // |W| at the p-window edge, aliasing gauge
    std::vector<std::complex<double>> v;

    std::complex<double> at(int i, int j) const { return v[grid.index(i, j)]; }
};

CrossWignerField wigner_transform(const EigenstateBasis& basis, int bra, int ket,
                                  const PhaseSpaceGrid& grid);

// Real part of a diagonal cross-field; throws if the imaginary residue
// exceeds 1e-12 of the field scale.
WignerField diagonal_field(const CrossWignerField& cross);

class TwoStateEngine {
  public:
    TwoStateEngine(const EigenstateBasis& basis, int m, int n, const PhaseSpaceGrid& grid);

    const EigenstateBasis& basis() const { return basis_; }
    const PhaseSpaceGrid& grid() const { return grid_; }
    int m() const { return m_; }
    int n() const { return n_; }
    double omega() const { return omega_; }
    double period() const;

    WignerField field(double theta, double t) const;
    WignerField time_derivative(double theta, double t) const;

    const WignerField& wmm() const { return wmm_; }
    const WignerField& wnn() const { return wnn_; }
    const CrossWignerField& wmn() const { return wmn_; }

  private:
    EigenstateBasis basis_;
    PhaseSpaceGrid grid_;
    int m_, n_;
    double omega_;
    WignerField wmm_, wnn_;
    CrossWignerField wmn_;
};

WignerField superposition_field(const EigenstateBasis& basis, int m, int n, double theta, double t,
                                const PhaseSpaceGrid& grid);

struct SpectralFilter {
    bool support_limit = true;   // per-row band limit from the y-support
    double fraction = 2.0 / 3.0; // outer cap, fraction of Nyquist
};

// Spectral d^order/dp^order along each x-row.
WignerField momentum_derivative(const WignerField& field, int order,
                                const SpectralFilter& filter = {});

// Spectral d/dx along each p-column (no filter; first order only needed).
std::vector<double> spatial_derivative_x(const PhaseSpaceGrid& grid,
                                         const std::vector<double>& values);
std::vector<double> spectral_derivative_rows(const PhaseSpaceGrid& grid,
                                             const std::vector<double>& values, int order,
                                             double eta_cap,
                                             const std::vector<double>& row_eta_limit);

double normalization(const WignerField& field);
std::vector<double> marginal_x(const WignerField& field); // Int W dp per x
std::vector<double> marginal_p(const WignerField& field); // Int W dx per p

// |Psi(x,t)|^2 and |Phi(p,t)|^2 of the two-state superposition, computed
// from the basis states directly (marginal references).
std::vector<double> position_density(const EigenstateBasis& basis, int m, int n, double theta,
                                     double t, const PhaseSpaceGrid& grid);
std::vector<double> momentum_density(const EigenstateBasis& basis, int m, int n, double theta,
                                     double t, const PhaseSpaceGrid& grid);

namespace oracle {

// Closed forms for the unit-frequency harmonic oscillator (M = k = 1):
//   W_nn = (-1)^n/(pi hbar) e^{-2H/hbar} L_n(4H/(2hbar))..., H = (x^2+p^2)/2
//   W_mn = (-1)^m/(pi hbar) sqrt(m!/n!) (sqrt(2/hbar)(x-ip))^{n-m}
//          e^{-(x^2+p^2)/hbar} L_m^{n-m}(2(x^2+p^2)/hbar),  n >= m.
std::complex<double> harmonic_wigner_mn(int m, int n, double x, double p, double hbar = 1.0);
double harmonic_wigner_nn(int n, double x, double p, double hbar = 1.0);

WignerField harmonic_field_nn(int n, const PhaseSpaceGrid& grid, double hbar = 1.0);
CrossWignerField harmonic_cross_mn(int m, int n, const PhaseSpaceGrid& grid, double hbar = 1.0);

// Analytic superposition with harmonic energies E_n = (n + 1/2) hbar.
WignerField harmonic_superposition(int m, int n, double theta, double t,
                                   const PhaseSpaceGrid& grid, double hbar = 1.0);

// W and d2W/dp2 at the origin of the harmonic-reference superposition, with
// the oscillating cross term at the supplied angular frequency.
struct OriginData {
    double w = 0.0;
    double d2p = 0.0;
};
OriginData harmonic_origin_data(int m, int n, double theta, double t, double omega,
                                double hbar = 1.0);

} // namespace oracle

} // namespace wflow
