#pragma once

#include <array>
#include <optional>
#include <vector>

#include "wflow/potential.hpp"
#include "wflow/wigner.hpp"

namespace wflow {

// Phase-space current (J_x, J_p) on the same lattice as the field it was
// built from.
struct FlowField {
    PhaseSpaceGrid grid;
    UnitsConfig units;
    double time = 0.0;
    int truncation_order = 0;
    double support_lo = 0.0;
    double support_hi = 0.0;
    std::vector<double> jx;
    std::vector<double> jp;
    // max |contribution to J_p| of each series term l = 0..L; identically
    // vanishing terms (harmonic beyond l=0) record 0.
    std::vector<double> term_max;
    // |first omitted series term| per site, the local truncation error
    // gauge of J_p. All zero when the series terminates at or below the
    // cutoff (harmonic, polynomial with power <= 2L+2): the flow is exact
    // and has no truncation fringes.
    std::vector<double> tail;

    double at_jx(int i, int j) const { return jx[grid.index(i, j)]; }
    double at_jp(int i, int j) const { return jp[grid.index(i, j)]; }
};

struct FlowOptions {
    // highest series term l included in J_p; l=0 is the classical force term
    int truncation_order = 10;
    SpectralFilter filter{};
};

// J_x = p W / M
// J_p = -sum_{l=0..L} (-1)^l (hbar/2)^{2l} / (2l+1)! * d^{2l}W/dp^{2l} * V^(2l+1)(x)
FlowField flow_field(const WignerField& field, const PotentialModel& model,
                     const FlowOptions& options = {});

// dJx/dx + dJp/dp, spectral in both directions
std::vector<double> divergence(const FlowField& flow);

// max |dW/dt + div J| over the interior subwindow; margin < 0 picks
// max(4, nx/16) cells, which keeps wrap-around artifacts of the spectral
// x-derivative out of the reported number.
double continuity_residual(const WignerField& dwdt, const FlowField& flow, int margin = -1);
std::vector<double> continuity_residual_field(const WignerField& dwdt, const FlowField& flow);

// Third-order estimate of the origin-vortex displacement for a weakly
// anharmonic minimum: delta_x = (hbar^2/4) alpha3 (d2W/dp2 / W)(0,0),
// both factors interpolated at the true origin. Exactly 0 for potentials
// without a cubic Taylor term; empty when the field vanishes at the origin
// (the estimate has a pole there).
std::optional<double> vortex_displacement_estimate(const WignerField& field,
                                                  const PotentialModel& model);

// Same displacement evaluated against the closed-form harmonic reference
// state Psi_{m,n}(t; theta) instead of a sampled field, so it traces the
// analytic curve delta_x(t). The interference phase advances at the model's
// closed-form level gap when one exists, otherwise at (n - m) times the
// curvature frequency sqrt(V''(0)/M).
std::optional<double> vortex_displacement_curve(const PotentialModel& model, int m, int n,
                                               double theta, double t,
                                               const UnitsConfig& units = {});

// One field line of the frozen flow, arc-length stepped with classic
// fourth-order Runge-Kutta on the normalized direction J/|J|; each sample
// records (x, p, |J|) so callers can color by local speed.
struct Streamline {
    std::vector<std::array<double, 3>> points;
    double length = 0.0;
    // seed sits where |J| is below the stagnation floor; points stays empty
    bool stagnant = false;
    // integration stopped by leaving the lattice window
    bool left_window = false;
    // integration stopped by the speed floor away from the seed
    bool stalled = false;
};

// speed_floor is relative to the lattice maximum of |J|.
Streamline integrate_streamline(const FlowField& flow, double x0, double p0, double step,
                                double max_length, double speed_floor = 1e-6);

} // namespace wflow
