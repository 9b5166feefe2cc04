#pragma once

#include <optional>
#include <vector>

#include "wflow/grid.hpp"
#include "wflow/potential.hpp"
#include "wflow/spline.hpp"
#include "wflow/units.hpp"

namespace wflow {

// Lowest k bound states of -hbar^2/(2M) d2/dx2 + V on a hard-wall grid:
// three-point stencil, symmetric tridiagonal eigen-decomposition (LAPACK
// stevr), eigenvectors L2-normalized with the grid measure.
//
// Sign convention: the outermost right lobe of each state is positive, the
// usual choice for real 1-D eigenfunctions (Hermite-like tails). Node count
// of state n is n.

struct EigenstateBasis {
    PotentialModel model = PotentialModel::harmonic();
    UnitsConfig units;
    SpatialGrid grid;
    int k = 0;
    std::vector<double> energies;            // ascending
    std::vector<std::vector<double>> states; // [k][grid.n], boundary entries zero
    std::vector<CubicSpline> splines;        // one per state
    double edge_amplitude = 0.0;             // max |psi| at outermost interior samples

    double psi(int n, double x) const { return splines.at(n)(x); }
};

struct SolveOptions {
    double edge_threshold = 1e-10; // boundary decay requirement
    bool richardson = false;       // re-solve at half spacing, report drift
};

struct SolveReport {
    EigenstateBasis basis;
    // |E - E_extrapolated| per state when the Richardson check ran.
    std::vector<double> richardson_drift;
};

EigenstateBasis solve_bound_states(const PotentialModel& model, int k, const SpatialGrid& grid,
                                   const UnitsConfig& units = {},
                                   const SolveOptions& opts = {});

SolveReport solve_bound_states_report(const PotentialModel& model, int k, const SpatialGrid& grid,
                                      const UnitsConfig& units = {},
                                      const SolveOptions& opts = {});

// Closed-form spectra of the wall families (hbar = M = 1 scaling):
//   eckart       E_n = ((sqrt(1+16D^2)+1)(2n+1) + 2n^2) / (8D)
//   rosen-morse  E_n = ((sqrt(1+16D^2)-1)(2n+1) - 2n^2) / (8D)
//   morse        E_n = D (1 - (1 - (2n+1)/(4D))^2)
//   harmonic     E_n = n + 1/2
// Errors for polynomial (no closed form).
double closed_form_energy(const PotentialModel& model, int n);

// Number of bound states; nullopt means unbounded (harmonic, eckart) or
// grid-box semantics (polynomial).
std::optional<long> bound_state_count(const PotentialModel& model);

// Revolution time T_{m,n} = 2 pi hbar / |E_n - E_m| from solver energies.
double revolution_time(const EigenstateBasis& basis, int m, int n);
double revolution_time_closed_form(const PotentialModel& model, int m, int n,
                                   const UnitsConfig& units = {});

int count_nodes(const std::vector<double>& psi);

} // namespace wflow
