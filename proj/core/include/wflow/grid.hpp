#pragma once

#include <stdexcept>
#include <vector>

#include "wflow/potential.hpp"
#include "wflow/units.hpp"

namespace wflow {

// Uniform spatial grid, endpoints inclusive. Used by the eigensolver;
// boundary samples carry the Dirichlet zeros.
struct SpatialGrid {
    double a = 0.0, b = 0.0;
    int n = 0;

    static SpatialGrid uniform(double a, double b, int n);

    double dx() const { return (b - a) / (n - 1); }
    double x(int i) const { return a + i * dx(); }
    std::vector<double> points() const;
};

// Phase-space grid in FFT convention: n points cover [lo, hi) with spacing
// (hi-lo)/n, so for symmetric bounds both x = 0 and p = 0 are grid lines.
// The p spacing ties to the shift-FFT of the transform: sampling the shift
// variable at dy gives p_max = pi*hbar/(2*dy).
struct PhaseSpaceGrid {
    int nx = 0, np = 0;
    double x_lo = 0.0, x_hi = 0.0;
    double p_lo = 0.0, p_hi = 0.0;

    static PhaseSpaceGrid make(double x_lo, double x_hi, double p_lo, double p_hi, int nx, int np);

    double dx() const { return (x_hi - x_lo) / nx; }
    double dp() const { return (p_hi - p_lo) / np; }
    double x(int i) const { return x_lo + i * dx(); }
    double p(int j) const { return p_lo + j * dp(); }
    int index(int i, int j) const { return i * np + j; }
    long size() const { return static_cast<long>(nx) * np; }
    double cell() const { return dx() < dp() ? dx() : dp(); }

    // Nearest grid index of a coordinate (clamped).
    int ix(double x) const;
    int jp(double p) const;

    bool operator==(const PhaseSpaceGrid&) const = default;
};

// Family-aware defaults. The wall families constrain the windows: Eckart is
// only defined between its poles, Rosen-Morse n=3 needs +-18 before its tail
// clears 1e-10, Morse leans right.
SpatialGrid default_solver_grid(const PotentialModel& model, int n = 2048);
PhaseSpaceGrid default_phase_grid(const PotentialModel& model, int nx = 512, int np = 512);

} // namespace wflow
