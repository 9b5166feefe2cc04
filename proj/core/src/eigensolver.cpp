#include "wflow/eigensolver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wflow {

namespace {

// Interior-point tridiagonal eigensolve, Dirichlet walls at grid.a, grid.b.
void solve_fd(const PotentialModel& model, int k, const SpatialGrid& grid,
              const UnitsConfig& units, std::vector<double>& energies,
              std::vector<std::vector<double>>& states) {
    const int m = grid.n - 2; // interior points
    if (k > m) throw std::invalid_argument("solve_bound_states: more states than grid points");
    const double h = grid.dx();
    const double kin = units.hbar * units.hbar / (2.0 * units.mass * h * h);

    std::vector<double> diag(m), off(m - 1, -kin);
    for (int i = 0; i < m; ++i) {
        const double x = grid.x(i + 1);
        if (!model.contains(x))
            throw std::domain_error("solve_bound_states: grid reaches outside the potential domain");
        diag[i] = 2.0 * kin + model.eval(x);
    }

    std::vector<double> w(m), z(static_cast<size_t>(m) * k);
    std::vector<lapack_int> isuppz(2 * static_cast<size_t>(k));
    lapack_int found = 0;
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', m, diag.data(), off.data(), 0.0,
                                     0.0, 1, k, 0.0, &found, w.data(), z.data(), m, isuppz.data());
    if (info != 0) throw std::runtime_error("stevr failed, info=" + std::to_string(info));
    if (found < k) throw std::runtime_error("stevr returned fewer eigenpairs than requested");

    energies.assign(w.begin(), w.begin() + k);
    states.assign(k, std::vector<double>(grid.n, 0.0));
    for (int n = 0; n < k; ++n) {
        auto& psi = states[n];
        for (int i = 0; i < m; ++i) psi[i + 1] = z[static_cast<size_t>(n) * m + i];

        // L2-normalize with the grid measure, then fix the overall sign so
        // the outermost right lobe is positive.
        double norm2 = 0.0;
        for (double v : psi) norm2 += v * v;
        const double scale = 1.0 / std::sqrt(norm2 * h);
        for (double& v : psi) v *= scale;

        double peak = 0.0;
        for (double v : psi) peak = std::max(peak, std::abs(v));
        int i_right = grid.n - 1;
        while (i_right > 0 && std::abs(psi[i_right]) < 0.5 * peak) --i_right;
        if (psi[i_right] < 0.0)
            for (double& v : psi) v = -v;
    }
}

} // namespace

int count_nodes(const std::vector<double>& psi) {
    double peak = 0.0;
    for (double v : psi) peak = std::max(peak, std::abs(v));
    const double floor = 1e-8 * peak;
    int nodes = 0;
    double last = 0.0;
    for (double v : psi) {
        if (std::abs(v) < floor) continue;
        if (last != 0.0 && v * last < 0.0) ++nodes;
        last = v;
    }
    return nodes;
}

EigenstateBasis solve_bound_states(const PotentialModel& model, int k, const SpatialGrid& grid,
                                   const UnitsConfig& units, const SolveOptions& opts) {
    return solve_bound_states_report(model, k, grid, units, opts).basis;
}

SolveReport solve_bound_states_report(const PotentialModel& model, int k, const SpatialGrid& grid,
                                      const UnitsConfig& units, const SolveOptions& opts) {
    if (k < 1) throw std::invalid_argument("solve_bound_states: k must be >= 1");
    if (auto count = bound_state_count(model); count && k > *count)
        throw std::invalid_argument("solve_bound_states: only " + std::to_string(*count) +
                                    " bound states exist");

    SolveReport report;
    EigenstateBasis& basis = report.basis;
    basis.model = model;
    basis.units = units;
    basis.grid = grid;
    basis.k = k;
    solve_fd(model, k, grid, units, basis.energies, basis.states);

    basis.edge_amplitude = 0.0;
    for (const auto& psi : basis.states)
        basis.edge_amplitude =
            std::max({basis.edge_amplitude, std::abs(psi[1]), std::abs(psi[grid.n - 2])});
    if (basis.edge_amplitude > opts.edge_threshold)
        throw std::runtime_error("solve_bound_states: grid too small, boundary amplitude " +
                                 std::to_string(basis.edge_amplitude));

    basis.splines.reserve(k);
    for (const auto& psi : basis.states) basis.splines.emplace_back(grid.a, grid.dx(), psi);

    if (opts.richardson) {
        std::vector<double> e2;
        std::vector<std::vector<double>> s2;
        SpatialGrid fine = grid;
        fine.n = grid.n * 2;
        solve_fd(model, k, fine, units, e2, s2);
        report.richardson_drift.resize(k);
        for (int n = 0; n < k; ++n) {
            const double extrap = (4.0 * e2[n] - basis.energies[n]) / 3.0;
            report.richardson_drift[n] = std::abs(basis.energies[n] - extrap);
        }
    }
    return report;
}

double closed_form_energy(const PotentialModel& model, int n) {
    if (n < 0) throw std::invalid_argument("closed_form_energy: n must be >= 0");
    const double D = model.depth();
    switch (model.family()) {
        case PotentialFamily::harmonic:
            return n + 0.5;
        case PotentialFamily::eckart: {
            const double root = std::sqrt(1.0 + 16.0 * D * D);
            return ((root + 1.0) * (2.0 * n + 1.0) + 2.0 * n * n) / (8.0 * D);
        }
        case PotentialFamily::rosen_morse: {
            const double root = std::sqrt(1.0 + 16.0 * D * D);
            return ((root - 1.0) * (2.0 * n + 1.0) - 2.0 * n * n) / (8.0 * D);
        }
        case PotentialFamily::morse: {
            const double q = 1.0 - (2.0 * n + 1.0) / (4.0 * D);
            return D * (1.0 - q * q);
        }
        case PotentialFamily::polynomial:
            throw std::invalid_argument("closed_form_energy: none for polynomial models");
    }
    throw std::logic_error("unreachable");
}

std::optional<long> bound_state_count(const PotentialModel& model) {
    const double D = model.depth();
    switch (model.family()) {
        case PotentialFamily::harmonic:
        case PotentialFamily::eckart:
        case PotentialFamily::polynomial:
            return std::nullopt;
        case PotentialFamily::rosen_morse:
            return static_cast<long>(std::floor(0.5 * std::sqrt(1.0 + 16.0 * D * D) + 0.5));
        case PotentialFamily::morse:
            return static_cast<long>(std::floor(2.0 * D + 0.5));
    }
    throw std::logic_error("unreachable");
}

double revolution_time(const EigenstateBasis& basis, int m, int n) {
    if (m < 0 || n < 0 || m >= basis.k || n >= basis.k)
        throw std::invalid_argument("revolution_time: state index outside basis");
    const double gap = std::abs(basis.energies[n] - basis.energies[m]);
    if (gap < 1e-12)
        throw std::invalid_argument("revolution_time: degenerate pair");
    return 2.0 * std::numbers::pi * basis.units.hbar / gap;
}

double revolution_time_closed_form(const PotentialModel& model, int m, int n,
                                   const UnitsConfig& units) {
    const double gap = std::abs(closed_form_energy(model, n) - closed_form_energy(model, m));
    if (gap < 1e-12) throw std::invalid_argument("revolution_time: degenerate pair");
    return 2.0 * std::numbers::pi * units.hbar / gap;
}

} // namespace wflow
