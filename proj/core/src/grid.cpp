#include "wflow/grid.hpp"

#include "wflow/eigensolver.hpp"

#include <algorithm>
#include <cmath>

namespace wflow {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// March outward from x0 accumulating the WKB decay exponent
// integral of sqrt(2(V - E)) until it reaches `budget`; an exponent of 28
// puts the boundary amplitude near 7e-13, safely under the solver's 1e-10
// decay requirement.
double wkb_edge(const PotentialModel& model, double energy, double x0, double direction,
                double budget) {
    const double h = 0.05;
    double x = x0, acc = 0.0;
    while (acc < budget) {
        const double v = model.eval(x);
        if (v > energy) acc += std::sqrt(2.0 * (v - energy)) * h;
        x += direction * h;
    }
    return x;
}

} // namespace

SpatialGrid SpatialGrid::uniform(double a, double b, int n) {
    if (!(b > a)) throw std::invalid_argument("spatial grid: need b > a");
    if (n < 64 || !power_of_two(n))
        throw std::invalid_argument("spatial grid: n must be a power of two >= 64");
    return SpatialGrid{a, b, n};
}

std::vector<double> SpatialGrid::points() const {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = x(i);
    return xs;
}

PhaseSpaceGrid PhaseSpaceGrid::make(double x_lo, double x_hi, double p_lo, double p_hi, int nx,
                                    int np) {
    if (!(x_hi > x_lo) || !(p_hi > p_lo)) throw std::invalid_argument("phase grid: empty extent");
    if (nx < 64 || np < 64 || !power_of_two(nx) || !power_of_two(np))
        throw std::invalid_argument("phase grid: nx, np must be powers of two >= 64");
    return PhaseSpaceGrid{nx, np, x_lo, x_hi, p_lo, p_hi};
}

int PhaseSpaceGrid::ix(double xv) const {
    int i = static_cast<int>(std::lround((xv - x_lo) / dx()));
    return std::clamp(i, 0, nx - 1);
}

int PhaseSpaceGrid::jp(double pv) const {
    int j = static_cast<int>(std::lround((pv - p_lo) / dp()));
    return std::clamp(j, 0, np - 1);
}

SpatialGrid default_solver_grid(const PotentialModel& model, int n) {
    switch (model.family()) {
        case PotentialFamily::eckart: {
            const double half = std::min(0.97 * model.domain_max(), 10.0);
            return SpatialGrid::uniform(-half, half, n);
        }
        case PotentialFamily::rosen_morse:
            return SpatialGrid::uniform(-18.0, 18.0, n);
        case PotentialFamily::morse: {
            // the asymmetric well's reach depends on depth: size the box so
            // the fourth state's WKB tails decay past the 1e-10 edge bound
            const long count = bound_state_count(model).value_or(0);
            if (count < 1) return SpatialGrid::uniform(-7.0, 13.0, n);
            const int nref = static_cast<int>(std::min<long>(3, count - 1));
            const double e = closed_form_energy(model, nref);
            const double a = std::min(-7.0, std::floor(2.0 * wkb_edge(model, e, 0.0, -1.0, 28.0)) / 2.0);
            const double b = std::max(13.0, std::ceil(2.0 * wkb_edge(model, e, 0.0, +1.0, 28.0)) / 2.0);
            return SpatialGrid::uniform(a, b, n);
        }
        default:
            return SpatialGrid::uniform(-10.0, 10.0, n);
    }
}

PhaseSpaceGrid default_phase_grid(const PotentialModel& model, int nx, int np) {
    double x_half = 5.0;
    double x_lo, x_hi;
    switch (model.family()) {
        case PotentialFamily::eckart:
            x_half = std::min(5.0, 0.9 * model.domain_max());
            x_lo = -x_half;
            x_hi = x_half;
            break;
        case PotentialFamily::morse:
            x_lo = -4.0;
            x_hi = 6.0;
            break;
        default:
            x_lo = -x_half;
            x_hi = x_half;
            break;
    }
    return PhaseSpaceGrid::make(x_lo, x_hi, -5.0, 5.0, nx, np);
}

} // namespace wflow
