#include "wflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wflow/eigensolver.hpp"
#include "wflow/stagnation.hpp"

namespace wflow {

FlowField flow_field(const WignerField& field, const PotentialModel& model,
                     const FlowOptions& options) {
    const int L = options.truncation_order;
    if (L < 0 || L > 50) throw std::invalid_argument("flow truncation order must be in [0, 50]");

    const PhaseSpaceGrid& grid = field.grid;
    const double hbar = field.units.hbar;
    const double mass = field.units.mass;

    FlowField flow;
    flow.grid = grid;
    flow.units = field.units;
    flow.time = field.time;
    flow.truncation_order = L;
    flow.support_lo = field.support_lo;
    flow.support_hi = field.support_hi;
    flow.jx.resize(grid.size());
    flow.jp.assign(grid.size(), 0.0);
    flow.term_max.assign(L + 1, 0.0);

    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.np; ++j)
            flow.jx[grid.index(i, j)] = grid.p(j) * field.at(i, j) / mass;

    // V^(2l+1) on the x lattice, one column per term; a term whose odd
    // derivative vanishes on the whole window costs no transform.
    std::vector<double> vderiv(grid.nx);
    double coeff = 1.0; // (-1)^l (hbar/2)^{2l} / (2l+1)!
    for (int l = 0; l <= L; ++l) {
        if (l > 0) coeff *= -(hbar * hbar / 4.0) / (2.0 * l * (2.0 * l + 1.0));
        const int k = 2 * l + 1;
        double vmax = 0.0;
        for (int i = 0; i < grid.nx; ++i) {
            vderiv[i] = model.derivative(grid.x(i), k);
            vmax = std::max(vmax, std::abs(vderiv[i]));
        }
        if (vmax == 0.0) continue;

        const WignerField* dw = &field;
        WignerField scratch;
        if (l > 0) {
            scratch = momentum_derivative(field, 2 * l, options.filter);
            dw = &scratch;
        }
        double tmax = 0.0;
        for (int i = 0; i < grid.nx; ++i) {
            const double f = -coeff * vderiv[i];
            for (int j = 0; j < grid.np; ++j) {
                const double c = f * dw->at(i, j);
                flow.jp[grid.index(i, j)] += c;
                tmax = std::max(tmax, std::abs(c));
            }
        }
        flow.term_max[l] = tmax;
    }

    // first omitted term l = L+1, the truncation-error gauge
    flow.tail.assign(grid.size(), 0.0);
    {
        const double coeff_next = coeff * -(hbar * hbar / 4.0) /
                                  (2.0 * (L + 1.0) * (2.0 * L + 3.0));
        std::vector<double> vnext(grid.nx);
        double vmax = 0.0;
        for (int i = 0; i < grid.nx; ++i) {
            vnext[i] = model.derivative(grid.x(i), 2 * L + 3);
            vmax = std::max(vmax, std::abs(vnext[i]));
        }
        if (vmax > 0.0) {
            const WignerField dnext = momentum_derivative(field, 2 * L + 2, options.filter);
            for (int i = 0; i < grid.nx; ++i)
                for (int j = 0; j < grid.np; ++j)
                    flow.tail[grid.index(i, j)] =
                        std::abs(coeff_next * vnext[i] * dnext.at(i, j));
        }
    }
    return flow;
}

std::vector<double> divergence(const FlowField& flow) {
    std::vector<double> div = spatial_derivative_x(flow.grid, flow.jx);

    WignerField jp;
    jp.grid = flow.grid;
    jp.units = flow.units;
    jp.support_lo = flow.support_lo;
    jp.support_hi = flow.support_hi;
    jp.v = flow.jp;
    // multiplying W by functions of x or by p does not widen the p-band,
    // so the same per-row limit applies to J_p
    const WignerField djp = momentum_derivative(jp, 1);
    for (size_t k = 0; k < div.size(); ++k) div[k] += djp.v[k];
    return div;
}

std::vector<double> continuity_residual_field(const WignerField& dwdt, const FlowField& flow) {
    if (dwdt.grid.size() != flow.grid.size())
        throw std::invalid_argument("continuity residual: mismatched lattices");
    std::vector<double> r = divergence(flow);
    for (size_t k = 0; k < r.size(); ++k) r[k] += dwdt.v[k];
    return r;
}

double continuity_residual(const WignerField& dwdt, const FlowField& flow, int margin) {
    const PhaseSpaceGrid& grid = flow.grid;
    if (margin < 0) margin = std::max(4, grid.nx / 16);
    if (2 * margin >= grid.nx || 2 * margin >= grid.np)
        throw std::invalid_argument("continuity residual: margin swallows the window");
    const std::vector<double> r = continuity_residual_field(dwdt, flow);
    double m = 0.0;
    for (int i = margin; i < grid.nx - margin; ++i)
        for (int j = margin; j < grid.np - margin; ++j)
            m = std::max(m, std::abs(r[grid.index(i, j)]));
    return m;
}

std::optional<double> vortex_displacement_estimate(const WignerField& field,
                                                   const PotentialModel& model) {
    const double alpha3 = model.derivative(0.0, 3) / 6.0;
    if (alpha3 == 0.0) return 0.0;

    const double w0 = bilinear(field.grid, field.v, 0.0, 0.0);
    if (std::abs(w0) < 1e-6 * field.max_abs()) return std::nullopt;

    const WignerField d2 = momentum_derivative(field, 2);
    const double hbar = field.units.hbar;
    return hbar * hbar / 4.0 * alpha3 * bilinear(field.grid, d2.v, 0.0, 0.0) / w0;
}

std::optional<double> vortex_displacement_curve(const PotentialModel& model, int m, int n,
                                                double theta, double t,
                                                const UnitsConfig& units) {
    const double alpha3 = model.derivative(0.0, 3) / 6.0;
    if (alpha3 == 0.0) return 0.0;

    double gap;
    if (model.family() == PotentialFamily::polynomial) {
        gap = (n - m) * std::sqrt(std::max(model.derivative(0.0, 2), 0.0) / units.mass);
    } else {
        gap = closed_form_energy(model, n) - closed_form_energy(model, m);
    }
    const oracle::OriginData o =
        oracle::harmonic_origin_data(m, n, theta, t, gap / units.hbar, units.hbar);
    if (o.w == 0.0) return std::nullopt;
    return units.hbar * units.hbar / 4.0 * alpha3 * o.d2p / o.w;
}

Streamline integrate_streamline(const FlowField& flow, double x0, double p0, double step,
                                double max_length, double speed_floor) {
    if (step <= 0.0 || max_length <= 0.0)
        throw std::invalid_argument("streamline: step and max_length must be positive");

    const PhaseSpaceGrid& grid = flow.grid;
    double jmax = 0.0;
    for (size_t k = 0; k < flow.jx.size(); ++k)
        jmax = std::max(jmax, std::hypot(flow.jx[k], flow.jp[k]));
    const double floor = speed_floor * jmax;

    const auto speed_at = [&](double x, double p) {
        return std::hypot(bilinear(grid, flow.jx, x, p), bilinear(grid, flow.jp, x, p));
    };
    // unit tangent; zero vector once the local speed drops below the floor
    const auto dir_at = [&](double x, double p, bool& dead) {
        const double jx = bilinear(grid, flow.jx, x, p);
        const double jp = bilinear(grid, flow.jp, x, p);
        const double s = std::hypot(jx, jp);
        if (s < floor || s == 0.0) {
            dead = true;
            return std::array<double, 2>{0.0, 0.0};
        }
        return std::array<double, 2>{jx / s, jp / s};
    };

    Streamline line;
    bool dead = false;
    dir_at(x0, p0, dead);
    if (dead) {
        line.stagnant = true;
        return line;
    }

    double x = x0, p = p0;
    line.points.push_back({x, p, speed_at(x, p)});
    const long max_steps = std::min<long>(static_cast<long>(max_length / step) + 1, 4000000L);
    for (long it = 0; it < max_steps && line.length < max_length; ++it) {
        const double h = std::min(step, max_length - line.length);
        const auto k1 = dir_at(x, p, dead);
        const auto k2 = dir_at(x + 0.5 * h * k1[0], p + 0.5 * h * k1[1], dead);
        const auto k3 = dir_at(x + 0.5 * h * k2[0], p + 0.5 * h * k2[1], dead);
        const auto k4 = dir_at(x + h * k3[0], p + h * k3[1], dead);
        if (dead) {
            line.stalled = true;
            break;
        }
        x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        p += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        line.length += h;
        if (x < grid.x_lo || x > grid.x_hi || p < grid.p_lo || p > grid.p_hi) {
            line.left_window = true;
            line.points.push_back({x, p, speed_at(x, p)});
            break;
        }
        line.points.push_back({x, p, speed_at(x, p)});
    }
    return line;
}

} // namespace wflow
