#include "wflow/checks.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <stdexcept>

#include "wflow/eigensolver.hpp"
#include "wflow/io.hpp"
#include "wflow/stagnation.hpp"
#include "wflow/tracking.hpp"

namespace wflow {

bool CheckReport::all_pass() const {
    for (const auto& item : items)
        if (!item.pass) return false;
    return true;
}

namespace {

void add(CheckReport& report, const std::string& name, std::function<CheckItem()> body) {
    CheckItem item;
    item.name = name;
    try {
        item = body();
        item.name = name;
        item.pass = item.value <= item.threshold;
    } catch (const std::exception& e) {
        item.pass = false;
        item.value = std::nan("");
        item.note = e.what();
    }
    report.items.push_back(std::move(item));
}

} // namespace

CheckReport run_checks(const CheckConfig& config) {
    CheckReport report;

    CheckConfig cfg = config;
    // default spectrum scope n..n+3: the family solver domains guarantee
    // boundary decay for the lowest four states
    if (cfg.k <= cfg.n) cfg.k = cfg.n + 3;
    if (cfg.grid.nx == 0) cfg.grid = default_phase_grid(cfg.model);
    const bool harmonic = cfg.model.family() == PotentialFamily::harmonic;
    const bool closed_forms = cfg.model.family() != PotentialFamily::polynomial;

    const SpatialGrid sgrid = default_solver_grid(cfg.model, cfg.solver_n);
    const EigenstateBasis basis = solve_bound_states(cfg.model, cfg.k, sgrid, cfg.units);

    if (closed_forms) {
        add(report, "energy-closed-form", [&] {
            CheckItem it;
            for (int n = 0; n < cfg.k; ++n) {
                const double exact = closed_form_energy(cfg.model, n);
                it.value = std::max(it.value, std::abs(basis.energies[n] - exact) /
                                                  std::max(std::abs(exact), 1.0));
            }
            it.threshold = 1e-4;
            it.note = "max relative |E_solver - E_exact| over the solved states";
            return it;
        });
        add(report, "revolution-time", [&] {
            CheckItem it;
            const double exact = revolution_time_closed_form(cfg.model, cfg.m, cfg.n, cfg.units);
            it.value = std::abs(revolution_time(basis, cfg.m, cfg.n) - exact) / exact;
            it.threshold = 1e-4;
            it.note = "relative, pair (" + std::to_string(cfg.m) + "," + std::to_string(cfg.n) +
                      ")";
            return it;
        });
    }

    add(report, "boundary-decay", [&] {
        CheckItem it;
        it.value = basis.edge_amplitude;
        it.threshold = 1e-10;
        it.note = "max |psi| at the outermost interior samples";
        return it;
    });

    add(report, "node-counts", [&] {
        CheckItem it;
        for (int n = 0; n < cfg.k; ++n)
            if (count_nodes(basis.states[n]) != n) it.value += 1;
        it.threshold = 0;
        it.note = "states whose node count differs from their index";
        return it;
    });

    const TwoStateEngine engine(basis, cfg.m, cfg.n, cfg.grid);
    const WignerField field = engine.field(cfg.theta, cfg.t);

    add(report, "diagonal-reality", [&] {
        CheckItem it;
        const CrossWignerField wmm = wigner_transform(basis, cfg.m, cfg.m, cfg.grid);
        double re = 0.0, im = 0.0;
        for (const auto& z : wmm.v) {
            re = std::max(re, std::abs(z.real()));
            im = std::max(im, std::abs(z.imag()));
        }
        it.value = re > 0 ? im / re : 0.0;
        it.threshold = 1e-12;
        it.note = "imaginary residue of a diagonal transform, relative";
        return it;
    });

    add(report, "p-edge-amplitude", [&] {
        CheckItem it;
        it.value = engine.wmn().p_edge_amplitude / std::max(field.max_abs(), 1e-300);
        it.threshold = 1e-6;
        it.note = "cross field at the p-window edge, relative (aliasing gauge)";
        return it;
    });

    add(report, "normalization", [&] {
        CheckItem it;
        it.value = std::abs(normalization(field) - 1.0);
        it.threshold = harmonic ? 1e-6 : 2e-3;
        it.note = "phase-space integral against 1";
        return it;
    });

    add(report, "marginal-x", [&] {
        CheckItem it;
        const std::vector<double> mx = marginal_x(field);
        const std::vector<double> rho =
            position_density(basis, cfg.m, cfg.n, cfg.theta, cfg.t, cfg.grid);
        for (int i = 0; i < cfg.grid.nx; ++i)
            it.value = std::max(it.value, std::abs(mx[i] - rho[i]));
        it.threshold = harmonic ? 1e-5 : 2e-3;
        it.note = "p-integrated field against |Psi(x)|^2";
        return it;
    });

    add(report, "marginal-p", [&] {
        CheckItem it;
        const std::vector<double> mp = marginal_p(field);
        const std::vector<double> rho =
            momentum_density(basis, cfg.m, cfg.n, cfg.theta, cfg.t, cfg.grid);
        for (int j = 0; j < cfg.grid.np; ++j)
            it.value = std::max(it.value, std::abs(mp[j] - rho[j]));
        it.threshold = harmonic ? 1e-5 : 2e-3;
        it.note = "x-integrated field against |Phi(p)|^2";
        return it;
    });

    add(report, "eigenstate-p-symmetry", [&] {
        CheckItem it;
        // symmetric half-open p window: the mirror of sample j > 0 is np - j
        const WignerField& wnn = engine.wnn();
        double diff = 0.0;
        for (int i = 0; i < cfg.grid.nx; ++i)
            for (int j = 1; j < cfg.grid.np; ++j)
                diff = std::max(diff, std::abs(wnn.at(i, j) - wnn.at(i, cfg.grid.np - j)));
        it.value = diff / std::max(wnn.max_abs(), 1e-300);
        it.threshold = 1e-10;
        it.note = "W_nn(x, p) against W_nn(x, -p), relative";
        return it;
    });

    add(report, "flow-parity", [&] {
        CheckItem it;
        // stationary-state flow: J_x = p W / M flips under p -> -p while
        // every term of J_p keeps its sign
        FlowOptions fo;
        fo.truncation_order = harmonic ? cfg.flow_order : std::max(cfg.flow_order, 1);
        const FlowField jf = flow_field(engine.wnn(), cfg.model, fo);
        double scale = 0.0, diff = 0.0;
        for (int i = 0; i < cfg.grid.nx; ++i)
            for (int j = 1; j < cfg.grid.np; ++j) {
                const int jm = cfg.grid.np - j;
                diff = std::max({diff, std::abs(jf.at_jx(i, j) + jf.at_jx(i, jm)),
                                 std::abs(jf.at_jp(i, j) - jf.at_jp(i, jm))});
                scale = std::max({scale, std::abs(jf.at_jx(i, j)), std::abs(jf.at_jp(i, j))});
            }
        it.value = diff / std::max(scale, 1e-300);
        it.threshold = 1e-10;
        it.note = "J_x odd and J_p even in p over a stationary state, relative";
        return it;
    });

    add(report, "winding-radius-independence", [&] {
        CheckItem it;
        // the stationary psi_n field always carries a discrete charged point
        // (the origin vortex); the equal-weight harmonic superposition is
        // fully degenerate, its zero circle passing through the origin
        const WignerField& stationary = engine.wnn();
        FlowOptions fo;
        fo.truncation_order = harmonic ? cfg.flow_order : std::max(cfg.flow_order, 1);
        const FlowField flow = flow_field(stationary, cfg.model, fo);
        const StagnationSet set = find_stagnation_points(stationary, flow, cfg.model);
        const StagnationPoint* best = nullptr;
        double dist = 0.0;
        const double xc = 0.5 * (cfg.grid.x_lo + cfg.grid.x_hi);
        const double pc = 0.5 * (cfg.grid.p_lo + cfg.grid.p_hi);
        for (const auto& pt : set.points) {
            if (pt.winding == 0) continue;
            const double d = std::hypot(pt.x - xc, pt.p - pc);
            if (!best || d < dist) {
                best = &pt;
                dist = d;
            }
        }
        if (!best) throw std::runtime_error("no charged stagnation point in the window");
        const double cell = cfg.grid.cell();
        const auto w1 = flow_winding(flow, best->x, best->p, 4 * cell);
        const auto w2 = flow_winding(flow, best->x, best->p, 8 * cell);
        if (!w1 || !w2) throw std::runtime_error("winding circle left the window");
        it.value = std::abs(*w1 - *w2);
        it.threshold = 0;
        it.note = "charge at 4-cell against 8-cell radius";
        return it;
    });

    add(report, "dump-round-trip", [&] {
        CheckItem it;
        namespace fs = std::filesystem;
        const fs::path dir =
            fs::temp_directory_path() / ("wflow-check-" + cfg.model.family_name());
        fs::create_directories(dir);
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            return std::string((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        };
        const fs::path dir_a = dir / "a", dir_b = dir / "b";
        fs::create_directories(dir_a);
        fs::create_directories(dir_b);
        io::write_field(dir_a, "field", field);
        const WignerField back = io::read_field(dir_a, "field");
        io::write_field(dir_b, "field", back);
        const bool same_csv = slurp(dir_a / "field.csv") == slurp(dir_b / "field.csv");
        const bool same_json = slurp(dir_a / "field.json") == slurp(dir_b / "field.json");
        fs::remove_all(dir);
        it.value = (same_csv && same_json) ? 0.0 : 1.0;
        it.threshold = 0;
        it.note = "write, read back, write again, compare bytes";
        return it;
    });

    // Residual masked to the density's support (|W| >= 1e-3 max, interior
    // margin as in continuity_residual): outside it the truncated series'
    // high-order derivatives amplify the transform's numerical floor and a
    // max-norm there gauges junk, not the truncation quality.
    const auto masked_residual = [&](const WignerField& dwdt, const FlowField& flow) {
        const std::vector<double> r = continuity_residual_field(dwdt, flow);
        const PhaseSpaceGrid& g = flow.grid;
        const int margin = std::max(4, g.nx / 16);
        const double floor = 1e-3 * field.max_abs();
        double m = 0.0;
        for (int i = margin; i < g.nx - margin; ++i)
            for (int j = margin; j < g.np - margin; ++j)
                if (std::abs(field.at(i, j)) >= floor)
                    m = std::max(m, std::abs(r[g.index(i, j)]));
        return m;
    };

    add(report, "continuity", [&] {
        CheckItem it;
        const WignerField dwdt = engine.time_derivative(cfg.theta, cfg.t);
        FlowOptions fo;
        fo.truncation_order = harmonic ? cfg.flow_order : std::max(cfg.flow_order, 1);
        const FlowField flow = flow_field(field, cfg.model, fo);
        it.value = masked_residual(dwdt, flow);
        it.threshold = harmonic ? 1e-4 : 2e-2;
        it.note = "max |dW/dt + div J| over the support, truncation order " +
                  std::to_string(fo.truncation_order);
        return it;
    });

    if (!harmonic) {
        add(report, "continuity-improves", [&] {
            CheckItem it;
            const WignerField dwdt = engine.time_derivative(cfg.theta, cfg.t);
            FlowOptions classical;
            classical.truncation_order = 0;
            FlowOptions corrected;
            corrected.truncation_order = std::max(cfg.flow_order, 1);
            const double r0 =
                masked_residual(dwdt, flow_field(field, cfg.model, classical));
            const double rl =
                masked_residual(dwdt, flow_field(field, cfg.model, corrected));
            it.value = rl / std::max(r0, 1e-300);
            it.threshold = 0.2;
            it.note = "residual ratio over the support, corrected over classical";
            return it;
        });
    }

    if (harmonic) {
        add(report, "flow-is-exact", [&] {
            CheckItem it;
            FlowOptions fo;
            fo.truncation_order = cfg.flow_order;
            const FlowField flow = flow_field(field, cfg.model, fo);
            double scale = 0.0, diff = 0.0;
            for (int i = 0; i < cfg.grid.nx; ++i)
                for (int j = 0; j < cfg.grid.np; ++j) {
                    const double w = field.at(i, j);
                    diff = std::max({diff,
                                     std::abs(flow.at_jx(i, j) - cfg.grid.p(j) * w),
                                     std::abs(flow.at_jp(i, j) + cfg.grid.x(i) * w)});
                    scale = std::max(scale, std::abs(w));
                }
            it.value = diff / std::max(scale, 1e-300);
            it.threshold = 1e-12;
            it.note = "J against W*(p, -x), every series term beyond the force vanishing";
            return it;
        });

        add(report, "oracle-field", [&] {
            CheckItem it;
            const WignerField exact = oracle::harmonic_superposition(
                cfg.m, cfg.n, cfg.theta, cfg.t, cfg.grid, cfg.units.hbar);
            double diff = 0.0;
            for (long q = 0; q < cfg.grid.size(); ++q)
                diff = std::max(diff, std::abs(field.v[q] - exact.v[q]));
            it.value = diff / exact.max_abs();
            it.threshold = 1e-4;
            it.note = "transform against the closed-form superposition, relative";
            return it;
        });

        add(report, "origin-curvature", [&] {
            CheckItem it;
            const auto exact = oracle::harmonic_origin_data(cfg.m, cfg.n, cfg.theta, cfg.t,
                                                            engine.omega(), cfg.units.hbar);
            const WignerField d2 = momentum_derivative(field, 2);
            const int i0 = cfg.grid.ix(0.0), j0 = cfg.grid.jp(0.0);
            const double scale = 2.0 * (1.0 + 2.0 * cfg.n) / 3.141592653589793;
            it.value = std::max(std::abs(field.at(i0, j0) - exact.w),
                                std::abs(d2.at(i0, j0) - exact.d2p) / scale);
            it.threshold = 1e-4;
            it.note = "W and d2W/dp2 at the origin against closed forms";
            return it;
        });
    }

    return report;
}

} // namespace wflow
