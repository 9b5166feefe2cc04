// wignerflow: phase-space distributions, truncated flow fields, stagnation
// topology and its time evolution for 1-D bound systems, from the command
// line. Every data-producing run drops a manifest.json that `rerun` replays
// bit-for-bit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wflow/checks.hpp"
#include "wflow/eigensolver.hpp"
#include "wflow/flow.hpp"
#include "wflow/io.hpp"
#include "wflow/stagnation.hpp"
#include "wflow/svg.hpp"
#include "wflow/tracking.hpp"
#include "wflow/wigner.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace wflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Args {
    std::string potential = "harmonic";
    double depth = 0.0; // 0 = family default (4; morse 16)
    std::string state = "0,1";
    double theta = kPi / 4.0;
    double theta0 = kPi / 2.0; // rabi start angle
    double time = 0.0;
    double rabi_ratio = 0.125;
    int grid = 512;
    int solver_grid = 2048;
    int levels = 4;
    double domain = 0.0;        // > 0: symmetric phase window half-width
    std::vector<double> window; // x_lo x_hi p_lo p_hi
    int cutoff = 10;
    int check_cutoff = 2;
    int frames = 101;
    double t0 = 0.0;
    double t1 = -1.0; // < t0: one intrinsic period (rabi: one sweep period)
    std::string out = "out";
    std::string format = "csv";
    std::string flow_potential;
    double flow_depth = 0.0; // 0: same as --depth
    bool richardson = false;
    // render
    std::string in_dir;
    std::string title;
    int arrows = 0;
    int streamlines = 0;
    int plot_px = 720;
    bool no_heatmap = false;
    bool no_contours = false;
    bool no_points = false;
    // rerun
    std::string manifest;
};

struct StatePair {
    int m = 0;
    int n = 1;
    bool single = false; // one eigenstate instead of a superposition
};

// depth <= 0 picks the family default from the reference parameter sets:
// D = 4 for the even wall families, D = 16 for morse
PotentialModel parse_potential(const std::string& name, double depth) {
    if (depth <= 0.0) depth = name == "morse" ? 16.0 : 4.0;
    if (name.rfind("poly:", 0) == 0) {
        std::vector<PolynomialTerm> terms;
        std::string rest = name.substr(5);
        while (!rest.empty()) {
            const auto c1 = rest.find(':');
            if (c1 == std::string::npos)
                throw CLI::ValidationError("--potential", "poly syntax is poly:POWER:ALPHA[:...]");
            const auto c2 = rest.find(':', c1 + 1);
            const std::string pow_s = rest.substr(0, c1);
            const std::string alpha_s =
                c2 == std::string::npos ? rest.substr(c1 + 1) : rest.substr(c1 + 1, c2 - c1 - 1);
            try {
                terms.push_back({std::stoi(pow_s), std::stod(alpha_s)});
            } catch (const std::exception&) {
                throw CLI::ValidationError("--potential", "poly syntax is poly:POWER:ALPHA[:...]");
            }
            rest = c2 == std::string::npos ? std::string{} : rest.substr(c2 + 1);
        }
        return PotentialModel::polynomial(std::move(terms));
    }
    return potential_from_name(name, depth);
}

StatePair parse_state(const std::string& s) {
    StatePair sp;
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) {
            sp.m = sp.n = std::stoi(s);
            sp.single = true;
        } else {
            sp.m = std::stoi(s.substr(0, comma));
            sp.n = std::stoi(s.substr(comma + 1));
        }
    } catch (const std::exception&) {
        throw CLI::ValidationError("--state", "expected N or M,N");
    }
    if (sp.m < 0 || sp.n < 0 || (!sp.single && sp.m >= sp.n))
        throw CLI::ValidationError("--state", "need 0 <= m < n (or one index)");
    return sp;
}

PhaseSpaceGrid make_window(const Args& a, const PotentialModel& model) {
    if (!a.window.empty()) {
        if (a.window.size() != 4)
            throw CLI::ValidationError("--window", "expected x_lo,x_hi,p_lo,p_hi");
        return PhaseSpaceGrid::make(a.window[0], a.window[1], a.window[2], a.window[3], a.grid,
                                    a.grid);
    }
    if (a.domain > 0.0)
        return PhaseSpaceGrid::make(-a.domain, a.domain, -a.domain, a.domain, a.grid, a.grid);
    return default_phase_grid(model, a.grid);
}

void ensure_layout(const fs::path& out) {
    fs::create_directories(out / "fields");
    fs::create_directories(out / "reports");
    fs::create_directories(out / "renders");
}

// Scenario pieces shared by wigner/flow/stag/track/rabi/render.
struct Scene {
    PotentialModel model = PotentialModel::harmonic();
    PotentialModel flow_model = PotentialModel::harmonic();
    StatePair sp;
    EigenstateBasis basis;
    PhaseSpaceGrid grid{};
};

Scene make_scene(const Args& a) {
    Scene sc;
    sc.model = parse_potential(a.potential, a.depth);
    sc.flow_model = a.flow_potential.empty()
                        ? sc.model
                        : parse_potential(a.flow_potential,
                                          a.flow_depth > 0.0 ? a.flow_depth : a.depth);
    sc.sp = parse_state(a.state);
    sc.grid = make_window(a, sc.model);
    const int k = sc.sp.n + 1;
    sc.basis = solve_bound_states(sc.model, k, default_solver_grid(sc.model, a.solver_grid));
    return sc;
}

WignerField scene_field(const Scene& sc, double theta, double t) {
    if (sc.sp.single) return diagonal_field(wigner_transform(sc.basis, sc.sp.n, sc.sp.n, sc.grid));
    return superposition_field(sc.basis, sc.sp.m, sc.sp.n, theta, t, sc.grid);
}

void dump_field(const fs::path& out, const WignerField& field, const std::string& format,
                std::vector<std::string>& outputs) {
    if (format == "json") {
        ordered_json j{{"kind", "wigner-field"},
                       {"layout", "row-major, rows follow x, columns follow p"},
                       {"grid",
                        {{"nx", field.grid.nx},
                         {"np", field.grid.np},
                         {"x_lo", field.grid.x_lo},
                         {"x_hi", field.grid.x_hi},
                         {"p_lo", field.grid.p_lo},
                         {"p_hi", field.grid.p_hi}}},
                       {"time", field.time},
                       {"source", field.source},
                       {"values", field.v}};
        io::write_text(out / "fields" / "field.json", j.dump(2) + "\n");
        outputs.push_back("fields/field.json");
    } else {
        io::write_field(out / "fields", "field", field);
        outputs.push_back("fields/field.csv");
        outputs.push_back("fields/field.json");
    }
}

int validate_energies(const Scene& sc, int k) {
    if (sc.model.family() == PotentialFamily::polynomial) return 0;
    double worst = 0.0;
    for (int n = 0; n < k; ++n) {
        const double exact = closed_form_energy(sc.model, n);
        worst = std::max(worst, std::abs(sc.basis.energies[n] - exact) / std::abs(exact));
    }
    if (worst > 1e-4) {
        std::fprintf(stderr, "error: solved energies off closed forms by %.3g relative\n", worst);
        return 1;
    }
    return 0;
}

int cmd_eigs(const Args& a, const std::vector<std::string>& argv) {
    const PotentialModel model = parse_potential(a.potential, a.depth);
    SpatialGrid sgrid = default_solver_grid(model, a.solver_grid);
    if (a.domain > 0.0) {
        if (!model.contains(-a.domain) || !model.contains(a.domain)) {
            std::fprintf(stderr, "error: domain half-width %g leaves the potential's domain\n",
                         a.domain);
            return 1;
        }
        sgrid = SpatialGrid::uniform(-a.domain, a.domain, a.solver_grid);
    }
    SolveOptions opts;
    opts.richardson = a.richardson;
    const SolveReport report = solve_bound_states_report(model, a.levels, sgrid, {}, opts);

    ensure_layout(a.out);
    io::write_states_csv(fs::path(a.out) / "fields", report.basis);
    io::write_solve_report(fs::path(a.out) / "reports", report, "../fields/states.csv");
    io::write_manifest(a.out, argv, {"reports/eigs.json", "fields/states.csv"});

    std::printf("%s, %d states on [%g, %g] x %d\n", model.describe().c_str(), a.levels, sgrid.a,
                sgrid.b, sgrid.n);
    for (int n = 0; n < a.levels; ++n) {
        if (model.family() != PotentialFamily::polynomial) {
            const double exact = closed_form_energy(model, n);
            std::printf("  E_%d = %.12f   closed form %.12f   |diff| %.3g\n", n,
                        report.basis.energies[n], exact,
                        std::abs(report.basis.energies[n] - exact));
        } else {
            std::printf("  E_%d = %.12f\n", n, report.basis.energies[n]);
        }
    }
    Scene sc;
    sc.model = model;
    sc.basis = report.basis;
    return validate_energies(sc, a.levels);
}

int cmd_wigner(const Args& a, const std::vector<std::string>& argv) {
    const Scene sc = make_scene(a);
    const WignerField field = scene_field(sc, a.theta, a.time);
    ensure_layout(a.out);
    std::vector<std::string> outputs;
    dump_field(a.out, field, a.format, outputs);
    io::write_manifest(a.out, argv, outputs);
    std::printf("field %s on %dx%d, normalization %.9f, max |W| %.6g\n", field.source.c_str(),
                sc.grid.nx, sc.grid.np, normalization(field), field.max_abs());
    return validate_energies(sc, sc.sp.n + 1);
}

int cmd_flow(const Args& a, const std::vector<std::string>& argv) {
    const Scene sc = make_scene(a);
    const WignerField field = scene_field(sc, a.theta, a.time);
    FlowOptions fo;
    fo.truncation_order = a.cutoff;
    const FlowField flow = flow_field(field, sc.flow_model, fo);

    ensure_layout(a.out);
    std::vector<std::string> outputs;
    dump_field(a.out, field, a.format, outputs);
    io::write_flow_files(fs::path(a.out) / "fields", flow);
    outputs.insert(outputs.end(), {"fields/flow_jx.csv", "fields/flow_jp.csv", "fields/flow_tail.csv", "fields/flow.json"});
    io::write_manifest(a.out, argv, outputs);

    std::printf("flow under %s, series cutoff %d\n", sc.flow_model.describe().c_str(), a.cutoff);
    for (size_t l = 0; l < flow.term_max.size(); ++l)
        std::printf("  term %zu: max contribution %.6g\n", l, flow.term_max[l]);
    return validate_energies(sc, sc.sp.n + 1);
}

void print_points(const StagnationSet& set) {
    std::printf("%zu stagnation points, %zu stagnation lines, total charge %+d\n",
                set.points.size(), set.lines.size(), set.total_charge());
    for (const auto& pt : set.points) {
        const char* kind = pt.kind == StagnationKind::vortex   ? "vortex"
                           : pt.kind == StagnationKind::saddle ? "saddle"
                                                               : "degenerate";
        std::printf("  (%+.6f, %+.6f)  charge %+d  %s\n", pt.x, pt.p, pt.winding, kind);
    }
}

int cmd_stag(const Args& a, const std::vector<std::string>& argv) {
    const Scene sc = make_scene(a);
    const WignerField field = scene_field(sc, a.theta, a.time);
    FlowOptions fo;
    fo.truncation_order = a.cutoff;
    const FlowField flow = flow_field(field, sc.flow_model, fo);
    const StagnationSet set = find_stagnation_points(field, flow, sc.flow_model);

    ensure_layout(a.out);
    std::vector<std::string> outputs;
    dump_field(a.out, field, a.format, outputs);
    io::write_flow_files(fs::path(a.out) / "fields", flow);
    io::write_stagnation(fs::path(a.out) / "reports", set);
    outputs.insert(outputs.end(), {"fields/flow_jx.csv", "fields/flow_jp.csv", "fields/flow_tail.csv", "fields/flow.json",
                                   "reports/stagnation.json"});
    io::write_manifest(a.out, argv, outputs);

    print_points(set);
    return validate_energies(sc, sc.sp.n + 1);
}

void write_track_points_csv(const fs::path& path, const TrackResult& result) {
    std::string out = "# frame,t,track,x,p,charge\n";
    // frame index recovered from the ledger ordering
    std::vector<double> times;
    for (const auto& l : result.ledger) times.push_back(l.t);
    char buf[160];
    for (const auto& tr : result.tracks)
        for (const auto& s : tr.samples) {
            const auto it = std::lower_bound(times.begin(), times.end(), s.t - 1e-12);
            const long frame = it - times.begin();
            std::snprintf(buf, sizeof(buf), "%ld,%.17g,%d,%.17g,%.17g,%d\n", frame, s.t, tr.id,
                          s.x, s.p, s.winding);
            out += buf;
        }
    io::write_text(path, out);
}

int run_track(const Args& a, const std::vector<std::string>& argv, bool rabi) {
    const Scene sc = make_scene(a);
    if (sc.sp.single) {
        std::fprintf(stderr, "error: tracking needs a state pair, got --state %s\n",
                     a.state.c_str());
        return 1;
    }
    SuperpositionScenario scenario(sc.basis, sc.sp.m, sc.sp.n, sc.grid);
    if (rabi)
        scenario.set_sweep(a.rabi_ratio, a.theta0);
    else
        scenario.set_fixed_theta(a.theta);

    TrackOptions opt;
    opt.t0 = a.t0;
    opt.t1 = a.t1;
    opt.frames = a.frames;
    opt.flow.truncation_order = a.cutoff;
    if (sc.flow_model != sc.model) opt.flow_model = sc.flow_model;
    if (rabi && a.t1 < a.t0) {
        const double omega_ref =
            std::sqrt(std::max(sc.model.derivative(0.0, 2), 0.0) / sc.basis.units.mass);
        opt.t1 = a.t0 + 2.0 * kPi / (a.rabi_ratio * omega_ref); // one sweep period
        if (a.frames == 101) {
            // default sampling keeps the same density per intrinsic period
            // that a single-period track gets, or linking falls apart
            const double periods = (opt.t1 - opt.t0) / scenario.period();
            opt.frames = std::max(101, static_cast<int>(std::lround(100.0 * periods)) + 1);
        }
    }
    const TrackResult result = track_stagnation(scenario, opt);

    ensure_layout(a.out);
    io::write_track(fs::path(a.out) / "reports", result);
    write_track_points_csv(fs::path(a.out) / "fields" / "track_points.csv", result);
    svg::RenderOptions ro;
    ro.plot_px = a.plot_px;
    ro.title = a.title;
    io::write_text(fs::path(a.out) / "renders" / "tracks.svg",
                   svg::render_tracks(result, sc.grid, ro));
    io::write_manifest(a.out, argv,
                       {"reports/track.json", "fields/track_points.csv", "renders/tracks.svg"});

    int births = 0, deaths = 0, pairs = 0, windowed = 0;
    for (const auto& e : result.events) {
        if (e.kind == EventKind::birth) ++births;
        if (e.kind == EventKind::death) ++deaths;
        if (e.kind == EventKind::creation || e.kind == EventKind::annihilation) ++pairs;
        if (e.kind == EventKind::left_window || e.kind == EventKind::entered_window) ++windowed;
    }
    std::printf("%zu tracks over [%g, %g], %zu events "
                "(%d birth/%d death, %d pair, %d window), charge %s\n",
                result.tracks.size(), opt.t0, opt.t1 > opt.t0 ? opt.t1 : scenario.period(),
                result.events.size(), births, deaths, pairs, windowed,
                result.charge_consistent ? "consistent" : "INCONSISTENT");
    if (!result.charge_consistent) {
        std::fprintf(stderr, "error: total charge changed without a window-edge event\n");
        return 1;
    }
    return validate_energies(sc, sc.sp.n + 1);
}

int cmd_check(const Args& a, const std::vector<std::string>& argv) {
    CheckConfig cfg;
    cfg.model = parse_potential(a.potential, a.depth);
    const StatePair sp = parse_state(a.state);
    if (sp.single) {
        std::fprintf(stderr, "error: the check suite runs on a state pair\n");
        return 1;
    }
    cfg.m = sp.m;
    cfg.n = sp.n;
    cfg.theta = a.theta;
    cfg.t = a.time;
    cfg.solver_n = a.solver_grid;
    cfg.flow_order = a.check_cutoff;
    if (!a.window.empty() || a.domain > 0.0 || a.grid != 512) cfg.grid = make_window(a, cfg.model);
    const CheckReport report = run_checks(cfg);

    ensure_layout(a.out);
    ordered_json items = ordered_json::array();
    for (const auto& it : report.items)
        items.push_back({{"name", it.name},
                         {"value", it.value},
                         {"threshold", it.threshold},
                         {"pass", it.pass},
                         {"note", it.note}});
    ordered_json j{{"kind", "check-report"},
                   {"potential", cfg.model.describe()},
                   {"all_pass", report.all_pass()},
                   {"items", std::move(items)}};
    io::write_text(fs::path(a.out) / "reports" / "checks.json", j.dump(2) + "\n");
    io::write_manifest(a.out, argv, {"reports/checks.json"});

    for (const auto& it : report.items)
        std::printf("  %-28s %10.3g <= %-8.3g %s  %s\n", it.name.c_str(), it.value, it.threshold,
                    it.pass ? "ok " : "FAIL", it.note.c_str());
    std::printf("%s\n", report.all_pass() ? "all checks pass" : "CHECKS FAILED");
    return report.all_pass() ? 0 : 1;
}

int cmd_render(const Args& a, const std::vector<std::string>& argv) {
    ensure_layout(a.out);
    svg::RenderOptions ro;
    ro.plot_px = a.plot_px;
    ro.title = a.title;
    ro.heatmap = !a.no_heatmap;
    ro.contours = !a.no_contours;
    ro.points = !a.no_points;
    ro.arrows = a.arrows;
    ro.streamlines = a.streamlines;

    if (!a.in_dir.empty()) {
        // render an earlier dump
        const fs::path in(a.in_dir);
        const WignerField field = io::read_field(in / "fields", "field");
        std::optional<FlowField> flow;
        if (fs::exists(in / "fields" / "flow.json")) flow = io::read_flow_files(in / "fields");
        std::optional<StagnationSet> stag;
        if (fs::exists(in / "reports" / "stagnation.json")) stag = io::read_stagnation(in / "reports");
        const std::string svg_text = svg::render_scene(field, flow ? &*flow : nullptr,
                                                       stag ? &*stag : nullptr, ro);
        io::write_text(fs::path(a.out) / "renders" / "scene.svg", svg_text);
        io::write_manifest(a.out, argv, {"renders/scene.svg"});
        std::printf("rendered %s -> %s/renders/scene.svg\n", a.in_dir.c_str(), a.out.c_str());
        return 0;
    }

    const Scene sc = make_scene(a);
    const WignerField field = scene_field(sc, a.theta, a.time);
    FlowOptions fo;
    fo.truncation_order = a.cutoff;
    const FlowField flow = flow_field(field, sc.flow_model, fo);
    const StagnationSet set = find_stagnation_points(field, flow, sc.flow_model);
    ro.p_axis_zero = sc.flow_model.is_even();

    std::vector<std::string> outputs;
    dump_field(a.out, field, a.format, outputs);
    io::write_flow_files(fs::path(a.out) / "fields", flow);
    io::write_stagnation(fs::path(a.out) / "reports", set);
    io::write_text(fs::path(a.out) / "renders" / "scene.svg",
                   svg::render_scene(field, &flow, &set, ro));
    outputs.insert(outputs.end(), {"fields/flow_jx.csv", "fields/flow_jp.csv", "fields/flow_tail.csv", "fields/flow.json",
                                   "reports/stagnation.json", "renders/scene.svg"});
    io::write_manifest(a.out, argv, outputs);
    print_points(set);
    std::printf("scene -> %s/renders/scene.svg\n", a.out.c_str());
    return validate_energies(sc, sc.sp.n + 1);
}

int dispatch(const std::vector<std::string>& args, int depth);

int cmd_rerun(const Args& a, int depth) {
    fs::path mf(a.manifest);
    if (fs::is_directory(mf)) mf /= "manifest.json";
    std::vector<std::string> argv = io::manifest_argv(mf);
    if (argv.empty()) {
        std::fprintf(stderr, "error: manifest holds no argv\n");
        return 1;
    }
    argv.erase(argv.begin()); // program name
    if (!argv.empty() && argv.front() == "rerun") {
        std::fprintf(stderr, "error: refusing to replay a rerun manifest\n");
        return 1;
    }
    if (!a.out.empty() && a.out != "out") {
        // redirect the replay into a fresh directory
        bool replaced = false;
        for (size_t i = 0; i + 1 < argv.size(); ++i)
            if (argv[i] == "--out" || argv[i] == "-o") {
                argv[i + 1] = a.out;
                replaced = true;
            }
        if (!replaced) {
            argv.push_back("--out");
            argv.push_back(a.out);
        }
    }
    return dispatch(argv, depth + 1);
}

void add_scenario_flags(CLI::App* cmd, Args& a, bool with_pair_dynamics) {
    cmd->add_option("--potential", a.potential,
                    "harmonic | eckart | rosen-morse | morse | poly:POWER:ALPHA[:...]")
        ->capture_default_str();
    cmd->add_option("--depth", a.depth, "well depth D (default 4; morse 16)")
        ->capture_default_str();
    cmd->add_option("--state", a.state, "one eigenstate index, or a pair m,n")
        ->capture_default_str();
    cmd->add_option("--grid", a.grid, "phase-space lattice points per side")
        ->capture_default_str();
    cmd->add_option("--solver-grid", a.solver_grid, "eigensolver lattice points")
        ->capture_default_str();
    cmd->add_option("--domain", a.domain, "symmetric phase window half-width (0 = family default)")
        ->capture_default_str();
    cmd->add_option("--window", a.window, "phase window x_lo,x_hi,p_lo,p_hi")
        ->delimiter(',')
        ->expected(4);
    if (with_pair_dynamics) {
        cmd->add_option("--theta", a.theta, "mixing angle of the superposition")
            ->capture_default_str();
        cmd->add_option("--time", a.time, "evolution time")->capture_default_str();
        cmd->add_option("--cutoff", a.cutoff, "highest flow series term (0..50)")
            ->capture_default_str();
        cmd->add_option("--flow-potential", a.flow_potential,
                        "evaluate the flow under this potential instead");
        cmd->add_option("--flow-depth", a.flow_depth, "depth for --flow-potential (0 = --depth)");
        cmd->add_option("--format", a.format, "field dump format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    }
    cmd->add_option("--out,-o", a.out, "output directory")->capture_default_str();
}

int dispatch(const std::vector<std::string>& args, int depth) {
    Args a;
    CLI::App app{"Wigner distributions and their phase-space flow for 1-D bound systems"};
    app.require_subcommand(1);
    app.set_config("--config", "", "load options from a TOML preset");
    app.allow_config_extras(CLI::config_extras_mode::error);

    CLI::App* eigs = app.add_subcommand("eigs", "solve bound states and validate the spectrum");
    eigs->configurable();
    eigs->add_option("--potential", a.potential,
                     "harmonic | eckart | rosen-morse | morse | poly:POWER:ALPHA[:...]")
        ->capture_default_str();
    eigs->add_option("--depth", a.depth, "well depth D (default 4; morse 16)")->capture_default_str();
    eigs->add_option("--levels,-k", a.levels, "number of states")->capture_default_str();
    eigs->add_option("--solver-grid,--grid", a.solver_grid, "lattice points")
        ->capture_default_str();
    eigs->add_option("--domain", a.domain, "symmetric solver window half-width");
    eigs->add_flag("--richardson", a.richardson, "re-solve at half spacing, report the drift");
    eigs->add_option("--out,-o", a.out, "output directory")->capture_default_str();

    CLI::App* wig = app.add_subcommand("wigner", "phase-space distribution of a state");
    wig->configurable();
    add_scenario_flags(wig, a, true);

    CLI::App* flw = app.add_subcommand("flow", "truncated flow field of a state");
    flw->configurable();
    add_scenario_flags(flw, a, true);

    CLI::App* stg = app.add_subcommand("stag", "stagnation points, lines and charges");
    stg->configurable();
    add_scenario_flags(stg, a, true);

    CLI::App* trk = app.add_subcommand("track", "stagnation tracking through a beat period");
    trk->configurable();
    add_scenario_flags(trk, a, true);
    trk->add_option("--frames", a.frames, "field evaluations across the span")
        ->capture_default_str();
    trk->add_option("--t0", a.t0, "span start")->capture_default_str();
    trk->add_option("--t1", a.t1, "span end (< t0 picks one intrinsic period)");

    CLI::App* rab = app.add_subcommand("rabi", "tracking under a swept mixing angle");
    rab->configurable();
    add_scenario_flags(rab, a, true);
    rab->add_option("--rabi-ratio", a.rabi_ratio, "sweep rate over the curvature frequency")
        ->capture_default_str();
    rab->add_option("--theta0", a.theta0, "mixing angle at t = 0")->capture_default_str();
    rab->add_option("--frames", a.frames, "field evaluations across the span")
        ->capture_default_str();
    rab->add_option("--t0", a.t0, "span start")->capture_default_str();
    rab->add_option("--t1", a.t1, "span end (< t0 picks one sweep period)");

    CLI::App* chk = app.add_subcommand("check", "invariant suite for one scenario");
    chk->configurable();
    chk->add_option("--potential", a.potential, "potential family")->capture_default_str();
    chk->add_option("--depth", a.depth, "well depth D (default 4; morse 16)")->capture_default_str();
    chk->add_option("--state", a.state, "state pair m,n")->capture_default_str();
    chk->add_option("--theta", a.theta, "mixing angle")->capture_default_str();
    chk->add_option("--time", a.time, "evolution time")->capture_default_str();
    chk->add_option("--grid", a.grid, "phase lattice points per side")->capture_default_str();
    chk->add_option("--solver-grid", a.solver_grid, "eigensolver lattice points")
        ->capture_default_str();
    chk->add_option("--cutoff", a.check_cutoff, "flow series cutoff for the continuity checks")
        ->capture_default_str();
    chk->add_option("--out,-o", a.out, "output directory")->capture_default_str();

    CLI::App* ren = app.add_subcommand("render", "figure-style SVG of a scene or an earlier dump");
    ren->configurable();
    add_scenario_flags(ren, a, true);
    ren->add_option("--in", a.in_dir, "render this run directory instead of computing");
    ren->add_option("--title", a.title, "plot title");
    ren->add_option("--arrows", a.arrows, "quiver lattice per side (0 = off)")
        ->capture_default_str();
    ren->add_option("--streamlines", a.streamlines, "streamline seeds per side (0 = off)")
        ->capture_default_str();
    ren->add_option("--plot-px", a.plot_px, "plot width in pixels")->capture_default_str();
    ren->add_flag("--no-heatmap", a.no_heatmap, "skip the field bitmap");
    ren->add_flag("--no-contours", a.no_contours, "skip the component zero curves");
    ren->add_flag("--no-points", a.no_points, "skip the stagnation markers");

    CLI::App* rer = app.add_subcommand("rerun", "replay the argv stored in a manifest");
    rer->add_option("manifest", a.manifest, "manifest.json or the directory holding it")
        ->required();
    rer->add_option("--out,-o", a.out, "redirect outputs to this directory");

    std::vector<std::string> manifest_argv;
    manifest_argv.push_back("wignerflow");
    manifest_argv.insert(manifest_argv.end(), args.begin(), args.end());

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (eigs->parsed()) return cmd_eigs(a, manifest_argv);
        if (wig->parsed()) return cmd_wigner(a, manifest_argv);
        if (flw->parsed()) return cmd_flow(a, manifest_argv);
        if (stg->parsed()) return cmd_stag(a, manifest_argv);
        if (trk->parsed()) return run_track(a, manifest_argv, false);
        if (rab->parsed()) return run_track(a, manifest_argv, true);
        if (chk->parsed()) return cmd_check(a, manifest_argv);
        if (ren->parsed()) return cmd_render(a, manifest_argv);
        if (rer->parsed()) {
            if (depth > 0) {
                std::fprintf(stderr, "error: nested rerun\n");
                return 1;
            }
            return cmd_rerun(a, depth);
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, 0);
}
