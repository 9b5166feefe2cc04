#include "wflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "json.hpp"

namespace wflow::io {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

void write_matrix_csv(const std::filesystem::path& path, const PhaseSpaceGrid& grid,
                      const std::vector<double>& values, const std::string& extra) {
    if (static_cast<long>(values.size()) != grid.size())
        throw std::invalid_argument("matrix size does not match the lattice");
    std::string out = "# rows=x cols=p nx=" + std::to_string(grid.nx) +
                      " np=" + std::to_string(grid.np) + " x_lo=" + format_double(grid.x_lo) +
                      " x_hi=" + format_double(grid.x_hi) + " p_lo=" + format_double(grid.p_lo) +
                      " p_hi=" + format_double(grid.p_hi);
    if (!extra.empty()) out += " " + extra;
    out += '\n';
    out.reserve(out.size() + values.size() * 26);
    char buf[32];
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.np; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", values[grid.index(i, j)]);
            out += buf;
            out += (j + 1 < grid.np) ? ',' : '\n';
        }
    }
    write_text(path, out);
}

std::vector<double> read_matrix_csv(const std::filesystem::path& path,
                                    const PhaseSpaceGrid& grid) {
    const std::string text = read_text(path);
    std::vector<double> values;
    values.reserve(grid.size());
    const char* p = text.c_str();
    bool line_start = true;
    while (*p) {
        if (line_start && *p == '#') {
            while (*p && *p != '\n') ++p;
            if (*p) ++p;
            continue;
        }
        line_start = false;
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) break;
        values.push_back(v);
        p = end;
        while (*p == ',' || *p == '\n' || *p == '\r' || *p == ' ') {
            if (*p == '\n') line_start = true;
            ++p;
        }
    }
    if (static_cast<long>(values.size()) != grid.size())
        throw std::runtime_error("matrix in " + path.string() + " does not match the lattice");
    return values;
}

namespace {

ordered_json grid_json(const PhaseSpaceGrid& grid) {
    return {{"nx", grid.nx}, {"np", grid.np}, {"x_lo", grid.x_lo}, {"x_hi", grid.x_hi},
            {"p_lo", grid.p_lo}, {"p_hi", grid.p_hi}};
}

PhaseSpaceGrid grid_from_json(const ordered_json& j) {
    return PhaseSpaceGrid::make(j.at("x_lo").get<double>(), j.at("x_hi").get<double>(),
                                j.at("p_lo").get<double>(), j.at("p_hi").get<double>(),
                                j.at("nx").get<int>(), j.at("np").get<int>());
}

ordered_json units_json(const UnitsConfig& u) {
    return {{"hbar", u.hbar}, {"mass", u.mass}};
}

UnitsConfig units_from_json(const ordered_json& j) {
    UnitsConfig u;
    u.hbar = j.at("hbar").get<double>();
    u.mass = j.at("mass").get<double>();
    return u;
}

void dump(const std::filesystem::path& path, const ordered_json& j) {
    write_text(path, j.dump(2) + "\n");
}

ordered_json load(const std::filesystem::path& path) {
    return ordered_json::parse(read_text(path));
}

} // namespace

void write_field(const std::filesystem::path& dir, const std::string& name,
                 const WignerField& field) {
    write_matrix_csv(dir / (name + ".csv"), field.grid, field.v);
    ordered_json j{{"kind", "wigner-field"},
                   {"layout", "rows follow x, columns follow p"},
                   {"csv", name + ".csv"},
                   {"grid", grid_json(field.grid)},
                   {"units", units_json(field.units)},
                   {"time", field.time},
                   {"source", field.source},
                   {"support", {field.support_lo, field.support_hi}}};
    dump(dir / (name + ".json"), j);
}

WignerField read_field(const std::filesystem::path& dir, const std::string& name) {
    const ordered_json j = load(dir / (name + ".json"));
    WignerField f;
    f.grid = grid_from_json(j.at("grid"));
    f.units = units_from_json(j.at("units"));
    f.time = j.at("time").get<double>();
    f.source = j.at("source").get<std::string>();
    f.support_lo = j.at("support").at(0).get<double>();
    f.support_hi = j.at("support").at(1).get<double>();
    f.v = read_matrix_csv(dir / j.at("csv").get<std::string>(), f.grid);
    return f;
}

void write_flow_files(const std::filesystem::path& dir, const FlowField& flow) {
    write_matrix_csv(dir / "flow_jx.csv", flow.grid, flow.jx);
    write_matrix_csv(dir / "flow_jp.csv", flow.grid, flow.jp);
    ordered_json j{{"kind", "flow-field"},
                   {"layout", "rows follow x, columns follow p"},
                   {"jx_csv", "flow_jx.csv"},
                   {"jp_csv", "flow_jp.csv"},
                   {"grid", grid_json(flow.grid)},
                   {"units", units_json(flow.units)},
                   {"time", flow.time},
                   {"truncation_order", flow.truncation_order},
                   {"support", {flow.support_lo, flow.support_hi}},
                   {"term_max", flow.term_max}};
    if (!flow.tail.empty()) {
        write_matrix_csv(dir / "flow_tail.csv", flow.grid, flow.tail);
        j["tail_csv"] = "flow_tail.csv";
    }
    dump(dir / "flow.json", j);
}

FlowField read_flow_files(const std::filesystem::path& dir) {
    const ordered_json j = load(dir / "flow.json");
    FlowField f;
    f.grid = grid_from_json(j.at("grid"));
    f.units = units_from_json(j.at("units"));
    f.time = j.at("time").get<double>();
    f.truncation_order = j.at("truncation_order").get<int>();
    f.support_lo = j.at("support").at(0).get<double>();
    f.support_hi = j.at("support").at(1).get<double>();
    f.term_max = j.at("term_max").get<std::vector<double>>();
    f.jx = read_matrix_csv(dir / j.at("jx_csv").get<std::string>(), f.grid);
    f.jp = read_matrix_csv(dir / j.at("jp_csv").get<std::string>(), f.grid);
    if (j.contains("tail_csv"))
        f.tail = read_matrix_csv(dir / j.at("tail_csv").get<std::string>(), f.grid);
    return f;
}

namespace {

const char* kind_name(StagnationKind k) {
    switch (k) {
        case StagnationKind::vortex: return "vortex";
        case StagnationKind::saddle: return "saddle";
        case StagnationKind::degenerate: return "degenerate";
    }
    return "?";
}

StagnationKind kind_from(const std::string& s) {
    if (s == "vortex") return StagnationKind::vortex;
    if (s == "saddle") return StagnationKind::saddle;
    return StagnationKind::degenerate;
}

const char* axis_name(AxisTag a) {
    switch (a) {
        case AxisTag::none: return "none";
        case AxisTag::p_axis_row: return "p-axis-row";
        case AxisTag::x_axis_column: return "x-axis-column";
        case AxisTag::origin: return "origin";
    }
    return "?";
}

AxisTag axis_from(const std::string& s) {
    if (s == "p-axis-row") return AxisTag::p_axis_row;
    if (s == "x-axis-column") return AxisTag::x_axis_column;
    if (s == "origin") return AxisTag::origin;
    return AxisTag::none;
}

ordered_json polyline_json(const Polyline& line) {
    ordered_json pts = ordered_json::array();
    for (const auto& q : line.pts) pts.push_back({q[0], q[1]});
    return {{"closed", line.closed}, {"points", std::move(pts)}};
}

Polyline polyline_from(const ordered_json& j) {
    Polyline line;
    line.closed = j.at("closed").get<bool>();
    for (const auto& q : j.at("points")) line.pts.push_back({q.at(0), q.at(1)});
    return line;
}

ordered_json contours_json(const ContourSet& set) {
    ordered_json arr = ordered_json::array();
    for (const auto& line : set.lines) arr.push_back(polyline_json(line));
    return arr;
}

ContourSet contours_from(const ordered_json& j) {
    ContourSet set;
    for (const auto& line : j) set.lines.push_back(polyline_from(line));
    return set;
}

} // namespace

void write_stagnation(const std::filesystem::path& dir, const StagnationSet& set,
                      bool include_curves) {
    ordered_json points = ordered_json::array();
    for (const auto& pt : set.points)
        points.push_back({{"x", pt.x},
                          {"p", pt.p},
                          {"winding", pt.winding},
                          {"rotation", pt.rotation},
                          {"kind", kind_name(pt.kind)},
                          {"axis", axis_name(pt.axis)},
                          {"j_floor", pt.j_floor},
                          {"tail_fraction", pt.tail_fraction}});
    ordered_json lines = ordered_json::array();
    for (const auto& line : set.lines)
        lines.push_back({{"circle_like", line.circle_like},
                         {"fit",
                          {{"cx", line.fit.cx},
                           {"cp", line.fit.cp},
                           {"radius", line.fit.radius},
                           {"rms", line.fit.rms}}},
                         {"curve", polyline_json(line.curve)}});
    ordered_json j{{"kind", "stagnation-set"},
                   {"total_charge", set.total_charge()},
                   {"fringe_rejected", set.fringe_rejected},
                   {"floor_rejected", set.floor_rejected},
                   {"points", std::move(points)},
                   {"lines", std::move(lines)}};
    if (include_curves) {
        j["w_zero"] = contours_json(set.w_zero);
        j["jp_zero"] = contours_json(set.jp_zero);
    }
    dump(dir / "stagnation.json", j);
}

StagnationSet read_stagnation(const std::filesystem::path& dir) {
    const ordered_json j = load(dir / "stagnation.json");
    StagnationSet set;
    for (const auto& q : j.at("points")) {
        StagnationPoint pt;
        pt.x = q.at("x").get<double>();
        pt.p = q.at("p").get<double>();
        pt.winding = q.at("winding").get<int>();
        pt.rotation = q.at("rotation").get<int>();
        pt.kind = kind_from(q.at("kind").get<std::string>());
        pt.axis = axis_from(q.at("axis").get<std::string>());
        pt.j_floor = q.at("j_floor").get<double>();
        pt.tail_fraction = q.value("tail_fraction", 0.0);
        set.points.push_back(pt);
    }
    set.fringe_rejected = j.value("fringe_rejected", 0);
    set.floor_rejected = j.value("floor_rejected", 0);
    for (const auto& q : j.at("lines")) {
        StagnationLine line;
        line.circle_like = q.at("circle_like").get<bool>();
        line.fit.cx = q.at("fit").at("cx").get<double>();
        line.fit.cp = q.at("fit").at("cp").get<double>();
        line.fit.radius = q.at("fit").at("radius").get<double>();
        line.fit.rms = q.at("fit").at("rms").get<double>();
        line.curve = polyline_from(q.at("curve"));
        set.lines.push_back(std::move(line));
    }
    if (j.contains("w_zero")) set.w_zero = contours_from(j.at("w_zero"));
    if (j.contains("jp_zero")) set.jp_zero = contours_from(j.at("jp_zero"));
    return set;
}

void write_states_csv(const std::filesystem::path& dir, const EigenstateBasis& basis) {
    std::string out = "# x";
    for (int n = 0; n < basis.k; ++n) out += ",psi_" + std::to_string(n);
    out += '\n';
    out.reserve(out.size() + static_cast<std::size_t>(basis.grid.n) * (basis.k + 1) * 26);
    char buf[32];
    for (int i = 0; i < basis.grid.n; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", basis.grid.x(i));
        out += buf;
        for (int n = 0; n < basis.k; ++n) {
            std::snprintf(buf, sizeof(buf), ",%.17g", basis.states[n][i]);
            out += buf;
        }
        out += '\n';
    }
    write_text(dir / "states.csv", out);
}

void write_solve_report(const std::filesystem::path& dir, const SolveReport& report,
                        const std::string& states_csv) {
    const EigenstateBasis& basis = report.basis;
    ordered_json energies = ordered_json::array();
    for (int n = 0; n < basis.k; ++n) {
        ordered_json e{{"n", n}, {"energy", basis.energies[n]}};
        if (basis.model.family() != PotentialFamily::polynomial) {
            const double cf = closed_form_energy(basis.model, n);
            e["closed_form"] = cf;
            e["abs_error"] = std::abs(basis.energies[n] - cf);
        }
        if (!report.richardson_drift.empty()) e["richardson_drift"] = report.richardson_drift[n];
        e["nodes"] = count_nodes(basis.states[n]);
        energies.push_back(std::move(e));
    }
    ordered_json j{{"kind", "bound-states"},
                   {"potential", basis.model.describe()},
                   {"grid", {{"a", basis.grid.a}, {"b", basis.grid.b}, {"n", basis.grid.n}}},
                   {"units", units_json(basis.units)},
                   {"k", basis.k},
                   {"edge_amplitude", basis.edge_amplitude},
                   {"states", std::move(energies)}};
    if (const auto count = bound_state_count(basis.model))
        j["bound_state_count"] = *count;
    if (!states_csv.empty()) j["states_csv"] = states_csv;
    dump(dir / "eigs.json", j);
}

void write_track(const std::filesystem::path& dir, const TrackResult& result) {
    ordered_json tracks = ordered_json::array();
    for (const auto& tr : result.tracks) {
        ordered_json samples = ordered_json::array();
        for (const auto& s : tr.samples)
            samples.push_back({{"t", s.t}, {"x", s.x}, {"p", s.p}, {"kind", kind_name(s.kind)}});
        tracks.push_back(
            {{"id", tr.id}, {"winding", tr.winding}, {"samples", std::move(samples)}});
    }
    ordered_json events = ordered_json::array();
    for (const auto& e : result.events)
        events.push_back({{"kind", to_string(e.kind)},
                          {"t_lo", e.t_lo},
                          {"t_hi", e.t_hi},
                          {"x", e.x},
                          {"p", e.p},
                          {"tracks_ended", e.tracks_ended},
                          {"tracks_started", e.tracks_started}});
    ordered_json ledger = ordered_json::array();
    for (const auto& l : result.ledger)
        ledger.push_back({{"t", l.t},
                          {"vortices", l.n_vortex},
                          {"saddles", l.n_saddle},
                          {"total_charge", l.total_charge}});
    ordered_json j{{"kind", "stagnation-tracks"},
                   {"charge_consistent", result.charge_consistent},
                   {"tracks", std::move(tracks)},
                   {"events", std::move(events)},
                   {"ledger", std::move(ledger)}};
    dump(dir / "track.json", j);
}

void write_manifest(const std::filesystem::path& dir, const std::vector<std::string>& argv,
                    const std::vector<std::string>& outputs) {
    ordered_json j{{"tool", "wignerflow"},
                   {"version", "0.1.0"},
                   {"argv", argv},
                   {"outputs", outputs}};
    dump(dir / "manifest.json", j);
}

std::vector<std::string> manifest_argv(const std::filesystem::path& manifest_file) {
    const ordered_json j = load(manifest_file);
    return j.at("argv").get<std::vector<std::string>>();
}

} // namespace wflow::io
