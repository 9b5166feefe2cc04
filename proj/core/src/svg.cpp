#include "wflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>

namespace wflow::svg {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string base64(const std::vector<uint8_t>& data) {
    static const char tab[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 2 < data.size(); i += 3) {
        const uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out += tab[(v >> 18) & 63];
        out += tab[(v >> 12) & 63];
        out += tab[(v >> 6) & 63];
        out += tab[v & 63];
    }
    if (i + 1 == data.size()) {
        const uint32_t v = data[i] << 16;
        out += tab[(v >> 18) & 63];
        out += tab[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == data.size()) {
        const uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out += tab[(v >> 18) & 63];
        out += tab[(v >> 12) & 63];
        out += tab[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

void put_u16(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
}

void put_u32(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(x & 0xff);
    v.push_back((x >> 8) & 0xff);
    v.push_back((x >> 16) & 0xff);
    v.push_back((x >> 24) & 0xff);
}

// diverging blue-white-red, t in [-1, 1]
void palette(double t, uint8_t& r, uint8_t& g, uint8_t& b) {
    t = std::clamp(t, -1.0, 1.0);
    auto mix = [](double a, double b, double u) { return a + (b - a) * u; };
    double R, G, B;
    if (t < 0) {
        const double u = -t;
        R = mix(255, 33, u);
        G = mix(255, 102, u);
        B = mix(255, 172, u);
    } else {
        R = mix(255, 178, t);
        G = mix(255, 24, t);
        B = mix(255, 43, t);
    }
    r = static_cast<uint8_t>(std::lround(R));
    g = static_cast<uint8_t>(std::lround(G));
    b = static_cast<uint8_t>(std::lround(B));
}

// 24bpp bottom-up BMP of the field; pixel column follows x, row follows p
std::string field_bitmap(const WignerField& field) {
    const int w = field.grid.nx, h = field.grid.np;
    const int stride = (w * 3 + 3) & ~3;
    const uint32_t data_size = static_cast<uint32_t>(stride) * h;
    std::vector<uint8_t> bmp;
    bmp.reserve(54 + data_size);
    bmp.push_back('B');
    bmp.push_back('M');
    put_u32(bmp, 54 + data_size);
    put_u32(bmp, 0);
    put_u32(bmp, 54);
    put_u32(bmp, 40); // BITMAPINFOHEADER
    put_u32(bmp, static_cast<uint32_t>(w));
    put_u32(bmp, static_cast<uint32_t>(h));
    put_u16(bmp, 1);
    put_u16(bmp, 24);
    put_u32(bmp, 0);
    put_u32(bmp, data_size);
    put_u32(bmp, 2835);
    put_u32(bmp, 2835);
    put_u32(bmp, 0);
    put_u32(bmp, 0);

    const double vmax = field.max_abs();
    const double inv = vmax > 0 ? 1.0 / vmax : 0.0;
    for (int j = 0; j < h; ++j) { // bottom-up: j = 0 is the lowest p row
        size_t row_start = bmp.size();
        for (int i = 0; i < w; ++i) {
            uint8_t r, g, b;
            palette(field.at(i, j) * inv, r, g, b);
            bmp.push_back(b);
            bmp.push_back(g);
            bmp.push_back(r);
        }
        while (bmp.size() - row_start < static_cast<size_t>(stride)) bmp.push_back(0);
    }
    return base64(bmp);
}

struct Mapper {
    double x_lo, x_span, p_lo, p_span;
    double mx, my; // top-left of the plot area
    double w, h;

    double X(double x) const { return mx + (x - x_lo) / x_span * w; }
    double Y(double p) const { return my + h - (p - p_lo) / p_span * h; }
};

void draw_polyline(std::string& out, const Polyline& line, const Mapper& map,
                   const std::string& style) {
    if (line.pts.size() < 2) return;
    out += "<path d=\"M";
    for (size_t q = 0; q < line.pts.size(); ++q) {
        if (q) out += " L";
        out += fmt(map.X(line.pts[q][0]));
        out += ' ';
        out += fmt(map.Y(line.pts[q][1]));
    }
    if (line.closed) out += " Z";
    out += "\" fill=\"none\" ";
    out += style;
    out += "/>\n";
}

void draw_frame(std::string& out, const Mapper& map, const std::string& title) {
    out += "<rect x=\"" + fmt(map.mx) + "\" y=\"" + fmt(map.my) + "\" width=\"" + fmt(map.w) +
           "\" height=\"" + fmt(map.h) +
           "\" fill=\"none\" stroke=\"#222\" stroke-width=\"1\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double x = map.x_lo + map.x_span * k / 4.0;
        const double p = map.p_lo + map.p_span * k / 4.0;
        const double px = map.X(x), py = map.Y(p);
        out += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(map.my + map.h) + "\" x2=\"" + fmt(px) +
               "\" y2=\"" + fmt(map.my + map.h + 5) + "\" stroke=\"#222\"/>\n";
        out += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(map.my + map.h + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#222\">" + fmt_tick(x) +
               "</text>\n";
        out += "<line x1=\"" + fmt(map.mx - 5) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(map.mx) +
               "\" y2=\"" + fmt(py) + "\" stroke=\"#222\"/>\n";
        out += "<text x=\"" + fmt(map.mx - 8) + "\" y=\"" + fmt(py + 4) +
               "\" font-size=\"11\" text-anchor=\"end\" fill=\"#222\">" + fmt_tick(p) +
               "</text>\n";
    }
    out += "<text x=\"" + fmt(map.mx + map.w / 2) + "\" y=\"" + fmt(map.my + map.h + 34) +
           "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#222\">x</text>\n";
    out += "<text x=\"" + fmt(map.mx - 34) + "\" y=\"" + fmt(map.my + map.h / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#222\" transform=\"rotate(-90 " +
           fmt(map.mx - 34) + " " + fmt(map.my + map.h / 2) + ")\">p</text>\n";
    if (!title.empty())
        out += "<text x=\"" + fmt(map.mx + map.w / 2) +
               "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\" fill=\"#111\">" + title +
               "</text>\n";
}

Mapper make_mapper(const PhaseSpaceGrid& grid, int plot_px) {
    Mapper map;
    map.x_lo = grid.x_lo;
    map.x_span = grid.x_hi - grid.x_lo;
    map.p_lo = grid.p_lo;
    map.p_span = grid.p_hi - grid.p_lo;
    map.mx = 56;
    map.my = 34;
    map.w = plot_px;
    map.h = plot_px * map.p_span / map.x_span;
    return map;
}

std::string svg_open(const Mapper& map) {
    const double W = map.mx + map.w + 20;
    const double H = map.my + map.h + 44;
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" +
           fmt(H) + "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) +
           "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" "
           "fill=\"#ffffff\"/>\n";
}

// marker by net circulation: red plus, yellow minus, open ring for zero
void draw_point(std::string& out, const StagnationPoint& pt, const Mapper& map) {
    const double px = map.X(pt.x), py = map.Y(pt.p);
    const double r = 5.0;
    if (pt.winding > 0) {
        const std::string d = "M" + fmt(px - r) + " " + fmt(py) + " L" + fmt(px + r) + " " +
                              fmt(py) + " M" + fmt(px) + " " + fmt(py - r) + " L" + fmt(px) +
                              " " + fmt(py + r);
        out += "<path d=\"" + d +
               "\" stroke=\"#ffffff\" stroke-width=\"4.6\" stroke-linecap=\"round\" "
               "fill=\"none\"/>\n";
        out += "<path d=\"" + d +
               "\" stroke=\"#d7301f\" stroke-width=\"2.4\" stroke-linecap=\"round\" "
               "fill=\"none\"/>\n";
    } else if (pt.winding < 0) {
        const std::string d =
            "M" + fmt(px - r) + " " + fmt(py) + " L" + fmt(px + r) + " " + fmt(py);
        out += "<path d=\"" + d +
               "\" stroke=\"#333333\" stroke-width=\"4.6\" stroke-linecap=\"round\" "
               "fill=\"none\"/>\n";
        out += "<path d=\"" + d +
               "\" stroke=\"#f5c211\" stroke-width=\"2.4\" stroke-linecap=\"round\" "
               "fill=\"none\"/>\n";
    } else {
        out += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) + "\" r=\"" + fmt(r - 0.8) +
               "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"3.8\"/>\n";
        out += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) + "\" r=\"" + fmt(r - 0.8) +
               "\" fill=\"none\" stroke=\"#ffffff\" stroke-width=\"1.8\"/>\n";
    }
    if (pt.winding > 1 || pt.winding < -1)
        out += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) + "\" r=\"" + fmt(r + 3.0) +
               "\" fill=\"none\" stroke=\"#222\" stroke-width=\"1\"/>\n";
}

// fast red through the rainbow down to slow blue; u in [0, 1]
std::string speed_color(double u) {
    u = std::clamp(u, 0.0, 1.0);
    const double hue = 240.0 * (1.0 - u); // degrees, 0 red .. 240 blue
    const double c = 0.88, m = 0.06;
    const double hp = hue / 60.0;
    const double xx = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double R = 0, G = 0, B = 0;
    if (hp < 1)      { R = c;  G = xx; }
    else if (hp < 2) { R = xx; G = c; }
    else if (hp < 3) { G = c;  B = xx; }
    else if (hp < 4) { G = xx; B = c; }
    else             { R = xx; B = c; }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", int(std::lround((R + m) * 255)),
                  int(std::lround((G + m) * 255)), int(std::lround((B + m) * 255)));
    return buf;
}

void arrow_path(std::string& out, double cx, double cy, double ux, double uy, double len,
                const std::string& style) {
    // ux, uy is the unit direction in pixel coordinates
    const double hx = cx + ux * len / 2, hy = cy + uy * len / 2;
    const double tx = cx - ux * len / 2, ty = cy - uy * len / 2;
    const double barb = 0.38 * len;
    const double ca = -0.866, sa = 0.5; // barbs swept back 150 degrees
    const double b1x = hx + barb * (ux * ca - uy * sa), b1y = hy + barb * (ux * sa + uy * ca);
    const double b2x = hx + barb * (ux * ca + uy * sa), b2y = hy + barb * (-ux * sa + uy * ca);
    out += "<path d=\"M" + fmt(tx) + " " + fmt(ty) + " L" + fmt(hx) + " " + fmt(hy) + " M" +
           fmt(b1x) + " " + fmt(b1y) + " L" + fmt(hx) + " " + fmt(hy) + " L" + fmt(b2x) + " " +
           fmt(b2y) + "\" fill=\"none\" " + style + "/>\n";
}

double lattice_speed_max(const FlowField& flow) {
    double m = 0.0;
    for (size_t q = 0; q < flow.jx.size(); ++q)
        m = std::max(m, std::hypot(flow.jx[q], flow.jp[q]));
    return m;
}

void draw_arrows(std::string& out, const WignerField& field, const FlowField& flow,
                 const Mapper& map, const RenderOptions& opt) {
    const int n = opt.arrows;
    const double jmax = lattice_speed_max(flow);
    if (n < 2 || jmax <= 0.0) return;
    const double spacing = map.w / n;
    const double len = 0.62 * spacing;
    const PhaseSpaceGrid& g = flow.grid;
    const int rows = std::max(2, static_cast<int>(std::lround(n * map.h / map.w)));
    std::string overlay;
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < rows; ++l) {
            const double x = g.x_lo + (k + 0.5) * (g.x_hi - g.x_lo) / n;
            const double p = g.p_lo + (l + 0.5) * (g.p_hi - g.p_lo) / rows;
            const double jx = bilinear(g, flow.jx, x, p);
            const double jp = bilinear(g, flow.jp, x, p);
            const double mag = std::hypot(jx, jp);
            if (mag < 1e-9 * jmax) continue;
            // pixel direction: +x right, +p up
            const double ux = jx / mag, uy = -jp / mag;
            const double w = bilinear(g, field.v, x, p);
            const char* color = w >= 0 ? "#c21807" : "#1a7a2a";
            arrow_path(out, map.X(x), map.Y(p), ux, uy, len,
                       std::string("stroke=\"") + color + "\" stroke-width=\"1.3\"");
            if (opt.arrow_overlay && mag > 0.06 * jmax)
                arrow_path(overlay, map.X(x), map.Y(p), ux, uy, len * mag / jmax,
                           "stroke=\"#ffffff\" stroke-width=\"1\" stroke-opacity=\"0.9\"");
        }
    }
    out += overlay;
}

void draw_streamlines(std::string& out, const FlowField& flow, const Mapper& map,
                      const RenderOptions& opt) {
    const int n = opt.streamlines;
    const double jmax = lattice_speed_max(flow);
    if (n < 1 || jmax <= 0.0) return;
    const PhaseSpaceGrid& g = flow.grid;
    const double step = opt.streamline_step_cells * g.cell();
    const double max_len = opt.streamline_length_windows * (g.x_hi - g.x_lo);
    const int chunk = 6;
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            const double x0 = g.x_lo + (k + 0.5) * (g.x_hi - g.x_lo) / n;
            const double p0 = g.p_lo + (l + 0.5) * (g.p_hi - g.p_lo) / n;
            const Streamline sl = integrate_streamline(flow, x0, p0, step, max_len);
            const auto& pts = sl.points;
            for (size_t q = 0; q + 1 < pts.size(); q += chunk) {
                const size_t e = std::min(pts.size() - 1, q + chunk);
                double speed = 0.0;
                for (size_t r = q; r <= e; ++r) speed = std::max(speed, pts[r][2]);
                out += "<path d=\"M" + fmt(map.X(pts[q][0])) + " " + fmt(map.Y(pts[q][1]));
                for (size_t r = q + 1; r <= e; ++r)
                    out += " L" + fmt(map.X(pts[r][0])) + " " + fmt(map.Y(pts[r][1]));
                out += "\" fill=\"none\" stroke=\"" + speed_color(std::sqrt(speed / jmax)) +
                       "\" stroke-width=\"1.1\" stroke-opacity=\"0.8\" "
                       "stroke-linecap=\"round\"/>\n";
            }
        }
    }
}

} // namespace

std::string render_scene(const WignerField& field, const FlowField* flow,
                         const StagnationSet* stag, const RenderOptions& options) {
    const Mapper map = make_mapper(field.grid, options.plot_px);
    std::string out = svg_open(map);

    if (options.heatmap) {
        out += "<image x=\"" + fmt(map.mx) + "\" y=\"" + fmt(map.my) + "\" width=\"" +
               fmt(map.w) + "\" height=\"" + fmt(map.h) +
               "\" preserveAspectRatio=\"none\" image-rendering=\"pixelated\" "
               "href=\"data:image/bmp;base64," +
               field_bitmap(field) + "\"/>\n";
    }
    if (flow && options.streamlines > 0) draw_streamlines(out, *flow, map, options);
    if (options.contours) {
        // the position current p W / M dies on the p = 0 line and on every
        // field zero; the momentum current dies on its own contour set and,
        // for even potentials, on the x = 0 line
        const char* green = "stroke=\"#1a9850\" stroke-width=\"1.2\"";
        const char* blue = "stroke=\"#2c7fb8\" stroke-width=\"1.2\"";
        if (field.grid.p_lo < 0 && field.grid.p_hi > 0) {
            const double y = map.Y(0.0);
            out += "<line x1=\"" + fmt(map.mx) + "\" y1=\"" + fmt(y) + "\" x2=\"" +
                   fmt(map.mx + map.w) + "\" y2=\"" + fmt(y) + "\" " + green + "/>\n";
        }
        if (options.p_axis_zero && field.grid.x_lo < 0 && field.grid.x_hi > 0) {
            const double xpix = map.X(0.0);
            out += "<line x1=\"" + fmt(xpix) + "\" y1=\"" + fmt(map.my) + "\" x2=\"" +
                   fmt(xpix) + "\" y2=\"" + fmt(map.my + map.h) + "\" " + blue + "/>\n";
        }
        if (stag) {
            for (const auto& line : stag->w_zero.lines) draw_polyline(out, line, map, green);
            for (const auto& line : stag->jp_zero.lines) draw_polyline(out, line, map, blue);
        }
    }
    if (flow && options.arrows > 0) draw_arrows(out, field, *flow, map, options);
    if (stag) {
        for (const auto& line : stag->lines)
            draw_polyline(out, line.curve, map,
                          "stroke=\"#6a51a3\" stroke-width=\"3\" stroke-opacity=\"0.85\"");
        if (options.points)
            for (const auto& pt : stag->points) draw_point(out, pt, map);
    }
    draw_frame(out, map, options.title);
    out += "</svg>\n";
    return out;
}

std::string render_tracks(const TrackResult& result, const PhaseSpaceGrid& grid,
                          const RenderOptions& options) {
    const Mapper map = make_mapper(grid, options.plot_px);
    std::string out = svg_open(map);

    for (const auto& tr : result.tracks) {
        if (tr.samples.size() < 2) continue;
        Polyline line;
        for (const auto& s : tr.samples) line.pts.push_back({s.x, s.p});
        const char* color = tr.winding > 0 ? "#d7301f" : "#0570b0";
        draw_polyline(out, line, map,
                      std::string("stroke=\"") + color + "\" stroke-width=\"1.6\"");
    }
    for (const auto& tr : result.tracks) {
        if (tr.samples.empty()) continue;
        const auto& s0 = tr.samples.front();
        const char* color = tr.winding > 0 ? "#d7301f" : "#0570b0";
        out += "<circle cx=\"" + fmt(map.X(s0.x)) + "\" cy=\"" + fmt(map.Y(s0.p)) +
               "\" r=\"3.5\" fill=\"" + color + "\"/>\n";
    }
    for (const auto& e : result.events) {
        const double px = map.X(e.x), py = map.Y(e.p);
        out += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) +
               "\" r=\"7\" fill=\"none\" stroke=\"#222\" stroke-width=\"1.4\"/>\n";
        out += "<text x=\"" + fmt(px + 9) + "\" y=\"" + fmt(py + 4) +
               "\" font-size=\"10\" fill=\"#222\">" + to_string(e.kind) + "</text>\n";
    }
    draw_frame(out, map, options.title);
    out += "</svg>\n";
    return out;
}

} // namespace wflow::svg
