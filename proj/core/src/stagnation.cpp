#include "wflow/stagnation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace wflow {

int StagnationSet::total_charge() const {
    int c = 0;
    for (const auto& pt : points) c += pt.winding;
    return c;
}

double bilinear(const PhaseSpaceGrid& grid, const std::vector<double>& v, double x, double p) {
    const double fx = (x - grid.x_lo) / grid.dx();
    const double fp = (p - grid.p_lo) / grid.dp();
    const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, grid.nx - 2);
    const int j = std::clamp(static_cast<int>(std::floor(fp)), 0, grid.np - 2);
    const double tx = std::clamp(fx - i, 0.0, 1.0);
    const double tp = std::clamp(fp - j, 0.0, 1.0);
    const double v00 = v[grid.index(i, j)], v10 = v[grid.index(i + 1, j)];
    const double v01 = v[grid.index(i, j + 1)], v11 = v[grid.index(i + 1, j + 1)];
    return (1 - tx) * ((1 - tp) * v00 + tp * v01) + tx * ((1 - tp) * v10 + tp * v11);
}

namespace {

constexpr double kPi = std::numbers::pi;

struct Fields {
    const PhaseSpaceGrid& grid;
    const std::vector<double>& w;
    const std::vector<double>& jx;
    const std::vector<double>& jp;

    double W(double x, double p) const { return bilinear(grid, w, x, p); }
    double Jx(double x, double p) const { return bilinear(grid, jx, x, p); }
    double Jp(double x, double p) const { return bilinear(grid, jp, x, p); }
};

struct Candidate {
    double x, p;
    AxisTag axis;
};

struct WindingResult {
    int winding = 0;
    double circulation = 0.0;
    double floor_rel = 0.0;
    bool ok = false;
};

// Accumulates the direction change of J around the circle. Uniform sampling
// alone can miss narrow angular bands where the direction sweeps by nearly
// pi (a weakly broken degeneracy confines the turn of J to a sliver around
// the W = 0 curve), so any step over pi/2 is bisected recursively until the
// turn is resolved; the interpolated field is continuous, so this terminates
// unless the flow truly dies on the circle.
WindingResult winding_of(const PhaseSpaceGrid& grid, const std::vector<double>& jx,
                         const std::vector<double>& jp, double x0, double p0, double radius,
                         int base_samples, double j_scale) {
    WindingResult res;
    double total = 0.0, circ = 0.0;
    double floor = std::numeric_limits<double>::infinity();
    const auto eval = [&](double phi, double& vx, double& vp) {
        const double cs = std::cos(phi), sn = std::sin(phi);
        vx = bilinear(grid, jx, x0 + radius * cs, p0 + radius * sn);
        vp = bilinear(grid, jp, x0 + radius * cs, p0 + radius * sn);
        const double mag = std::hypot(vx, vp);
        floor = std::min(floor, mag);
        return mag >= 1e-14 * j_scale;
    };
    const std::function<bool(double, double, double, double, double, double, int)> arc =
        [&](double phi_a, double ax, double ap, double phi_b, double bx, double bp,
            int depth) -> bool {
        const double d = std::atan2(ax * bp - ap * bx, ax * bx + ap * bp);
        if (std::abs(d) <= kPi / 2.0) {
            total += d;
            return true;
        }
        if (depth <= 0) return false;
        const double phi_m = 0.5 * (phi_a + phi_b);
        double mx, mp;
        if (!eval(phi_m, mx, mp)) return false; // flow dies on the circle
        return arc(phi_a, ax, ap, phi_m, mx, mp, depth - 1) &&
               arc(phi_m, mx, mp, phi_b, bx, bp, depth - 1);
    };
    double prev_x, prev_p;
    if (!eval(0.0, prev_x, prev_p)) return res;
    double prev_phi = 0.0;
    for (int k = 1; k <= base_samples; ++k) {
        const double phi = 2.0 * kPi * k / base_samples;
        double vx, vp;
        if (!eval(phi, vx, vp)) return res;
        if (!arc(prev_phi, prev_x, prev_p, phi, vx, vp, 48)) return res;
        circ += (vx * -std::sin(phi) + vp * std::cos(phi));
        prev_phi = phi;
        prev_x = vx;
        prev_p = vp;
    }
    res.winding = static_cast<int>(std::lround(total / (2.0 * kPi)));
    res.circulation = circ;
    res.floor_rel = floor / j_scale;
    res.ok = true;
    return res;
}

// field zero along one lattice-aligned line, by bisection on the bilinear
// interpolant (linear along the line, so this is essentially exact)
double bisect_line(const std::function<double(double)>& g, double a, double b) {
    double fa = g(a), fb = g(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = g(m);
        if (fm == 0.0) return m;
        if ((fa < 0) == (fm < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return 0.5 * (a + b);
}

// scan one lattice line for sign changes; emits refined 1D zeros
template <typename Value, typename Emit>
void scan_line(int count, Value value, Emit emit, double dead) {
    double prev = value(0);
    for (int i = 0; i + 1 < count; ++i) {
        const double a = value(i), b = value(i + 1);
        if (a == 0.0 && (i == 0 || prev != 0.0)) emit(i, i);
        if (a != 0.0 && b != 0.0 && (a < 0) != (b < 0) &&
            std::max(std::abs(a), std::abs(b)) > dead)
            emit(i, i + 1);
        prev = a;
    }
    if (value(count - 1) == 0.0 && (count < 2 || value(count - 2) != 0.0))
        emit(count - 1, count - 1);
}

bool newton2(const Fields& f, double& x, double& p, const StagnationOptions& opt, double w_scale,
             double jp_scale) {
    const PhaseSpaceGrid& grid = f.grid;
    const double hx = 0.25 * grid.dx(), hp = 0.25 * grid.dp();
    for (int it = 0; it < opt.newton_max_iter; ++it) {
        const double F0 = f.W(x, p), F1 = f.Jp(x, p);
        if (std::abs(F0) < 1e-11 * w_scale && std::abs(F1) < 1e-11 * jp_scale) return true;
        const double a = (f.W(x + hx, p) - f.W(x - hx, p)) / (2 * hx);
        const double b = (f.W(x, p + hp) - f.W(x, p - hp)) / (2 * hp);
        const double c = (f.Jp(x + hx, p) - f.Jp(x - hx, p)) / (2 * hx);
        const double d = (f.Jp(x, p + hp) - f.Jp(x, p - hp)) / (2 * hp);
        const double det = a * d - b * c;
        if (std::abs(det) < 1e-300) return false;
        double sx = -(d * F0 - b * F1) / det;
        double sp = -(-c * F0 + a * F1) / det;
        const double clip = std::max(std::abs(sx) / grid.dx(), std::abs(sp) / grid.dp());
        if (clip > 1.0) {
            sx /= clip;
            sp /= clip;
        }
        x = std::clamp(x + opt.newton_damping * sx, grid.x_lo, grid.x(grid.nx - 1));
        p = std::clamp(p + opt.newton_damping * sp, grid.p_lo, grid.p(grid.np - 1));
    }
    return std::abs(f.W(x, p)) < 1e-6 * w_scale && std::abs(f.Jp(x, p)) < 1e-6 * jp_scale;
}

struct SegRef {
    int line;
    double ax, ap, bx, bp;
};

bool seg_intersect(const SegRef& s, const SegRef& t, double& ix, double& ip) {
    const double rx = s.bx - s.ax, rp = s.bp - s.ap;
    const double qx = t.bx - t.ax, qp = t.bp - t.ap;
    const double den = rx * qp - rp * qx;
    if (std::abs(den) < 1e-30) return false;
    const double ex = t.ax - s.ax, ep = t.ap - s.ap;
    const double u = (ex * qp - ep * qx) / den;
    const double v = (ex * rp - ep * rx) / den;
    if (u < -1e-9 || u > 1 + 1e-9 || v < -1e-9 || v > 1 + 1e-9) return false;
    ix = s.ax + u * rx;
    ip = s.ap + u * rp;
    return true;
}

// closest approach of two non-crossing segments; midpoint of the gap if
// they pass within `limit`
bool seg_near(const SegRef& s, const SegRef& t, double limit, double& ix, double& ip) {
    double best = limit * limit;
    bool found = false;
    const auto point_seg = [&](double px, double pp, const SegRef& g, double& qx, double& qp) {
        const double gx = g.bx - g.ax, gp = g.bp - g.ap;
        const double len2 = gx * gx + gp * gp;
        const double u =
            len2 > 0.0 ? std::clamp(((px - g.ax) * gx + (pp - g.ap) * gp) / len2, 0.0, 1.0) : 0.0;
        qx = g.ax + u * gx;
        qp = g.ap + u * gp;
        return (px - qx) * (px - qx) + (pp - qp) * (pp - qp);
    };
    const auto probe = [&](double px, double pp, const SegRef& g) {
        double qx, qp;
        const double d2 = point_seg(px, pp, g, qx, qp);
        if (d2 < best) {
            best = d2;
            ix = 0.5 * (px + qx);
            ip = 0.5 * (pp + qp);
            found = true;
        }
    };
    probe(s.ax, s.ap, t);
    probe(s.bx, s.bp, t);
    probe(t.ax, t.ap, s);
    probe(t.bx, t.bp, s);
    return found;
}

} // namespace

StagnationSet find_stagnation_points(const WignerField& field, const FlowField& flow,
                                     const PotentialModel& model,
                                     const StagnationOptions& options) {
    const PhaseSpaceGrid& grid = field.grid;
    if (flow.grid.size() != grid.size() || flow.grid.nx != grid.nx)
        throw std::invalid_argument("stagnation: field and flow lattices differ");

    StagnationSet out;
    out.w_zero = zero_contours(grid, field.v, options.dead_fraction);
    out.jp_zero = zero_contours(grid, flow.jp, options.dead_fraction);

    const Fields f{grid, field.v, flow.jx, flow.jp};
    double j_scale = 0.0, w_scale = 0.0, jp_scale = 0.0;
    for (size_t k = 0; k < flow.jx.size(); ++k) {
        j_scale = std::max(j_scale, std::hypot(flow.jx[k], flow.jp[k]));
        jp_scale = std::max(jp_scale, std::abs(flow.jp[k]));
        w_scale = std::max(w_scale, std::abs(field.v[k]));
    }
    if (j_scale == 0.0 || w_scale == 0.0) return out;

    const double cell = std::max(grid.dx(), grid.dp());

    // Curves of W = 0 along which the whole flow vanishes are continua of
    // stagnation, not sources of isolated points. J_x = p W / M vanishes on
    // every W = 0 curve, so degeneracy is decided by how close the J_p = 0
    // family runs: per vertex, |J_p| / |grad J_p| estimates the gap between
    // the curves, and a line needs the gap below threshold everywhere. The
    // gradient floor (vs the curve median) keeps 0/0 vertices, where J_p
    // itself dies linearly, from fabricating large gaps.
    std::vector<char> is_line(out.w_zero.lines.size(), 0);
    for (size_t li = 0; li < out.w_zero.lines.size(); ++li) {
        const Polyline& curve = out.w_zero.lines[li];
        const size_t n = curve.pts.size();
        if (n == 0) continue;
        std::vector<double> grads(n);
        for (size_t q = 0; q < n; ++q) {
            const auto& v = curve.pts[q];
            const double gx =
                (f.Jp(v[0] + grid.dx(), v[1]) - f.Jp(v[0] - grid.dx(), v[1])) / (2.0 * grid.dx());
            const double gp =
                (f.Jp(v[0], v[1] + grid.dp()) - f.Jp(v[0], v[1] - grid.dp())) / (2.0 * grid.dp());
            grads[q] = std::hypot(gx, gp);
        }
        std::vector<double> med = grads;
        std::nth_element(med.begin(), med.begin() + n / 2, med.end());
        const double g_floor = 0.1 * med[n / 2];
        double gap_cells = 0.0;
        for (size_t q = 0; q < n; ++q) {
            const auto& v = curve.pts[q];
            const double jp_v = std::abs(f.Jp(v[0], v[1]));
            const double denom = std::max(grads[q], g_floor);
            if (denom <= 0.0) continue; // J_p flat and zero here: no gap
            gap_cells = std::max(gap_cells, jp_v / denom / cell);
        }
        if (gap_cells < options.line_coincidence_cells) {
            is_line[li] = 1;
            StagnationLine line;
            line.curve = curve;
            line.fit = fit_circle(curve);
            line.circle_like = curve.closed && line.fit.radius > 0 &&
                               line.fit.rms < options.circle_rms_fraction * line.fit.radius;
            out.lines.push_back(std::move(line));
        }
    }
    std::sort(out.lines.begin(), out.lines.end(),
              [](const StagnationLine& a, const StagnationLine& b) {
                  return a.fit.radius < b.fit.radius;
              });
    const SegmentIndex line_index(
        [&] {
            ContourSet s;
            for (const auto& l : out.lines) s.lines.push_back(l.curve);
            return s;
        }(),
        grid);

    std::vector<Candidate> cands;

    // J_x vanishes identically on the p = 0 lattice row: stagnation there
    // needs only J_p = 0 along the row
    const int j0 = grid.jp(0.0);
    if (std::abs(grid.p(j0)) < 1e-9 * grid.dp()) {
        double row_max = 0.0;
        for (int i = 0; i < grid.nx; ++i)
            row_max = std::max(row_max, std::abs(flow.jp[grid.index(i, j0)]));
        scan_line(
            grid.nx, [&](int i) { return flow.jp[grid.index(i, j0)]; },
            [&](int ia, int ib) {
                double x = grid.x(ia);
                if (ib != ia)
                    x = bisect_line([&](double q) { return f.Jp(q, 0.0); }, grid.x(ia),
                                    grid.x(ib));
                cands.push_back({x, 0.0, AxisTag::p_axis_row});
            },
            options.dead_fraction * row_max);
    }

    // even potential: J_p vanishes identically on the x = 0 column, so the
    // candidates there are the sign changes of W (J_x = p W) plus p = 0
    if (model.is_even()) {
        const int i0 = grid.ix(0.0);
        if (std::abs(grid.x(i0)) < 1e-9 * grid.dx()) {
            double col_max = 0.0;
            for (int j = 0; j < grid.np; ++j)
                col_max = std::max(col_max, std::abs(field.v[grid.index(i0, j)]));
            scan_line(
                grid.np, [&](int j) { return field.v[grid.index(i0, j)]; },
                [&](int ja, int jb) {
                    double p = grid.p(ja);
                    if (jb != ja)
                        p = bisect_line([&](double q) { return f.W(0.0, q); }, grid.p(ja),
                                        grid.p(jb));
                    cands.push_back({0.0, p, AxisTag::x_axis_column});
                },
                options.dead_fraction * col_max);
        }
    }

    // generic candidates: crossings of the W = 0 and J_p = 0 curve families,
    // refined by damped Newton on (W, J_p)
    {
        auto flatten = [&](const ContourSet& set, const std::vector<char>* skip) {
            std::vector<SegRef> segs;
            for (size_t li = 0; li < set.lines.size(); ++li) {
                if (skip && (*skip)[li]) continue;
                const Polyline& line = set.lines[li];
                const size_t n = line.pts.size();
                const size_t last = line.closed ? n : n - 1;
                for (size_t q = 0; q < last; ++q) {
                    const auto& a = line.pts[q];
                    const auto& b = line.pts[(q + 1) % n];
                    segs.push_back({static_cast<int>(li), a[0], a[1], b[0], b[1]});
                }
            }
            return segs;
        };
        const std::vector<SegRef> ws = flatten(out.w_zero, &is_line);
        const std::vector<SegRef> js = flatten(out.jp_zero, nullptr);

        auto cell_of = [&](double x, double p) {
            const int i = std::clamp(static_cast<int>((x - grid.x_lo) / grid.dx()), 0,
                                     grid.nx - 1);
            const int j = std::clamp(static_cast<int>((p - grid.p_lo) / grid.dp()), 0,
                                     grid.np - 1);
            return static_cast<long>(i) * grid.np + j;
        };
        std::unordered_map<long, std::pair<std::vector<int>, std::vector<int>>> cells;
        for (int s = 0; s < static_cast<int>(ws.size()); ++s) {
            cells[cell_of(ws[s].ax, ws[s].ap)].first.push_back(s);
            const long c2 = cell_of(ws[s].bx, ws[s].bp);
            auto& v = cells[c2].first;
            if (v.empty() || v.back() != s) v.push_back(s);
        }
        for (int s = 0; s < static_cast<int>(js.size()); ++s) {
            cells[cell_of(js[s].ax, js[s].ap)].second.push_back(s);
            const long c2 = cell_of(js[s].bx, js[s].bp);
            auto& v = cells[c2].second;
            if (v.empty() || v.back() != s) v.push_back(s);
        }
        // polylines cut glancing crossings badly: two curves meeting at a
        // shallow angle can fail to intersect as segments even though the
        // underlying surfaces do cross, so close approaches seed Newton too
        const double miss = 0.75 * cell;
        for (const auto& [key, lists] : cells) {
            for (int sw : lists.first) {
                for (int sj : lists.second) {
                    double ix, ip;
                    if (!seg_intersect(ws[sw], js[sj], ix, ip)) {
                        if (!seg_near(ws[sw], js[sj], miss, ix, ip)) continue;
                    }
                    if (!newton2(f, ix, ip, options, w_scale, jp_scale)) continue;
                    cands.push_back({ix, ip, AxisTag::none});
                }
            }
        }
    }

    // drop candidates sitting on a stagnation line, then collapse re-finds
    // of the same zero (axis-tagged candidates first, they carry exact
    // coordinates)
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return static_cast<int>(a.axis) > static_cast<int>(b.axis);
    });
    std::vector<Candidate> kept;
    for (const auto& c : cands) {
        if (!line_index.empty() &&
            line_index.distance(c.x, c.p) < options.line_exclusion_cells * cell)
            continue;
        bool dup = false;
        for (const auto& k : kept) {
            const double dxc = (c.x - k.x) / grid.dx(), dpc = (c.p - k.p) / grid.dp();
            if (dxc * dxc + dpc * dpc < 0.25 * 0.25) {
                dup = true;
                break;
            }
        }
        if (!dup) kept.push_back(c);
    }

    // A glancing crossing of the W = 0 and J_p = 0 surfaces splinters, at
    // interpolation resolution, into a short string of alternating-sign
    // zeros; only their net charge is meaningful. Candidates are therefore
    // clustered transitively and each cluster is judged by one winding
    // circle drawn around the whole of it.
    const int nk = static_cast<int>(kept.size());
    std::vector<int> parent(nk);
    for (int i = 0; i < nk; ++i) parent[i] = i;
    const std::function<int(int)> find_root = [&](int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    const double cluster_r2 = options.dedup_cells * options.dedup_cells;
    for (int i = 0; i < nk; ++i)
        for (int j = i + 1; j < nk; ++j) {
            const double dxc = (kept[i].x - kept[j].x) / grid.dx();
            const double dpc = (kept[i].p - kept[j].p) / grid.dp();
            if (dxc * dxc + dpc * dpc < cluster_r2) parent[find_root(i)] = find_root(j);
        }
    struct Cluster {
        double x = 0.0, p = 0.0;
        AxisTag axis = AxisTag::none;
        int members = 0;
        double half_span = 0.0;
    };
    std::unordered_map<int, Cluster> clusters;
    for (int i = 0; i < nk; ++i) {
        Cluster& cl = clusters[find_root(i)];
        cl.x += kept[i].x;
        cl.p += kept[i].p;
        ++cl.members;
    }
    for (auto& [root, cl] : clusters) {
        cl.x /= cl.members;
        cl.p /= cl.members;
    }
    for (int i = 0; i < nk; ++i) {
        Cluster& cl = clusters[find_root(i)];
        cl.half_span = std::max(cl.half_span, std::hypot(kept[i].x - cl.x, kept[i].p - cl.p));
        if (cl.axis == AxisTag::none && kept[i].axis != AxisTag::none) {
            cl.axis = kept[i].axis;
            cl.x = kept[i].x;
            cl.p = kept[i].p;
        }
    }
    std::vector<Cluster> reps;
    reps.reserve(clusters.size());
    for (auto& [root, cl] : clusters) reps.push_back(cl);

    // winding radius per cluster: wide enough to enclose all of it, narrow
    // enough to keep the nearest neighbour out
    const double radius = options.winding_radius_cells * cell;
    for (const Cluster& c : reps) {
        double nn = std::numeric_limits<double>::infinity();
        for (const Cluster& o : reps) {
            const double d = std::hypot(c.x - o.x, c.p - o.p);
            if (d > 0.0) nn = std::min(nn, d);
        }
        const double r = std::max(c.half_span + 1.0 * cell, std::min(radius, 0.45 * nn));
        if (c.x - r < grid.x_lo || c.x + r > grid.x(grid.nx - 1) || c.p - r < grid.p_lo ||
            c.p + r > grid.p(grid.np - 1))
            continue;
        const WindingResult wr =
            winding_of(grid, flow.jx, flow.jp, c.x, c.p, r, options.winding_samples, j_scale);
        if (!wr.ok) continue;
        // a multi-detection cluster with zero net charge is a tangency of
        // the two zero surfaces, unresolvable at grid scale: no point
        if (c.members > 1 && wr.winding == 0) continue;

        // a zero only counts where the field and the series are trustworthy:
        // compare the field amplitude against its global peak, and the first
        // omitted term against the flow scale, on the same circle
        double tail_max = 0.0, j_ceil = 0.0, w_ceil = 0.0;
        for (int s = 0; s < 32; ++s) {
            const double a = 2.0 * kPi * s / 32.0;
            const double sx = c.x + r * std::cos(a);
            const double sp = c.p + r * std::sin(a);
            if (!flow.tail.empty())
                tail_max = std::max(tail_max, bilinear(grid, flow.tail, sx, sp));
            j_ceil = std::max(j_ceil, std::hypot(bilinear(grid, flow.jx, sx, sp),
                                                 bilinear(grid, flow.jp, sx, sp)));
            w_ceil = std::max(w_ceil, std::abs(bilinear(grid, field.v, sx, sp)));
        }
        if (w_ceil < options.support_fraction * w_scale) {
            ++out.floor_rejected;
            continue;
        }
        const double tail_fraction = j_ceil > 0.0 ? tail_max / j_ceil : 0.0;
        if (tail_fraction > options.fringe_fraction) {
            ++out.fringe_rejected;
            continue;
        }

        StagnationPoint pt;
        pt.x = c.x;
        pt.p = c.p;
        pt.tail_fraction = tail_fraction;
        pt.winding = wr.winding;
        pt.kind = wr.winding == 1    ? StagnationKind::vortex
                  : wr.winding == -1 ? StagnationKind::saddle
                                     : StagnationKind::degenerate;
        pt.rotation = pt.kind == StagnationKind::vortex ? (wr.circulation > 0 ? 1 : -1) : 0;
        pt.axis = c.axis;
        if (std::abs(pt.x) < 1e-9 && std::abs(pt.p) < 1e-9) pt.axis = AxisTag::origin;
        pt.j_floor = wr.floor_rel;
        out.points.push_back(pt);
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const StagnationPoint& a, const StagnationPoint& b) {
                  if (a.x != b.x) return a.x < b.x;
                  return a.p < b.p;
              });
    return out;
}

std::optional<int> flow_winding(const FlowField& flow, double x, double p, double radius,
                                int samples) {
    if (radius <= 0.0 || samples < 8)
        throw std::invalid_argument("flow_winding: radius must be positive, samples >= 8");
    const PhaseSpaceGrid& grid = flow.grid;
    if (x - radius < grid.x_lo || x + radius > grid.x(grid.nx - 1) || p - radius < grid.p_lo ||
        p + radius > grid.p(grid.np - 1))
        return std::nullopt;
    double j_scale = 0.0;
    for (size_t k = 0; k < flow.jx.size(); ++k)
        j_scale = std::max(j_scale, std::hypot(flow.jx[k], flow.jp[k]));
    if (j_scale == 0.0) return std::nullopt;
    const WindingResult wr = winding_of(grid, flow.jx, flow.jp, x, p, radius, samples, j_scale);
    if (!wr.ok) return std::nullopt;
    return wr.winding;
}

} // namespace wflow
