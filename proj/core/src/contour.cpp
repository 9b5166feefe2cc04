#include "wflow/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace wflow {

namespace {

using Point = std::array<double, 2>;

// Edges are global ids so the two cells sharing one produce the same vertex:
// dir 0 runs from (i,j) to (i+1,j), dir 1 from (i,j) to (i,j+1).
int64_t edge_id(int dir, int i, int j, int np) {
    return (static_cast<int64_t>(i) * (np + 1) + j) * 2 + dir;
}

struct Builder {
    const PhaseSpaceGrid& grid;
    const std::vector<double>& v;
    std::unordered_map<int64_t, Point> verts;
    std::vector<std::array<int64_t, 2>> segs;

    double val(int i, int j) const { return v[grid.index(i, j)]; }

    Point corner(int i, int j) const { return {grid.x(i), grid.p(j)}; }

    int64_t cross(int dir, int i, int j) {
        const int64_t id = edge_id(dir, i, j, grid.np);
        auto it = verts.find(id);
        if (it != verts.end()) return id;
        const int i2 = dir == 0 ? i + 1 : i;
        const int j2 = dir == 0 ? j : j + 1;
        const double va = val(i, j), vb = val(i2, j2);
        double t = va / (va - vb);
        t = std::clamp(t, 0.0, 1.0);
        const Point a = corner(i, j), b = corner(i2, j2);
        verts.emplace(id, Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        return id;
    }

    void seg(int64_t a, int64_t b) { segs.push_back({a, b}); }
};

} // namespace

ContourSet zero_contours(const PhaseSpaceGrid& grid, const std::vector<double>& v,
                         double dead_fraction) {
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    const double dead = dead_fraction * vmax;

    Builder b{grid, v, {}, {}};
    for (int i = 0; i + 1 < grid.nx; ++i) {
        for (int j = 0; j + 1 < grid.np; ++j) {
            const double c0 = b.val(i, j), c1 = b.val(i + 1, j);
            const double c2 = b.val(i + 1, j + 1), c3 = b.val(i, j + 1);
            if (std::max({std::abs(c0), std::abs(c1), std::abs(c2), std::abs(c3)}) <= dead)
                continue;
            const int code = (c0 >= 0) | ((c1 >= 0) << 1) | ((c2 >= 0) << 2) | ((c3 >= 0) << 3);
            if (code == 0 || code == 15) continue;

            const auto e0 = [&] { return b.cross(0, i, j); };
            const auto e1 = [&] { return b.cross(1, i + 1, j); };
            const auto e2 = [&] { return b.cross(0, i, j + 1); };
            const auto e3 = [&] { return b.cross(1, i, j); };

            switch (code) {
                case 1: case 14: b.seg(e3(), e0()); break;
                case 2: case 13: b.seg(e0(), e1()); break;
                case 4: case 11: b.seg(e1(), e2()); break;
                case 8: case 7: b.seg(e2(), e3()); break;
                case 3: case 12: b.seg(e3(), e1()); break;
                case 6: case 9: b.seg(e0(), e2()); break;
                case 5: {
                    if (c0 + c1 + c2 + c3 >= 0) {
                        b.seg(e0(), e1());
                        b.seg(e2(), e3());
                    } else {
                        b.seg(e3(), e0());
                        b.seg(e1(), e2());
                    }
                    break;
                }
                case 10: {
                    if (c0 + c1 + c2 + c3 >= 0) {
                        b.seg(e3(), e0());
                        b.seg(e1(), e2());
                    } else {
                        b.seg(e0(), e1());
                        b.seg(e2(), e3());
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // chain segments into polylines through shared edge ids
    std::unordered_map<int64_t, std::vector<int>> at_edge;
    for (int s = 0; s < static_cast<int>(b.segs.size()); ++s) {
        at_edge[b.segs[s][0]].push_back(s);
        at_edge[b.segs[s][1]].push_back(s);
    }

    ContourSet out;
    std::vector<char> used(b.segs.size(), 0);
    for (int s0 = 0; s0 < static_cast<int>(b.segs.size()); ++s0) {
        if (used[s0]) continue;
        std::vector<int64_t> chain = {b.segs[s0][0], b.segs[s0][1]};
        used[s0] = 1;
        bool closed = false;

        for (int dir = 0; dir < 2 && !closed; ++dir) {
            while (true) {
                const int64_t tip = dir == 0 ? chain.back() : chain.front();
                int next = -1;
                for (int s : at_edge[tip])
                    if (!used[s]) { next = s; break; }
                if (next < 0) break;
                used[next] = 1;
                const int64_t other =
                    b.segs[next][0] == tip ? b.segs[next][1] : b.segs[next][0];
                if (dir == 0)
                    chain.push_back(other);
                else
                    chain.insert(chain.begin(), other);
                if (chain.front() == chain.back()) {
                    closed = true;
                    break;
                }
            }
        }

        Polyline line;
        line.closed = closed;
        const size_t n = chain.size() - (closed ? 1 : 0);
        line.pts.reserve(n);
        for (size_t q = 0; q < n; ++q) line.pts.push_back(b.verts.at(chain[q]));
        if (line.pts.size() >= 2) out.lines.push_back(std::move(line));
    }
    return out;
}

CircleFit fit_circle(const Polyline& line) {
    // Kasa: x^2+p^2 = 2 cx x + 2 cp p + c, linear least squares
    double sx = 0, sp = 0, sxx = 0, spp = 0, sxp = 0, sz = 0, szx = 0, szp = 0;
    const double n = static_cast<double>(line.pts.size());
    for (const auto& q : line.pts) {
        const double x = q[0], p = q[1], z = x * x + p * p;
        sx += x; sp += p; sxx += x * x; spp += p * p; sxp += x * p;
        sz += z; szx += z * x; szp += z * p;
    }
    // normal equations for (2cx, 2cp, c)
    double A[3][3] = {{sxx, sxp, sx}, {sxp, spp, sp}, {sx, sp, n}};
    double rhs[3] = {szx, szp, sz};
    // Gaussian elimination with partial pivoting on the 3x3 system
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[perm[r]][col]) > std::abs(A[perm[piv]][col])) piv = r;
        std::swap(perm[col], perm[piv]);
        const double d = A[perm[col]][col];
        for (int r = col + 1; r < 3; ++r) {
            const double f = A[perm[r]][col] / d;
            for (int c = col; c < 3; ++c) A[perm[r]][c] -= f * A[perm[col]][c];
            rhs[perm[r]] -= f * rhs[perm[col]];
        }
    }
    double sol[3];
    for (int col = 2; col >= 0; --col) {
        double acc = rhs[perm[col]];
        for (int c = col + 1; c < 3; ++c) acc -= A[perm[col]][c] * sol[c];
        sol[col] = acc / A[perm[col]][col];
    }

    CircleFit fit;
    fit.cx = sol[0] / 2.0;
    fit.cp = sol[1] / 2.0;
    fit.radius = std::sqrt(std::max(0.0, sol[2] + fit.cx * fit.cx + fit.cp * fit.cp));
    double acc = 0.0;
    for (const auto& q : line.pts) {
        const double d = std::hypot(q[0] - fit.cx, q[1] - fit.cp) - fit.radius;
        acc += d * d;
    }
    fit.rms = std::sqrt(acc / n);
    return fit;
}

SegmentIndex::SegmentIndex(const ContourSet& set, const PhaseSpaceGrid& grid)
    : x0_(grid.x_lo), p0_(grid.p_lo), hx_(grid.dx()), hp_(grid.dp()), bx_(grid.nx),
      bp_(grid.np) {
    buckets_.resize(static_cast<size_t>(bx_) * bp_);
    for (const Polyline& line : set.lines) {
        const size_t n = line.pts.size();
        const size_t last = line.closed ? n : n - 1;
        for (size_t q = 0; q < last; ++q) {
            const auto& a = line.pts[q];
            const auto& b = line.pts[(q + 1) % n];
            const int id = static_cast<int>(segs_.size());
            segs_.push_back({a[0], a[1], b[0], b[1]});
            // a segment spans at most two buckets; register in both corners
            const int ba = bucket_of(a[0], a[1]);
            const int bb = bucket_of(b[0], b[1]);
            buckets_[ba].push_back(id);
            if (bb != ba) buckets_[bb].push_back(id);
        }
    }
}

int SegmentIndex::bucket_of(double x, double p) const {
    int i = static_cast<int>(std::floor((x - x0_) / hx_));
    int j = static_cast<int>(std::floor((p - p0_) / hp_));
    i = std::clamp(i, 0, bx_ - 1);
    j = std::clamp(j, 0, bp_ - 1);
    return i * bp_ + j;
}

double SegmentIndex::distance(double x, double p) const {
    if (segs_.empty()) return std::numeric_limits<double>::infinity();
    const int ci = std::clamp(static_cast<int>(std::floor((x - x0_) / hx_)), 0, bx_ - 1);
    const int cj = std::clamp(static_cast<int>(std::floor((p - p0_) / hp_)), 0, bp_ - 1);

    auto seg_dist = [&](const Seg& s) {
        const double vx = s.bx - s.ax, vp = s.bp - s.ap;
        const double wx = x - s.ax, wp = p - s.ap;
        const double vv = vx * vx + vp * vp;
        double t = vv > 0 ? (wx * vx + wp * vp) / vv : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return std::hypot(wx - t * vx, wp - t * vp);
    };

    double best = std::numeric_limits<double>::infinity();
    const int rmax = std::max(bx_, bp_);
    for (int ring = 0; ring <= rmax; ++ring) {
        // once a hit exists, one extra ring guarantees no closer segment
        // hides in an unvisited bucket
        if (std::isfinite(best) && (ring - 1) * std::min(hx_, hp_) > best) break;
        bool any_cell = false;
        for (int i = ci - ring; i <= ci + ring; ++i) {
            if (i < 0 || i >= bx_) continue;
            for (int j = cj - ring; j <= cj + ring; ++j) {
                if (j < 0 || j >= bp_) continue;
                if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
                any_cell = true;
                for (int s : buckets_[i * bp_ + j]) best = std::min(best, seg_dist(segs_[s]));
            }
        }
        if (!any_cell && ring > 0 && std::isfinite(best)) break;
    }
    return best;
}

double max_deviation(const Polyline& a, const SegmentIndex& index) {
    double m = 0.0;
    for (const auto& q : a.pts) m = std::max(m, index.distance(q[0], q[1]));
    return m;
}

} // namespace wflow
