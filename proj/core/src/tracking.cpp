#include "wflow/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace wflow {

namespace {
constexpr double kPi = std::numbers::pi;
}

SuperpositionScenario::SuperpositionScenario(const EigenstateBasis& basis, int m, int n,
                                             const PhaseSpaceGrid& grid)
    : engine_(basis, m, n, grid), theta_(kPi / 4.0) {}

void SuperpositionScenario::set_fixed_theta(double theta) {
    swept_ = false;
    theta_ = theta;
    rate_ = 0.0;
}

void SuperpositionScenario::set_sweep(double ratio, double theta0) {
    swept_ = true;
    theta_ = theta0;
    const EigenstateBasis& basis = engine_.basis();
    const double curvature = std::max(basis.model.derivative(0.0, 2), 0.0);
    const double omega_ref = std::sqrt(curvature / basis.units.mass);
    rate_ = ratio * omega_ref / 2.0;
}

double SuperpositionScenario::theta_at(double t) const { return theta_ + rate_ * t; }

WignerField SuperpositionScenario::field(double t) const {
    return engine_.field(theta_at(t), t);
}

// For a swept angle this is the quasi-static derivative: the sweep is slow
// against the beat and its direct d(theta)/dt contribution is neglected.
WignerField SuperpositionScenario::time_derivative(double t) const {
    return engine_.time_derivative(theta_at(t), t);
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::birth: return "birth";
        case EventKind::death: return "death";
        case EventKind::creation: return "creation";
        case EventKind::annihilation: return "annihilation";
        case EventKind::merge: return "merge";
        case EventKind::split: return "split";
        case EventKind::left_window: return "left-window";
        case EventKind::entered_window: return "entered-window";
        case EventKind::repulsion: return "repulsion";
    }
    return "?";
}

namespace {

struct Frame {
    double t = 0.0;
    StagnationSet stag;
};

struct Match {
    std::vector<int> a_to_b;
    std::vector<int> b_to_a;
};

Match link_frames(const std::vector<StagnationPoint>& A, const std::vector<StagnationPoint>& B,
                  const PhaseSpaceGrid& grid, double radius_cells) {
    auto dist = [&](const StagnationPoint& a, const StagnationPoint& b) {
        return std::hypot((a.x - b.x) / grid.dx(), (a.p - b.p) / grid.dp());
    };
    Match m;
    m.a_to_b.assign(A.size(), -1);
    m.b_to_a.assign(B.size(), -1);
    std::vector<int> best_a(A.size(), -1), best_b(B.size(), -1);
    for (size_t i = 0; i < A.size(); ++i) {
        double bd = radius_cells;
        for (size_t j = 0; j < B.size(); ++j) {
            if (A[i].winding != B[j].winding) continue;
            const double d = dist(A[i], B[j]);
            if (d < bd) {
                bd = d;
                best_a[i] = static_cast<int>(j);
            }
        }
    }
    for (size_t j = 0; j < B.size(); ++j) {
        double bd = radius_cells;
        for (size_t i = 0; i < A.size(); ++i) {
            if (A[i].winding != B[j].winding) continue;
            const double d = dist(A[i], B[j]);
            if (d < bd) {
                bd = d;
                best_b[j] = static_cast<int>(i);
            }
        }
    }
    for (size_t i = 0; i < A.size(); ++i)
        if (best_a[i] >= 0 && best_b[best_a[i]] == static_cast<int>(i)) {
            m.a_to_b[i] = best_a[i];
            m.b_to_a[best_a[i]] = static_cast<int>(i);
        }
    return m;
}

struct Builder {
    const SuperpositionScenario& scen;
    const TrackOptions& opt;
    PhaseSpaceGrid grid;
    double span;
    PotentialModel flow_model;
    std::vector<Track> tracks;
    std::vector<TrackEvent> events;
    std::map<double, FrameLedger> ledger;

    Frame compute(double t) const {
        Frame fr;
        fr.t = t;
        const WignerField w = scen.field(t);
        const FlowField j = flow_field(w, flow_model, opt.flow);
        fr.stag = find_stagnation_points(w, j, flow_model, opt.stag);
        return fr;
    }

    void record(const Frame& fr) {
        FrameLedger l;
        l.t = fr.t;
        for (const auto& pt : fr.stag.points) {
            if (pt.kind == StagnationKind::vortex) ++l.n_vortex;
            if (pt.kind == StagnationKind::saddle) ++l.n_saddle;
            l.total_charge += pt.winding;
        }
        ledger[fr.t] = l;
    }

    int new_track(const Frame& fr, int point) {
        Track tr;
        tr.id = static_cast<int>(tracks.size());
        tr.winding = fr.stag.points[point].winding;
        tracks.push_back(std::move(tr));
        append(tracks.back().id, fr, point);
        return tracks.back().id;
    }

    void append(int id, const Frame& fr, int point) {
        const StagnationPoint& pt = fr.stag.points[point];
        tracks[id].samples.push_back({fr.t, pt.x, pt.p, pt.winding, pt.kind});
    }

    bool near_edge(const StagnationPoint& pt) const {
        const double mx = opt.edge_margin_cells * grid.dx();
        const double mp = opt.edge_margin_cells * grid.dp();
        return pt.x - grid.x_lo < mx || grid.x(grid.nx - 1) - pt.x < mx ||
               pt.p - grid.p_lo < mp || grid.p(grid.np - 1) - pt.p < mp;
    }

    void classify(const Frame& A, const std::vector<int>& asgA, const std::vector<int>& endsA,
                  const Frame& B, const std::vector<int>& asgB, const std::vector<int>& startsB) {
        struct Item {
            bool is_end;
            int point;
            int track;
        };
        std::vector<Item> items;
        for (int i : endsA) items.push_back({true, i, asgA[i]});
        for (int j : startsB) items.push_back({false, j, asgB[j]});
        auto pos = [&](const Item& it) {
            const auto& pts = it.is_end ? A.stag.points : B.stag.points;
            return std::pair<double, double>(pts[it.point].x, pts[it.point].p);
        };
        auto pt_of = [&](const Item& it) -> const StagnationPoint& {
            return (it.is_end ? A.stag.points : B.stag.points)[it.point];
        };

        // single-link clustering at 3x the link radius
        const double rad = 3.0 * opt.link_radius_cells;
        std::vector<int> comp(items.size());
        for (size_t i = 0; i < items.size(); ++i) comp[i] = static_cast<int>(i);
        std::function<int(int)> root = [&](int i) {
            while (comp[i] != i) i = comp[i] = comp[comp[i]];
            return i;
        };
        for (size_t i = 0; i < items.size(); ++i)
            for (size_t j = i + 1; j < items.size(); ++j) {
                const auto [xi, pi] = pos(items[i]);
                const auto [xj, pj] = pos(items[j]);
                if (std::hypot((xi - xj) / grid.dx(), (pi - pj) / grid.dp()) < rad)
                    comp[root(static_cast<int>(i))] = root(static_cast<int>(j));
            }
        std::map<int, std::vector<int>> clusters;
        for (size_t i = 0; i < items.size(); ++i)
            clusters[root(static_cast<int>(i))].push_back(static_cast<int>(i));

        for (const auto& [key, members] : clusters) {
            std::vector<int> ends, starts;
            int sum_e = 0, sum_s = 0;
            double cx = 0.0, cp = 0.0;
            for (int q : members) {
                const auto [x, p] = pos(items[q]);
                cx += x;
                cp += p;
                if (items[q].is_end) {
                    ends.push_back(q);
                    sum_e += pt_of(items[q]).winding;
                } else {
                    starts.push_back(q);
                    sum_s += pt_of(items[q]).winding;
                }
            }
            cx /= members.size();
            cp /= members.size();

            auto emit = [&](EventKind kind, const std::vector<int>& e, const std::vector<int>& s) {
                TrackEvent ev;
                ev.kind = kind;
                ev.t_lo = A.t;
                ev.t_hi = B.t;
                ev.x = cx;
                ev.p = cp;
                for (int q : e) ev.tracks_ended.push_back(items[q].track);
                for (int q : s) ev.tracks_started.push_back(items[q].track);
                events.push_back(std::move(ev));
            };

            if (ends.size() == 2 && starts.empty() && sum_e == 0) {
                emit(EventKind::annihilation, ends, {});
            } else if (starts.size() == 2 && ends.empty() && sum_s == 0) {
                emit(EventKind::creation, {}, starts);
            } else if (ends.size() >= 2 && starts.size() == 1 && sum_e == sum_s &&
                       std::abs(sum_e) <= 1) {
                emit(EventKind::merge, ends, starts);
            } else if (ends.size() == 1 && starts.size() >= 2 && sum_s == sum_e &&
                       std::abs(sum_s) <= 1) {
                emit(EventKind::split, ends, starts);
            } else {
                for (int q : ends) {
                    const bool edge = near_edge(pt_of(items[q]));
                    const auto [x, p] = pos(items[q]);
                    TrackEvent ev;
                    ev.kind = edge ? EventKind::left_window : EventKind::death;
                    ev.t_lo = A.t;
                    ev.t_hi = B.t;
                    ev.x = x;
                    ev.p = p;
                    ev.tracks_ended.push_back(items[q].track);
                    events.push_back(std::move(ev));
                }
                for (int q : starts) {
                    const bool edge = near_edge(pt_of(items[q]));
                    const auto [x, p] = pos(items[q]);
                    TrackEvent ev;
                    ev.kind = edge ? EventKind::entered_window : EventKind::birth;
                    ev.t_lo = A.t;
                    ev.t_hi = B.t;
                    ev.x = x;
                    ev.p = p;
                    ev.tracks_started.push_back(items[q].track);
                    events.push_back(std::move(ev));
                }
            }
        }
    }

    std::vector<int> advance(const Frame& A, const std::vector<int>& asgA, const Frame& B,
                             int depth) {
        const Match m =
            link_frames(A.stag.points, B.stag.points, grid, opt.link_radius_cells);
        std::vector<int> endsA, startsB;
        for (size_t i = 0; i < m.a_to_b.size(); ++i)
            if (m.a_to_b[i] < 0) endsA.push_back(static_cast<int>(i));
        for (size_t j = 0; j < m.b_to_a.size(); ++j)
            if (m.b_to_a[j] < 0) startsB.push_back(static_cast<int>(j));

        const bool clean = endsA.empty() && startsB.empty();
        if (!clean && depth < opt.bisect_depth && (B.t - A.t) > 1e-6 * span) {
            const Frame mid = compute(0.5 * (A.t + B.t));
            const std::vector<int> asgM = advance(A, asgA, mid, depth + 1);
            return advance(mid, asgM, B, depth + 1);
        }

        std::vector<int> asgB(B.stag.points.size(), -1);
        for (size_t i = 0; i < m.a_to_b.size(); ++i)
            if (m.a_to_b[i] >= 0) {
                asgB[m.a_to_b[i]] = asgA[i];
                append(asgA[i], B, m.a_to_b[i]);
            }
        for (int j : startsB) asgB[j] = new_track(B, j);
        if (!clean) classify(A, asgA, endsA, B, asgB, startsB);
        record(B);
        return asgB;
    }
};

} // namespace

TrackResult track_stagnation(const SuperpositionScenario& scenario, const TrackOptions& options) {
    TrackOptions opt = options;
    if (opt.t1 <= opt.t0) opt.t1 = opt.t0 + scenario.period();
    if (opt.frames < 2) throw std::invalid_argument("tracking needs at least 2 frames");

    Builder b{scenario,
              opt,
              scenario.grid(),
              opt.t1 - opt.t0,
              opt.flow_model ? *opt.flow_model : scenario.basis().model,
              {},
              {},
              {}};
    Frame prev = b.compute(opt.t0);
    b.record(prev);
    std::vector<int> asg(prev.stag.points.size(), -1);
    for (size_t i = 0; i < prev.stag.points.size(); ++i)
        asg[i] = b.new_track(prev, static_cast<int>(i));

    for (int k = 1; k < opt.frames; ++k) {
        const double t = opt.t0 + (opt.t1 - opt.t0) * k / (opt.frames - 1);
        Frame next = b.compute(t);
        asg = b.advance(prev, asg, next, 0);
        prev = std::move(next);
    }

    TrackResult res;
    res.tracks = std::move(b.tracks);
    res.events = std::move(b.events);
    res.ledger.reserve(b.ledger.size());
    for (const auto& [t, l] : b.ledger) res.ledger.push_back(l);

    // Close approaches between charges that cannot merge (|sum| > 1) are
    // recorded, once per dip below the linking radius, at the sample of
    // closest approach.
    const PhaseSpaceGrid& grid = scenario.grid();
    for (size_t a = 0; a < res.tracks.size(); ++a) {
        for (size_t c = a + 1; c < res.tracks.size(); ++c) {
            const Track& ta = res.tracks[a];
            const Track& tc = res.tracks[c];
            if (std::abs(ta.winding + tc.winding) <= 1) continue;
            size_t i = 0, j = 0;
            bool below = false;
            double best_d = 0.0;
            TrackSample best{};
            auto flush = [&]() {
                if (!below) return;
                TrackEvent ev;
                ev.kind = EventKind::repulsion;
                ev.t_lo = ev.t_hi = best.t;
                ev.x = best.x;
                ev.p = best.p;
                ev.tracks_ended.push_back(ta.id);
                ev.tracks_started.push_back(tc.id);
                res.events.push_back(std::move(ev));
                below = false;
            };
            while (i < ta.samples.size() && j < tc.samples.size()) {
                const TrackSample& sa = ta.samples[i];
                const TrackSample& sc = tc.samples[j];
                if (sa.t < sc.t) {
                    ++i;
                    continue;
                }
                if (sc.t < sa.t) {
                    ++j;
                    continue;
                }
                const double d =
                    std::hypot((sa.x - sc.x) / grid.dx(), (sa.p - sc.p) / grid.dp());
                if (d < opt.link_radius_cells) {
                    if (!below || d < best_d) {
                        best_d = d;
                        best = sa;
                    }
                    below = true;
                } else {
                    flush();
                }
                ++i;
                ++j;
            }
            flush();
        }
    }

    for (const auto& e : res.events)
        if (e.kind == EventKind::birth || e.kind == EventKind::death) res.charge_consistent = false;
    for (size_t k = 0; k + 1 < res.ledger.size(); ++k) {
        if (res.ledger[k].total_charge == res.ledger[k + 1].total_charge) continue;
        bool explained = false;
        for (const auto& e : res.events) {
            if (e.kind != EventKind::left_window && e.kind != EventKind::entered_window) continue;
            if (e.t_lo >= res.ledger[k].t - 1e-12 && e.t_hi <= res.ledger[k + 1].t + 1e-12) {
                explained = true;
                break;
            }
        }
        if (!explained) res.charge_consistent = false;
    }
    return res;
}

int nearest_track(const TrackResult& result, double x, double p) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (const auto& tr : result.tracks) {
        if (tr.samples.empty()) continue;
        const double d = std::hypot(tr.samples.front().x - x, tr.samples.front().p - p);
        if (d < bd) {
            bd = d;
            best = tr.id;
        }
    }
    return best;
}

std::vector<double> ring_angles(const std::vector<StagnationPoint>& points, double cx, double cp,
                                double rmin) {
    std::vector<double> angles;
    for (const auto& pt : points) {
        const double dx = pt.x - cx, dp = pt.p - cp;
        if (std::hypot(dx, dp) <= rmin) continue;
        double a = std::atan2(dp, dx);
        if (a < 0) a += 2.0 * kPi;
        angles.push_back(a);
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

} // namespace wflow
