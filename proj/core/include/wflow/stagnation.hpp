#pragma once

#include <optional>
#include <vector>

#include "wflow/contour.hpp"
#include "wflow/flow.hpp"

namespace wflow {

enum class StagnationKind { vortex, saddle, degenerate };

// Where a stagnation point sits relative to the exact zero lines of J_x:
// the p = 0 row always carries J_x = 0; for even potentials the x = 0
// column carries J_p = 0 exactly.
enum class AxisTag { none, p_axis_row, x_axis_column, origin };

struct StagnationPoint {
    double x = 0.0;
    double p = 0.0;
    int winding = 0;   // topological charge of the flow around the point
    int rotation = 0;  // +1 counterclockwise, -1 clockwise, 0 saddle
    StagnationKind kind = StagnationKind::degenerate;
    AxisTag axis = AxisTag::none;
    double j_floor = 0.0; // min |J| on the winding circle / lattice max |J|
    // max truncation-error gauge on the circle / max |J| on the circle;
    // order unity marks a zero the omitted series terms could move or erase
    double tail_fraction = 0.0;
};

// Continuum of stagnation: the flow vanishes along a whole curve. Happens
// when a zero curve of W is shared by both components of J (harmonic
// potentials at any truncation, every potential at truncation order 0).
struct StagnationLine {
    Polyline curve;
    CircleFit fit;
    bool circle_like = false;
};

struct StagnationSet {
    std::vector<StagnationPoint> points;
    std::vector<StagnationLine> lines;
    ContourSet w_zero;
    ContourSet jp_zero;
    // flow zeros dropped because the next omitted series term would move
    // them by a sizable fraction of the winding radius: artifacts of
    // cutting the J_p series, their count and positions move with the cutoff
    int fringe_rejected = 0;
    // flow zeros dropped because |W| around them sits below the field's
    // trustworthy amplitude: sign flips of the transform's numerical floor
    int floor_rejected = 0;

    int total_charge() const;
};

struct StagnationOptions {
    double dead_fraction = 1e-12;
    // a W-zero curve counts as a stagnation line when the estimated gap
    // between it and the J_p = 0 curve, |J_p| / |grad J_p| per vertex,
    // stays below this many cells everywhere along the curve
    double line_coincidence_cells = 0.04;
    double newton_damping = 0.5;
    int newton_max_iter = 50;
    // Cluster radius after refinement: detections closer than this are one
    // zero of the underlying surfaces (glancing crossings splinter at
    // interpolation resolution) and carry only their net charge.
    double dedup_cells = 1.25;
    double line_exclusion_cells = 0.75;
    double winding_radius_cells = 4.0;
    int winding_samples = 64;      // doubled adaptively up to 16x
    double circle_rms_fraction = 0.05; // rms/radius bound for circle_like
    // drop points whose tail_fraction exceeds this, i.e. whose position the
    // next omitted series term could shift by more than this fraction of the
    // winding radius; genuine zeros measure well under 0.05 on every family
    double fringe_fraction = 0.25;
    // drop points where max |W| on the winding circle falls below this
    // fraction of the global max |W|: below it, zeros belong to the
    // transform's numerical floor (boundary ringing, solver residue), and
    // their positions are not stable under grid or window changes. Keeps
    // everything down to |W| ~ e^{-11} of peak, so weak-field vortices that
    // tracking follows outward survive until far beyond the classical region.
    double support_fraction = 1e-5;
};

StagnationSet find_stagnation_points(const WignerField& field, const FlowField& flow,
                                     const PotentialModel& model,
                                     const StagnationOptions& options = {});

// Charge of the flow around a circle of the given radius: +1 vortex,
// -1 saddle, 0 featureless. Empty when the circle leaves the window or
// crosses a region where |J| is too small to orient (a stagnation line,
// another stagnation point on the circle).
std::optional<int> flow_winding(const FlowField& flow, double x, double p, double radius,
                                int samples = 64);

// Bilinear interpolation of a lattice scalar, clamped to the window.
double bilinear(const PhaseSpaceGrid& grid, const std::vector<double>& v, double x, double p);

} // namespace wflow
