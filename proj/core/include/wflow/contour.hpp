#pragma once

#include <array>
#include <vector>

#include "wflow/grid.hpp"

namespace wflow {

struct Polyline {
    std::vector<std::array<double, 2>> pts; // (x, p)
    bool closed = false;
};

struct ContourSet {
    std::vector<Polyline> lines;
};

// Zero-level curves by marching squares with linear edge interpolation.
// Cells whose four corners all stay below dead_fraction * max|v| are
// skipped: far from the support the field is a roundoff plateau whose sign
// flips are meaningless, and without the cutoff they sprout noise curves.
ContourSet zero_contours(const PhaseSpaceGrid& grid, const std::vector<double>& v,
                         double dead_fraction = 1e-12);

struct CircleFit {
    double cx = 0.0;
    double cp = 0.0;
    double radius = 0.0;
    double rms = 0.0; // root-mean-square radial deviation
};

CircleFit fit_circle(const Polyline& line);

// Nearest-distance queries against the segments of a contour family,
// bucketed on the lattice for locality.
class SegmentIndex {
  public:
    SegmentIndex(const ContourSet& set, const PhaseSpaceGrid& grid);

    bool empty() const { return segs_.empty(); }
    double distance(double x, double p) const;

  private:
    struct Seg {
        double ax, ap, bx, bp;
    };
    int bucket_of(double x, double p) const;

    double x0_ = 0.0, p0_ = 0.0, hx_ = 1.0, hp_ = 1.0;
    int bx_ = 0, bp_ = 0;
    std::vector<Seg> segs_;
    std::vector<std::vector<int>> buckets_;
};

// max over the vertices of `a` of the distance to the nearest segment in
// `index`; +inf when the index is empty
double max_deviation(const Polyline& a, const SegmentIndex& index);

} // namespace wflow
