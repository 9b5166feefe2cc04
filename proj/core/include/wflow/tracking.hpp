#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wflow/stagnation.hpp"

namespace wflow {

// Two-state superposition with a mixing angle that is either fixed or swept
// linearly in time (resonant driving between the pair, slow against the
// intrinsic beat, enters the field only through theta(t)).
class SuperpositionScenario {
  public:
    SuperpositionScenario(const EigenstateBasis& basis, int m, int n, const PhaseSpaceGrid& grid);

    void set_fixed_theta(double theta);
    // theta(t) = theta0 + (Omega_R / 2) t with Omega_R = ratio * Omega_ref,
    // where Omega_ref = sqrt(V''(0)/M) is the curvature frequency of the
    // potential minimum (1 for every curvature-rescaled family), not the
    // pair gap
    void set_sweep(double ratio, double theta0);

    double theta_at(double t) const;
    WignerField field(double t) const;
    WignerField time_derivative(double t) const;

    const TwoStateEngine& engine() const { return engine_; }
    const EigenstateBasis& basis() const { return engine_.basis(); }
    const PhaseSpaceGrid& grid() const { return engine_.grid(); }
    double omega() const { return engine_.omega(); }
    double period() const { return engine_.period(); }
    bool swept() const { return swept_; }

  private:
    TwoStateEngine engine_;
    bool swept_ = false;
    double theta_ = 0.0;
    double rate_ = 0.0; // d theta / dt
};

enum class EventKind {
    birth,
    death,
    creation,      // opposite-charge pair appears
    annihilation,  // opposite-charge pair disappears
    merge,
    split,
    left_window,
    entered_window,
    repulsion      // close approach blocked by |sum of charges| > 1
};

std::string to_string(EventKind kind);

struct TrackSample {
    double t = 0.0;
    double x = 0.0;
    double p = 0.0;
    int winding = 0;
    StagnationKind kind = StagnationKind::degenerate;
};

struct Track {
    int id = 0;
    int winding = 0;
    std::vector<TrackSample> samples;
};

struct TrackEvent {
    EventKind kind = EventKind::birth;
    double t_lo = 0.0; // bracketing frame times
    double t_hi = 0.0;
    double x = 0.0;    // representative location
    double p = 0.0;
    // repulsion involves two surviving tracks, carried one per list
    std::vector<int> tracks_ended;
    std::vector<int> tracks_started;
};

struct FrameLedger {
    double t = 0.0;
    int n_vortex = 0;
    int n_saddle = 0;
    int total_charge = 0;
};

struct TrackResult {
    std::vector<Track> tracks;
    std::vector<TrackEvent> events;
    std::vector<FrameLedger> ledger; // every computed frame, time-ordered
    // total charge constant, or every change bracketed by a window-edge event
    bool charge_consistent = true;
};

struct TrackOptions {
    double t0 = 0.0;
    double t1 = 0.0; // <= t0 picks one intrinsic period
    int frames = 101;
    double link_radius_cells = 3.0;
    int bisect_depth = 6;
    double edge_margin_cells = 6.0; // "near the window edge" for exit events
    FlowOptions flow{};
    StagnationOptions stag{};
    // flow evaluated under this potential instead of the basis model; lets
    // harmonic-reference states move under a truncated anharmonic force
    std::optional<PotentialModel> flow_model{};
};

TrackResult track_stagnation(const SuperpositionScenario& scenario, const TrackOptions& options);

// index of the track whose first sample lies nearest (x, p); -1 when empty
int nearest_track(const TrackResult& result, double x, double p);

// sorted angular positions (radians, [0, 2pi)) of the points at radius
// > rmin about (cx, cp)
std::vector<double> ring_angles(const std::vector<StagnationPoint>& points, double cx, double cp,
                                double rmin);

} // namespace wflow
