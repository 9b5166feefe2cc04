#pragma once

#include <string>

#include "wflow/flow.hpp"
#include "wflow/stagnation.hpp"
#include "wflow/tracking.hpp"
#include "wflow/wigner.hpp"

// Deterministic SVG rendering: no timestamps, no generated ids, fixed
// number formatting, so identical inputs produce identical bytes.

namespace wflow::svg {

struct RenderOptions {
    int plot_px = 720;
    std::string title;
    bool heatmap = true;
    // zero curves of the two flow components: green where the position
    // current vanishes (field zeros plus the p = 0 axis), blue where the
    // momentum current vanishes
    bool contours = true;
    bool points = true;
    // paint the x = 0 column as a momentum-current zero; callers set this
    // for even potentials, where every odd derivative dies at the origin
    bool p_axis_zero = false;
    // quiver lattice per side; 0 disables. Unit arrows are red over
    // positive field values and green over negative ones; the overlay adds
    // white arrows scaled by the raw current magnitude.
    int arrows = 0;
    bool arrow_overlay = true;
    // streamline seeds per side; 0 disables. Colored by local speed,
    // fastest red through the rainbow down to slow blue.
    int streamlines = 0;
    double streamline_step_cells = 1.0;
    double streamline_length_windows = 2.0;
};

// Field heatmap (diverging palette, embedded bitmap) with optional flow
// decorations (quiver, streamlines), zero contours and stagnation markers.
// Markers go by net circulation: red plus for +1, yellow minus for -1,
// an open ring for charge 0.
std::string render_scene(const WignerField& field, const FlowField* flow,
                         const StagnationSet* stag, const RenderOptions& options = {});

// Track curves in the phase plane with event markers.
std::string render_tracks(const TrackResult& result, const PhaseSpaceGrid& grid,
                          const RenderOptions& options = {});

} // namespace wflow::svg
