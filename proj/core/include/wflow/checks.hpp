#pragma once

#include <string>
#include <vector>

#include "wflow/flow.hpp"
#include "wflow/wigner.hpp"

namespace wflow {

struct CheckItem {
    std::string name;
    double value = 0.0;
    double threshold = 0.0; // pass when value <= threshold
    bool pass = false;
    std::string note;
};

struct CheckReport {
    std::vector<CheckItem> items;
    bool all_pass() const;
};

// Invariant suite for one superposition scenario: spectra against closed
// forms, boundary decay, node counts, field normalization, marginals against
// the state densities, aliasing gauges, continuity of the analytic time
// derivative against the computed flow, and (for the harmonic reference)
// the closed-form field itself.
struct CheckConfig {
    PotentialModel model = PotentialModel::harmonic();
    int m = 0;
    int n = 1;
    double theta = 0.7853981633974483; // pi/4
    double t = 0.0;
    int solver_n = 2048;
    int k = 0; // states to solve; 0 picks n + 4
    PhaseSpaceGrid grid{}; // nx == 0 picks the family default
    int flow_order = 2;
    UnitsConfig units{};
};

CheckReport run_checks(const CheckConfig& config);

} // namespace wflow
