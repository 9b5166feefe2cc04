#pragma once

namespace wflow {

// Scaled units. The harmonic reference has M = k = 1, so Omega = 1 and the
// oscillator period is T = 2*pi. hbar is kept symbolic; every formula that
// carries an hbar or a mass reads it from here.
struct UnitsConfig {
    double hbar = 1.0;
    double mass = 1.0;
};

inline constexpr double kHarmonicOmega = 1.0;

} // namespace wflow
