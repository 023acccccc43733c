#pragma once

#include <numbers>

namespace spinmag {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Ordinary frequency (Hz) -> angular frequency (rad/s). All internal
// frequencies and rates are angular.
inline constexpr double angular(double hz) { return two_pi * hz; }

// CODATA 2018 values, SI units.
namespace codata {
inline constexpr double hbar    = 1.054571817e-34;     // J s
inline constexpr double mu_0    = 1.25663706212e-6;    // N / A^2
inline constexpr double mu_bohr = 9.2740100783e-24;    // J / T
inline constexpr double g_e     = 2.00231930436256;    // electron g-factor
} // namespace codata

} // namespace spinmag
