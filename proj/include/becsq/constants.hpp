#pragma once

#include <numbers>

namespace becsq::constants {

inline constexpr double pi = std::numbers::pi;

/// Reduced Planck constant, CODATA 2018 (exact), J s.
inline constexpr double hbar = 1.054571817e-34;

/// Mass of a 87Rb atom, kg.
inline constexpr double rb87_mass = 1.44316060e-25;

}  // namespace becsq::constants
