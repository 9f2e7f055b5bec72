#pragma once

namespace twomode::si {

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double k_boltzmann = 1.380649e-23;        // J / K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

inline constexpr double rb87_mass = 86.909180531 * atomic_mass_unit;  // kg

}  // namespace twomode::si
