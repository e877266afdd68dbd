#pragma once

namespace qcal::constants {

/// Boltzmann constant (J/K), exact SI value.
inline constexpr double k_B = 1.380649e-23;
/// Reduced Planck constant (J s).
inline constexpr double hbar = 1.054571817e-34;

}  // namespace qcal::constants
