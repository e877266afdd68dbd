#pragma once

#include <string>
#include <string_view>

#include "qcal/config.hpp"

namespace qcal {

/// Physical constants of the driven-qubit / calorimeter model, SI units.
///
/// The calorimeter is described through the single combination
/// C = N * gamma (heat_capacity_coeff), so that dX = dE / C with X = T_e^2.
struct PhysicalParams {
  double level_spacing;        ///< hbar * omega (J)
  double drive_strength;       ///< kappa, dimensionless
  double drive_frequency;      ///< omega_d (rad/s)
  double coupling;             ///< g, dimensionless
  double heat_capacity_coeff;  ///< C = N gamma (J/K^2)
  double electron_count;       ///< N; only used where 1/N appears explicitly
  double sigma_v;              ///< Sigma * V (W/K^5)
  double phonon_temp;          ///< T_p (K)
  double gamma_floor = 1.0;    ///< sub-threshold decay rate (1/s)

  /// Experiment defaults: hbar omega = 0.5 k_B K, C = 1500 k_B/K,
  /// Sigma = 2e9 W K^-5 m^-3, V = 1e-21 m^3, kappa = 0.05, g^2 = 0.1,
  /// T_p = 0.1 K, resonant drive.
  static PhysicalParams defaults();

  double omega() const;             ///< qubit angular frequency (rad/s)
  double level_spacing_K() const;   ///< hbar omega / k_B (K)
  double jump_quantum() const;      ///< dX_q = hbar omega / C (K^2)
  double lambda() const;            ///< kappa * omega, rotating-frame drive element (1/s)
  double coupling_squared() const { return coupling * coupling; }
  bool resonant() const;

  /// Throws ConfigError if any field is out of range.
  void validate() const;
};

/// Reads parameters from config keys named after the fields. `level_spacing_K`
/// and `heat_capacity_coeff_K` give energies in kelvin (E / k_B);
/// `drive_frequency_ratio` gives omega_d / omega; `coupling_squared` gives g^2. Missing keys keep `base`;
/// if no drive frequency is given the drive stays resonant.
PhysicalParams read_params(const KeyValueConfig& config,
                           const PhysicalParams& base = PhysicalParams::defaults());

/// Serializes every field in SI units; parses back bit-exactly.
std::string to_config_text(const PhysicalParams& params);
PhysicalParams params_from_text(std::string_view text);

bool operator==(const PhysicalParams& a, const PhysicalParams& b);

}  // namespace qcal
