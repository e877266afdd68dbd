#pragma once

#include "qcal/linalg.hpp"
#include "qcal/params.hpp"

namespace qcal {

enum class Frame { lab, rotating };

const char* to_string(Frame frame);
/// Accepts "lab" or "rotating"; anything else raises ConfigError.
Frame frame_from_string(const std::string& text);

/// Qubit Hamiltonian (J). Lab frame:
///   (hbar omega / 2) sigma_z + kappa hbar omega (e^{-i omega_d t} sigma_+ + e^{i omega_d t} sigma_-).
/// Rotating frame (resonant drive only): kappa hbar omega sigma_x, time independent.
/// A rotating frame with omega_d != omega raises ConfigError.
Mat2 drive_hamiltonian(double t, const PhysicalParams& params, Frame frame);

}  // namespace qcal
