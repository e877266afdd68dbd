#include "qcal/hamiltonian.hpp"

#include <cmath>

#include "qcal/constants.hpp"
#include "qcal/errors.hpp"

namespace qcal {

const char* to_string(Frame frame) { return frame == Frame::lab ? "lab" : "rotating"; }

Frame frame_from_string(const std::string& text) {
  if (text == "lab") return Frame::lab;
  if (text == "rotating") return Frame::rotating;
  throw ConfigError("frame must be 'lab' or 'rotating', got '" + text + "'");
}

Mat2 drive_hamiltonian(double t, const PhysicalParams& p, Frame frame) {
  const double e = p.level_spacing;
  const double drive = p.drive_strength * e;
  Mat2 h = Mat2::Zero();
  if (frame == Frame::rotating) {
    if (!p.resonant()) {
      throw ConfigError("rotating frame requires a resonant drive (drive_frequency = omega)");
    }
    h(0, 1) = drive;
    h(1, 0) = drive;
    return h;
  }
  const double phase = p.drive_frequency * t;
  const cplx rot(std::cos(phase), -std::sin(phase));  // e^{-i omega_d t}
  h(0, 0) = 0.5 * e;
  h(1, 1) = -0.5 * e;
  h(0, 1) = drive * rot;
  h(1, 0) = drive * std::conj(rot);
  return h;
}

}  // namespace qcal
