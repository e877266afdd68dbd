#include "qcal/params.hpp"

#include <cmath>
#include <sstream>

#include "qcal/constants.hpp"
#include "qcal/errors.hpp"

namespace qcal {

using constants::hbar;
using constants::k_B;

PhysicalParams PhysicalParams::defaults() {
  PhysicalParams p{};
  p.level_spacing = 0.5 * k_B;  // 0.5 K
  p.drive_strength = 0.05;
  p.drive_frequency = p.level_spacing / hbar;
  p.coupling = std::sqrt(0.1);
  p.heat_capacity_coeff = 1500.0 * k_B;  // 1500 k_B / K
  p.electron_count = 8.5e7;              // Cu conduction electrons in 1e-21 m^3
  p.sigma_v = 2e9 * 1e-21;               // Sigma = 2e9 W K^-5 m^-3, V = 1e-21 m^3
  p.phonon_temp = 0.1;
  p.gamma_floor = 1.0;
  return p;
}

double PhysicalParams::omega() const { return level_spacing / hbar; }
double PhysicalParams::level_spacing_K() const { return level_spacing / k_B; }
double PhysicalParams::jump_quantum() const { return level_spacing / heat_capacity_coeff; }
double PhysicalParams::lambda() const { return drive_strength * omega(); }

bool PhysicalParams::resonant() const {
  return std::abs(drive_frequency - omega()) <= 1e-12 * omega();
}

void PhysicalParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid physical parameter: ") + what);
  };
  require(std::isfinite(level_spacing) && level_spacing > 0, "level_spacing must be > 0");
  require(std::isfinite(drive_strength) && drive_strength >= 0, "drive_strength must be >= 0");
  require(std::isfinite(drive_frequency) && drive_frequency > 0, "drive_frequency must be > 0");
  require(std::isfinite(coupling) && coupling >= 0, "coupling must be >= 0");
  require(std::isfinite(heat_capacity_coeff) && heat_capacity_coeff > 0,
          "heat_capacity_coeff must be > 0");
  require(std::isfinite(electron_count) && electron_count > 0, "electron_count must be > 0");
  require(std::isfinite(sigma_v) && sigma_v >= 0, "sigma_v must be >= 0");
  require(std::isfinite(phonon_temp) && phonon_temp > 0, "phonon_temp must be > 0");
  require(std::isfinite(gamma_floor) && gamma_floor > 0, "gamma_floor must be > 0");
}

PhysicalParams read_params(const KeyValueConfig& config, const PhysicalParams& base) {
  PhysicalParams p = base;
  const bool resonant_base = base.resonant();

  auto exclusive = [&](const char* si, const char* kelvin) {
    if (config.contains(si) && config.contains(kelvin)) {
      throw ConfigError(config.source() + ": keys '" + si + "' and '" + kelvin +
                        "' are mutually exclusive");
    }
  };
  exclusive("level_spacing", "level_spacing_K");
  exclusive("heat_capacity_coeff", "heat_capacity_coeff_K");
  exclusive("drive_frequency", "drive_frequency_ratio");
  exclusive("coupling", "coupling_squared");

  if (auto v = config.get_double("level_spacing")) p.level_spacing = *v;
  if (auto v = config.get_double("level_spacing_K")) p.level_spacing = *v * k_B;
  if (auto v = config.get_double("heat_capacity_coeff")) p.heat_capacity_coeff = *v;
  if (auto v = config.get_double("heat_capacity_coeff_K")) p.heat_capacity_coeff = *v * k_B;
  if (auto v = config.get_double("drive_strength")) p.drive_strength = *v;
  if (auto v = config.get_double("coupling")) p.coupling = *v;
  if (auto v = config.get_double("coupling_squared")) {
    if (!(*v >= 0.0)) throw ConfigError(config.source() + ": coupling_squared must be >= 0");
    p.coupling = std::sqrt(*v);
  }
  if (auto v = config.get_double("electron_count")) p.electron_count = *v;
  if (auto v = config.get_double("sigma_v")) p.sigma_v = *v;
  if (auto v = config.get_double("phonon_temp")) p.phonon_temp = *v;
  if (auto v = config.get_double("gamma_floor")) p.gamma_floor = *v;

  if (auto v = config.get_double("drive_frequency")) {
    p.drive_frequency = *v;
  } else if (auto r = config.get_double("drive_frequency_ratio")) {
    p.drive_frequency = *r * p.omega();
  } else if (resonant_base) {
    p.drive_frequency = p.omega();
  }
  p.validate();
  return p;
}

std::string to_config_text(const PhysicalParams& p) {
  std::ostringstream os;
  os << "level_spacing = " << format_double(p.level_spacing) << "\n"
     << "drive_strength = " << format_double(p.drive_strength) << "\n"
     << "drive_frequency = " << format_double(p.drive_frequency) << "\n"
     << "coupling = " << format_double(p.coupling) << "\n"
     << "heat_capacity_coeff = " << format_double(p.heat_capacity_coeff) << "\n"
     << "electron_count = " << format_double(p.electron_count) << "\n"
     << "sigma_v = " << format_double(p.sigma_v) << "\n"
     << "phonon_temp = " << format_double(p.phonon_temp) << "\n"
     << "gamma_floor = " << format_double(p.gamma_floor) << "\n";
  return os.str();
}

PhysicalParams params_from_text(std::string_view text) {
  const auto config = KeyValueConfig::parse(text);
  auto p = read_params(config);
  config.require_all_consumed();
  return p;
}

bool operator==(const PhysicalParams& a, const PhysicalParams& b) {
  return a.level_spacing == b.level_spacing && a.drive_strength == b.drive_strength &&
         a.drive_frequency == b.drive_frequency && a.coupling == b.coupling &&
         a.heat_capacity_coeff == b.heat_capacity_coeff &&
         a.electron_count == b.electron_count && a.sigma_v == b.sigma_v &&
         a.phonon_temp == b.phonon_temp && a.gamma_floor == b.gamma_floor;
}

}  // namespace qcal
