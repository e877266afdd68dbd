#include "qcal/rates.hpp"

#include <string>

#include "qcal/constants.hpp"
#include "qcal/errors.hpp"

namespace qcal {

namespace {

void require_nonnegative(double x, const char* who) {
  if (!(x >= 0.0)) {
    throw DomainError(std::string(who) + ": temperature-squared must be >= 0, got " +
                      std::to_string(x));
  }
}

}  // namespace

RateKernel::RateKernel(const PhysicalParams& p)
    : threshold_(p.jump_quantum()),
      floor_(p.gamma_floor),
      gap_(p.coupling_squared() * p.omega()),
      beta_scale_(p.level_spacing / constants::k_B),
      drift_scale_(p.sigma_v / p.heat_capacity_coeff),
      tp5_(std::pow(p.phonon_temp, 5)),
      diffusion_(10.0 * constants::k_B * p.sigma_v * std::pow(p.phonon_temp, 6) /
                 (p.heat_capacity_coeff * p.heat_capacity_coeff)) {}

JumpRates jump_rates(double x, const PhysicalParams& p) {
  require_nonnegative(x, "jump_rates");
  return RateKernel(p).rates(x);
}

PhononCoefficients phonon_coefficients(double x, const PhysicalParams& p) {
  require_nonnegative(x, "phonon_coefficients");
  return RateKernel(p).phonon(x);
}

}  // namespace qcal
