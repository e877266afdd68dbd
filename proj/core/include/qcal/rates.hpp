#pragma once

#include <cmath>

#include "qcal/params.hpp"

namespace qcal {

/// Qubit jump rates at a calorimeter temperature-squared X (1/s).
struct JumpRates {
  double down;  ///< emission, excited -> ground, heats the calorimeter
  double up;    ///< absorption, ground -> excited, cools the calorimeter

  double total() const { return down + up; }
};

/// Thermal jump rates. Above the jump quantum (X > dX_q) they satisfy
/// down - up = g^2 omega and down / up = exp(hbar omega / k_B sqrt(X)); at or
/// below it, down = gamma_floor and up = 0 so an up-jump can never push X
/// negative. Throws DomainError for X < 0.
JumpRates jump_rates(double x, const PhysicalParams& params);

/// Electron-phonon drift (K^2/s) and Ito variance rate (K^4/s) of X.
struct PhononCoefficients {
  double drift;
  double diffusion;
};

/// drift = Sigma V (T_p^5 - X^(5/2)) / C; diffusion = 10 k_B Sigma V T_p^6 / C^2,
/// independent of X. Throws DomainError for X < 0.
PhononCoefficients phonon_coefficients(double x, const PhysicalParams& params);

/// Rates and phonon coefficients with the parameter-only constants hoisted,
/// for inner loops. Agrees exactly with jump_rates and phonon_coefficients;
/// performs no domain check.
class RateKernel {
 public:
  explicit RateKernel(const PhysicalParams& params);

  JumpRates rates(double x) const {
    if (x <= threshold_) return {floor_, 0.0};
    const double beta = beta_scale_ / std::sqrt(x);
    double up;
    // exp is several times cheaper than expm1; 1 - e^{-beta} only cancels for
    // small beta, i.e. temperatures well above the level spacing.
    if (beta > 0.5) {
      const double e = std::exp(-beta);
      up = gap_ * e / (1.0 - e);
    } else {
      up = gap_ / std::expm1(beta);
    }
    return {up + gap_, up};
  }

  PhononCoefficients phonon(double x) const {
    return {drift_scale_ * (tp5_ - x * x * std::sqrt(x)), diffusion_};
  }

 private:
  double threshold_, floor_, gap_, beta_scale_;
  double drift_scale_, tp5_, diffusion_;
};

}  // namespace qcal
