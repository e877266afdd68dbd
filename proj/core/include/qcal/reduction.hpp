#pragma once

#include <vector>

#include "qcal/liouvillian.hpp"
#include "qcal/params.hpp"

namespace qcal {

/// How the inverse of m0 on its range is formed for the second-order terms.
enum class CorrectionRoute {
  /// M# = (m0 - G Q v1)^-1 + Q v1 / G. Defined for every X, including the
  /// exceptional point of m0 and the undriven degeneracy.
  resolvent,
  /// M# = sum_{j>=1} |w_j><v_j| / (lambda_j <v_j|w_j>) from spectral_decomposition,
  /// with eigenvector continuity across the difference stencil. Raises
  /// DegeneracyError where m0 is not diagonalizable with distinct eigenvalues.
  spectral,
};

/// Inverse of m0 on its range, annihilating Q and v1 (the group inverse).
Mat4 group_inverse(const LiouvillianBlocks& blocks);

/// First-order drift -<v1| m1 Q> (K^2/s). Requires X > dX_q.
double j1_numeric(double x, const PhysicalParams& params);

/// hbar omega^2 g^2 4 kappa^2 / (g^4 coth^2(hbar omega / 2 k_B sqrt X) + 8 kappa^2) / C,
/// evaluated without reference to the Liouvillian blocks.
double j1_closed_form(double x, const PhysicalParams& params);

struct Corrections {
  double j2;      ///< second-order drift (K^2/s)
  double delta1;  ///< 1/2 <v1| m2 Q> (K^4/s)
  double delta2;  ///< -<v1| m1 M# m1 Q> (K^4/s)
};

struct CorrectionOptions {
  CorrectionRoute route = CorrectionRoute::resolvent;
  double rel_step = 1e-4;  ///< central-difference step h = rel_step * X
};

/// With K(X) = <v1| m1 M# and u = m1 Q:
///   j2 = -(dK/dX) u - f(X) K dQ/dX,   delta1 = 1/2 <v1| m2 Q>,   delta2 = -K u,
/// f the phonon drift. X derivatives are central differences. Requires X - h > dX_q.
Corrections corrections(double x, const PhysicalParams& params, const CorrectionOptions& options = {});

/// Fokker-Planck coefficients at one node, with their breakdown.
struct FPPoint {
  double x;
  double phonon_drift;
  double phonon_diffusion;  ///< Ito variance rate of X
  double j1;
  double j2;
  double delta1;
  double delta2;
  double b;  ///< phonon_drift + j1 + j2
  double d;  ///< phonon_diffusion / 2 + delta1 + delta2, the coefficient inside d^2/dX^2
};

FPPoint fp_point(double x, const PhysicalParams& params, const CorrectionOptions& options = {});

struct FPCoefficients {
  std::vector<FPPoint> nodes;
};

/// Evaluates fp_point on strictly increasing nodes, all > 2 dX_q. Raises
/// NumericalError if D <= 0 at any node, ConfigError for an invalid node list.
FPCoefficients fp_coefficients(const std::vector<double>& nodes, const PhysicalParams& params,
                               const CorrectionOptions& options = {});

/// n equally spaced nodes from x_min to x_max inclusive.
std::vector<double> uniform_nodes(double x_min, double x_max, std::size_t n);

struct StationaryDensity {
  std::vector<double> x;
  std::vector<double> f;  ///< normalized with trapezoid weights
  double mean_x;
  double var_x;
  double mean_t;
  double std_t;
  double mode_x;
};

/// Zero-flux stationary solution F_s proportional to exp(int b/D dX) / D,
/// accumulated with the trapezoid rule in log space.
StationaryDensity stationary_distribution(const FPCoefficients& coeffs);

struct StationaryRoots {
  std::vector<double> stable;    ///< roots with b' < 0, ascending
  std::vector<double> unstable;  ///< roots with b' > 0
  bool multistable() const { return stable.size() > 1; }
};

/// Brackets every sign change of b on the nodes and bisects the continuous b
/// (re-evaluated with fp_point) until |b| < 1e-18 K^2/s or the bracket is
/// narrower than 1e-12 K^2. Raises NumericalError if b has no sign change.
StationaryRoots stationary_temperature(const FPCoefficients& coeffs, const PhysicalParams& params,
                                       const CorrectionOptions& options = {});

/// Linear relaxation time -1 / b'(x_s) of the reduced drift at a stable root,
/// from a central difference with step rel_step * x_s.
double relaxation_time(double x_s, const PhysicalParams& params, const CorrectionOptions& options = {},
                       double rel_step = 1e-3);

/// (T_p^5 + hbar omega^2 g^2 4 kappa^2 / (Sigma V (g^4 + 8 kappa^2)))^(1/5), the
/// coth = 1 approximation of the power balance.
double ts_closed_form(const PhysicalParams& params);

struct StationaryResult {
  FPCoefficients coeffs;
  StationaryDensity density;
  StationaryRoots roots;
  double x_s;  ///< lowest stable root
  double t_s;
  double t_s_closed;
};

StationaryResult solve_stationary(const std::vector<double>& nodes, const PhysicalParams& params,
                                  const CorrectionOptions& options = {});

}  // namespace qcal
