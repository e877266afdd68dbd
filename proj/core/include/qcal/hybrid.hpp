#pragma once

#include <cstdint>
#include <vector>

#include "qcal/hamiltonian.hpp"
#include "qcal/linalg.hpp"
#include "qcal/params.hpp"

namespace qcal {

/// Uniform grid of temperature-squared values with spacing dX = dX_q / m, so a
/// qubit jump moves mass by exactly m nodes.
struct XGrid {
  double x_min = 0.0;
  double dx = 0.0;
  int m = 1;
  std::size_t n = 0;

  double node(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
  double x_max() const { return node(n - 1); }
  /// Index of the node nearest to x, clamped to the grid.
  std::size_t nearest(double x) const;
};

/// Grid starting at x_min with the largest node count whose last node does
/// not exceed x_max. Raises ConfigError if x_max - x_min < 3 dX_q, m < 1 or
/// x_min < 0.
XGrid build_grid(const PhysicalParams& params, double x_min, double x_max, int m);

/// Joint state: one 2x2 qubit block rho_i per node, normalized so that
/// sum_i tr(rho_i) dX = 1. `leak` is the mass that has left the grid through
/// jumps whose target node lies outside it.
struct HybridDensity {
  XGrid grid;
  std::vector<Mat2> blocks;
  double leak = 0.0;

  double total_mass() const;
};

/// All mass at the node nearest x0 with the qubit in its Gibbs state at T_p.
HybridDensity gibbs_point_density(const XGrid& grid, const PhysicalParams& params, double x0);

/// Stiffness scales of the generator (1/s). An explicit step dt is accepted
/// when dt * max(...) < 0.5.
struct StabilityLimits {
  double rate;       ///< max_i G(X_i)
  double drift;      ///< max |phonon drift| / dX
  double diffusion;  ///< 2 D / dX^2 with D half the Ito variance rate
  double coherent;   ///< spread of H / hbar

  double max() const;
};

/// Forward generator of the trajectory process on a fixed grid. Rates and
/// phonon coefficients are tabulated at construction.
class HybridGenerator {
 public:
  HybridGenerator(const XGrid& grid, const PhysicalParams& params, Frame frame);

  /// Writes d(rho)/dt into `out` and returns the rate (mass per second) at
  /// which probability leaves the grid.
  double apply(const std::vector<Mat2>& rho, double t, std::vector<Mat2>& out) const;

  const StabilityLimits& limits() const { return limits_; }
  const XGrid& grid() const { return grid_; }

 private:
  XGrid grid_;
  PhysicalParams params_;
  Frame frame_;
  std::vector<double> down_, up_;
  std::vector<double> face_drift_;  // drift at X_i + dX/2, i = 0..n-2
  double diffusion_;                // D = (Ito variance rate) / 2
  StabilityLimits limits_;
};

/// Convenience wrapper: d(rho)/dt for `rho` at time t.
std::vector<Mat2> apply_generator(const HybridDensity& rho, double t, const PhysicalParams& params,
                                  Frame frame);

struct EvolveReport {
  std::uint64_t steps = 0;
  double max_trace_drift = 0.0;   ///< max over steps of |mass + leak - initial mass|
  double min_eigenvalue = 0.0;    ///< min over steps and nodes, in mass units (eig(rho_i) dX)
  double leak = 0.0;
  StabilityLimits limits{};
};

/// Classical RK4 from t0 to t1 with step dt_me (the last step is shortened to
/// land on t1). Blocks are re-symmetrized after every step; the normalization
/// is monitored, never rescaled. Raises StabilityError when
/// dt_me * limits.max() >= 0.5 and NumericalError when the leak exceeds 1e-6.
HybridDensity evolve(const HybridDensity& rho, double t0, double t1, double dt_me,
                     const PhysicalParams& params, Frame frame, EvolveReport* report = nullptr);

struct MarginalDiagnostics {
  double total_mass;
  double min_trace;        ///< min_i tr(rho_i) dX
  double min_eigenvalue;   ///< min_i eig(rho_i) dX
  double hermiticity_residual;
  double leak;
};

struct Marginal {
  std::vector<double> x;
  std::vector<double> f;  ///< F(X_i) = tr(rho_i)
  MarginalDiagnostics diagnostics;
};

Marginal marginal_and_validate(const HybridDensity& rho);

}  // namespace qcal
