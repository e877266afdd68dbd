#pragma once

#include <cstdint>
#include <vector>

#include "qcal/trajectory.hpp"

namespace qcal {

enum class InitialX {
  fixed,          ///< X0 = T_p^2
  stationary_ou,  ///< X0 ~ N(T_p^2, 2 k_B T_p^3 / C), reflected at 0
};

struct EnsembleOptions {
  std::size_t n_traj = 1;
  double horizon = 0.0;
  double dt = 0.0;
  Frame frame = Frame::rotating;
  std::uint64_t seed = 0;
  std::size_t stride = 1;
  InitialX initial_x = InitialX::fixed;
  unsigned threads = 1;
  bool keep_records = false;
};

struct TrajectorySummary {
  bool started_excited;
  double x_final;
  double te_final;
  double pop_excited;
  std::uint64_t n_down;
  std::uint64_t n_up;
  double ledger_residual;
  double max_norm_error;
};

/// Ensemble average at one sample index.
struct MeanSample {
  double t;
  double te;
  double pop_excited;
  double n_down;
  double n_up;
};

struct EnsembleResult {
  std::vector<TrajectorySummary> finals;
  std::vector<MeanSample> mean_series;
  std::vector<TrajectoryRecord> records;  ///< only with keep_records
  double mean_te = 0.0;
  double std_te = 0.0;
  std::uint64_t total_down = 0;
  std::uint64_t total_up = 0;
};

/// Draws the initial state: qubit excited with the Gibbs probability
/// e^{-b}/(1+e^{-b}), b = hbar omega / k_B T_p, otherwise ground; X0 per `mode`.
HybridState sample_initial_state(Philox4x64& rng, const PhysicalParams& params, InitialX mode);

/// Runs n_traj independent trajectories. Trajectory i draws its initial state
/// and its dynamics from Philox4x64(seed, i); results are stored by index and
/// reduced in index order, so they do not depend on `threads`.
EnsembleResult run_ensemble(const EnsembleOptions& options, const PhysicalParams& params);

}  // namespace qcal
