#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qcal/config.hpp"
#include "qcal/ensemble.hpp"
#include "qcal/hybrid.hpp"
#include "qcal/params.hpp"
#include "qcal/reduction.hpp"
#include "qcal/stats.hpp"

namespace qcal {

enum class Mode { trajectories, hybrid_me, fp_reduce, compare };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& text);

struct GridSpec {
  double x_min;
  double x_max;
  int m;
};

struct FPGridSpec {
  double x_min;
  double x_max;
  std::size_t n;
};

/// One experiment: physical parameters plus numerical protocol.
/// dt = 0 and dt_me = 0 select automatic steps (see resolved_dt / resolved_dt_me).
struct ExperimentConfig {
  PhysicalParams params = PhysicalParams::defaults();
  Mode mode = Mode::compare;
  double horizon = 5e-7;
  double dt = 0.0;
  std::size_t n_traj = 400;
  std::optional<std::uint64_t> seed;
  Frame frame = Frame::rotating;
  std::size_t stride = 0;  ///< 0: sample only the initial and final ticks
  InitialX initial_x = InitialX::fixed;
  unsigned threads = 1;
  GridSpec grid{0.0, 0.16, 7};
  double dt_me = 0.0;
  FPGridSpec fp_grid{1e-3, 0.36, 6000};
  CorrectionRoute route = CorrectionRoute::resolvent;
  double bin_width = 0.0;  ///< 0: T_p / 100

  /// Lab frame: 1 / (1000 omega). Rotating frame: 1 / (100 max(G(grid.x_max), lambda)).
  double resolved_dt() const;
  /// 0.1 / (largest stiffness scale of the ME generator on the grid); RK4 keeps
  /// block eigenvalues above -1e-10 at this step on the preset protocols.
  double resolved_dt_me() const;
  double resolved_bin_width() const;
  std::size_t resolved_stride() const;
};

/// Reads experiment keys on top of `base` and checks that the fields needed by
/// the mode are present (a seed for trajectory and compare modes). Unknown
/// keys are reported by the caller through require_all_consumed().
ExperimentConfig read_experiment(const KeyValueConfig& config, const ExperimentConfig& base = {});

/// Full echo of every field; read_experiment(parse(text)) reproduces it exactly.
std::string to_config_text(const ExperimentConfig& config);

/// Histogram anchor that places T_p at a bin centre.
double bin_anchor(const ExperimentConfig& config);

EnsembleResult run_trajectories(const ExperimentConfig& config);

struct MeResult {
  HybridDensity density;
  EvolveReport report;
  Marginal marginal;
};

/// Evolves a Gibbs point mass at X = T_p^2 from 0 to the horizon.
MeResult run_hybrid_me(const ExperimentConfig& config);

StationaryResult run_fp(const ExperimentConfig& config);

struct ComparisonReport {
  Histogram mc;
  Histogram me;
  Histogram fp;
  Distances mc_me;
  Distances mc_fp;
  Distances me_fp;
  Moments mc_te;
  double me_mean_te;
  double me_std_te;
  double fp_mean_te;
  double fp_std_te;
  double ts_mc;      ///< ensemble mean of T_e at the horizon
  double ts_fp;      ///< square root of the stable drift root
  double ts_closed;  ///< coth = 1 closed form
};

struct CompareOutputs {
  EnsembleResult ensemble;
  MeResult me;
  StationaryResult fp;
  ComparisonReport report;
};

CompareOutputs run_compare(const ExperimentConfig& config);

}  // namespace qcal
