#pragma once

#include <cstdint>
#include <vector>

#include "qcal/hamiltonian.hpp"
#include "qcal/linalg.hpp"
#include "qcal/params.hpp"
#include "qcal/rates.hpp"
#include "qcal/rng.hpp"

namespace qcal {

/// Qubit wavefunction in the sigma_z eigenbasis.
struct QubitState {
  cplx excited{1.0, 0.0};
  cplx ground{0.0, 0.0};

  static QubitState excited_state() { return {cplx(1.0), cplx(0.0)}; }
  static QubitState ground_state() { return {cplx(0.0), cplx(1.0)}; }
  double norm() const;
  double pop_excited() const { return std::norm(excited); }
};

/// Qubit wavefunction together with the calorimeter's X = T_e^2 (K^2), X >= 0.
struct HybridState {
  QubitState qubit;
  double x = 0.0;
  double t = 0.0;
};

enum class Jump { none, up, down };

/// Largest per-step jump probability allowed: max(G_down, G_up) * dt.
inline constexpr double kMaxJumpProbability = 0.01;

/// Throws ConfigError if max(G_down, G_up) * dt >= kMaxJumpProbability.
void check_rate_bound(const JumpRates& rates, double dt, double t);

/// Deterministic part of one tick: explicit Euler step of the non-Hermitian
/// qubit drift followed by renormalization, and an Euler-Maruyama step of the
/// phonon drift and noise for X, reflected at 0. `noise` is a standard normal
/// draw. The overload taking `rates` uses them instead of evaluating them at
/// state.x (the integrator freezes the rates over a tick).
HybridState continuous_step(const HybridState& state, double dt, const PhysicalParams& params,
                            Frame frame, double noise);
HybridState continuous_step(const HybridState& state, double dt, const PhysicalParams& params,
                            Frame frame, double noise, const JumpRates& rates);

struct JumpOutcome {
  HybridState state;
  Jump jump = Jump::none;
};

/// Bernoulli thinning with at most one jump: `uniform` in [0,1) selects a
/// down-jump with probability G_down |a|^2 dt, else an up-jump with probability
/// G_up |b|^2 dt. A down-jump moves X up by dX_q, an up-jump down by dX_q.
JumpOutcome jump_step(const HybridState& state, double dt, const PhysicalParams& params,
                      double uniform);
JumpOutcome jump_step(const HybridState& state, double dt, const PhysicalParams& params,
                      double uniform, const JumpRates& rates);

struct JumpEvent {
  double t;
  Jump direction;
};

struct Sample {
  double t;
  double te;
  double pop_excited;
  std::uint64_t n_down;
  std::uint64_t n_up;
};

/// Calorimeter energy inflow by channel (J). The reflection term is the energy
/// added when X is reflected at 0.
struct EnergyLedger {
  double qubit = 0.0;
  double phonon_drift = 0.0;
  double phonon_noise = 0.0;
  double reflection = 0.0;

  double total() const { return qubit + phonon_drift + phonon_noise + reflection; }
};

struct TrajectoryOptions {
  double horizon = 0.0;
  double dt = 0.0;
  Frame frame = Frame::rotating;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t stride = 1;
  bool log_jumps = true;
};

struct TrajectoryRecord {
  HybridState initial;
  HybridState final_state;
  std::vector<Sample> samples;
  std::vector<JumpEvent> jumps;
  std::uint64_t n_down = 0;
  std::uint64_t n_up = 0;
  EnergyLedger ledger;
  double max_norm_error = 0.0;

  /// |C (X_end - X_start) - ledger.total()| / max(C |X_end - X_start|, ledger scale)
  double ledger_residual(const PhysicalParams& params) const;
};

/// Number of ticks to reach `horizon` with step `dt`.
std::uint64_t tick_count(double horizon, double dt);

/// Integrates one trajectory: each tick applies continuous_step then
/// jump_step with rates frozen at the start of the tick. Samples are taken at
/// tick 0, every `stride` ticks and at the final tick. Deterministic in
/// (init, rng state, params, options).
TrajectoryRecord run_trajectory(const HybridState& init, const TrajectoryOptions& options,
                                const PhysicalParams& params, Philox4x64& rng);
/// Same, with the generator Philox4x64(options.seed, options.stream).
TrajectoryRecord run_trajectory(const HybridState& init, const TrajectoryOptions& options,
                                const PhysicalParams& params);

}  // namespace qcal
