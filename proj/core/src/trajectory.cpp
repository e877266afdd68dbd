#include "qcal/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <boost/random/normal_distribution.hpp>
#include <sstream>

#include "qcal/constants.hpp"
#include "qcal/errors.hpp"

namespace qcal {

double QubitState::norm() const { return std::sqrt(std::norm(excited) + std::norm(ground)); }

double TrajectoryRecord::ledger_residual(const PhysicalParams& params) const {
  const double delta = params.heat_capacity_coeff * (final_state.x - initial.x);
  const double scale = std::max({std::abs(delta), std::abs(ledger.qubit), std::abs(ledger.phonon_drift),
                                 std::abs(ledger.phonon_noise), params.level_spacing});
  return std::abs(delta - ledger.total()) / scale;
}

void check_rate_bound(const JumpRates& rates, double dt, double t) {
  const double p = std::max(rates.down, rates.up) * dt;
  if (!(p < kMaxJumpProbability)) {
    std::ostringstream os;
    os << "time step too large: Gamma_max*dt = " << p << " >= " << kMaxJumpProbability
       << " at t = " << t << " s (Gamma_max = " << std::max(rates.down, rates.up)
       << " 1/s, dt = " << dt << " s)";
    throw ConfigError(os.str());
  }
}

std::uint64_t tick_count(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw ConfigError("horizon and dt must be > 0");
  return static_cast<std::uint64_t>(std::ceil(horizon / dt - 1e-9));
}

namespace {

// Hamiltonian divided by hbar, as angular frequencies.
struct FrequencyMatrix {
  double diag;  // H_00 / hbar = -H_11 / hbar
  cplx off;     // H_01 / hbar; H_10 is its conjugate
};

FrequencyMatrix frequencies(double t, const PhysicalParams& p, Frame frame) {
  const Mat2 h = drive_hamiltonian(t, p, frame) / constants::hbar;
  return {h(0, 0).real(), h(0, 1)};
}

// Euler step of -i H psi - (1/2)(G_down (P_e - |a|^2) + G_up (P_g - |b|^2)) psi,
// then renormalization. Written in real arithmetic; this is the innermost
// loop of every ensemble. Returns |norm - 1| after renormalization (to first
// order, from the squared norm).
inline double qubit_drift_step(QubitState& q, const FrequencyMatrix& h, const JumpRates& r,
                               double dt) {
  const double ar = q.excited.real(), ai = q.excited.imag();
  const double br = q.ground.real(), bi = q.ground.imag();
  const double hr = h.off.real(), hi = h.off.imag();
  const double pa = ar * ar + ai * ai;
  const double pb = br * br + bi * bi;
  const double damp_a = 0.5 * (r.down * (1.0 - pa) - r.up * pb);
  const double damp_b = 0.5 * (r.up * (1.0 - pb) - r.down * pa);
  // H a-row: diag a + off b; H b-row: conj(off) a - diag b. d/dt = -i H psi - damp psi.
  const double ha_r = h.diag * ar + hr * br - hi * bi;
  const double ha_i = h.diag * ai + hr * bi + hi * br;
  const double hb_r = hr * ar + hi * ai - h.diag * br;
  const double hb_i = hr * ai - hi * ar - h.diag * bi;
  const double nar = ar + dt * (ha_i - damp_a * ar);
  const double nai = ai + dt * (-ha_r - damp_a * ai);
  const double nbr = br + dt * (hb_i - damp_b * br);
  const double nbi = bi + dt * (-hb_r - damp_b * bi);
  const double inv = 1.0 / std::sqrt(nar * nar + nai * nai + nbr * nbr + nbi * nbi);
  q.excited = cplx(nar * inv, nai * inv);
  q.ground = cplx(nbr * inv, nbi * inv);
  const double n2 = (nar * nar + nai * nai + nbr * nbr + nbi * nbi) * inv * inv;
  return 0.5 * std::abs(n2 - 1.0);
}

struct XIncrement {
  double drift;
  double noise;
  double reflection;
};

inline XIncrement x_step(double& x, const PhononCoefficients& ph, double dt, double noise) {
  const double drift = ph.drift * dt;
  const double kick = std::sqrt(ph.diffusion * dt) * noise;
  const double raw = x + drift + kick;
  x = std::abs(raw);
  return {drift, kick, x - raw};
}

inline Jump draw_jump(const QubitState& q, const JumpRates& r, double dt, double u) {
  const double p_down = r.down * std::norm(q.excited) * dt;
  if (u < p_down) return Jump::down;
  const double p_up = r.up * std::norm(q.ground) * dt;
  if (u < p_down + p_up) return Jump::up;
  return Jump::none;
}

inline void apply_jump(HybridState& s, Jump jump, double dxq) {
  if (jump == Jump::down) {
    s.qubit = QubitState::ground_state();
    s.x += dxq;
  } else if (jump == Jump::up) {
    if (s.x - dxq < 0.0) {
      std::ostringstream os;
      os << "up-jump would make X negative at t = " << s.t << " s (X = " << s.x << ")";
      throw NumericalError(os.str());
    }
    s.qubit = QubitState::excited_state();
    s.x -= dxq;
  }
}

}  // namespace

HybridState continuous_step(const HybridState& state, double dt, const PhysicalParams& params,
                            Frame frame, double noise, const JumpRates& rates) {
  if (!(dt > 0.0)) throw ConfigError("continuous_step: dt must be > 0");
  check_rate_bound(rates, dt, state.t);
  HybridState out = state;
  qubit_drift_step(out.qubit, frequencies(state.t, params, frame), rates, dt);
  x_step(out.x, phonon_coefficients(state.x, params), dt, noise);
  out.t = state.t + dt;
  return out;
}

HybridState continuous_step(const HybridState& state, double dt, const PhysicalParams& params,
                            Frame frame, double noise) {
  return continuous_step(state, dt, params, frame, noise, jump_rates(state.x, params));
}

JumpOutcome jump_step(const HybridState& state, double dt, const PhysicalParams& params,
                      double uniform, const JumpRates& rates) {
  check_rate_bound(rates, dt, state.t);
  JumpOutcome out{state, draw_jump(state.qubit, rates, dt, uniform)};
  apply_jump(out.state, out.jump, params.jump_quantum());
  return out;
}

JumpOutcome jump_step(const HybridState& state, double dt, const PhysicalParams& params,
                      double uniform) {
  return jump_step(state, dt, params, uniform, jump_rates(state.x, params));
}

TrajectoryRecord run_trajectory(const HybridState& init, const TrajectoryOptions& opt,
                                const PhysicalParams& params, Philox4x64& rng) {
  if (opt.stride < 1) throw ConfigError("sampling stride must be >= 1");
  const std::uint64_t ticks = tick_count(opt.horizon, opt.dt);
  const double dt = opt.dt;
  const double dxq = params.jump_quantum();
  const double c = params.heat_capacity_coeff;
  const double t0 = init.t;

  // Lab-frame drive phasor e^{-i omega_d t} advanced by a fixed rotation and
  // re-evaluated exactly every kResync ticks.
  constexpr std::uint64_t kResync = 4096;
  FrequencyMatrix h = frequencies(t0, params, opt.frame);
  const bool lab = opt.frame == Frame::lab;
  const double drive = params.drive_strength * params.omega();
  const cplx step_rot = std::polar(1.0, -params.drive_frequency * dt);
  cplx phasor = std::polar(1.0, -params.drive_frequency * t0);

  const RateKernel kernel(params);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  TrajectoryRecord rec;
  rec.initial = init;
  HybridState s = init;
  double drift_x = 0.0, noise_x = 0.0, refl_x = 0.0;

  auto sample = [&] {
    rec.samples.push_back({s.t, std::sqrt(s.x), s.qubit.pop_excited(), rec.n_down, rec.n_up});
  };
  sample();

  std::size_t until_sample = opt.stride;
  for (std::uint64_t k = 0; k < ticks; ++k) {
    s.t = t0 + static_cast<double>(k) * dt;
    if (lab) {
      if (k % kResync == 0) phasor = std::polar(1.0, -params.drive_frequency * s.t);
      h.off = drive * phasor;
      const double pr = phasor.real() * step_rot.real() - phasor.imag() * step_rot.imag();
      const double pi = phasor.real() * step_rot.imag() + phasor.imag() * step_rot.real();
      phasor = cplx(pr, pi);
    }
    const JumpRates rates = kernel.rates(s.x);
    if (!(std::max(rates.down, rates.up) * dt < kMaxJumpProbability)) {
      check_rate_bound(rates, dt, s.t);
    }
    const PhononCoefficients ph = kernel.phonon(s.x);
    const double noise = normal(rng);
    const double u = rng.uniform();

    rec.max_norm_error = std::max(rec.max_norm_error, qubit_drift_step(s.qubit, h, rates, dt));
    const XIncrement inc = x_step(s.x, ph, dt, noise);
    drift_x += inc.drift;
    noise_x += inc.noise;
    refl_x += inc.reflection;

    const Jump jump = draw_jump(s.qubit, rates, dt, u);
    if (jump != Jump::none) {
      apply_jump(s, jump, dxq);
      if (jump == Jump::down) {
        ++rec.n_down;
      } else {
        ++rec.n_up;
      }
      if (opt.log_jumps) rec.jumps.push_back({t0 + static_cast<double>(k + 1) * dt, jump});
    }
    s.t = t0 + static_cast<double>(k + 1) * dt;
    if (--until_sample == 0 || k + 1 == ticks) {
      sample();
      until_sample = opt.stride;
    }
  }

  rec.final_state = s;
  rec.ledger.qubit = params.level_spacing * (static_cast<double>(rec.n_down) - static_cast<double>(rec.n_up));
  rec.ledger.phonon_drift = c * drift_x;
  rec.ledger.phonon_noise = c * noise_x;
  rec.ledger.reflection = c * refl_x;
  return rec;
}

TrajectoryRecord run_trajectory(const HybridState& init, const TrajectoryOptions& options,
                                const PhysicalParams& params) {
  Philox4x64 rng(options.seed, options.stream);
  return run_trajectory(init, options, params, rng);
}

}  // namespace qcal
