#include "qcal/ensemble.hpp"

#include <atomic>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <exception>
#include <thread>

#include "qcal/constants.hpp"
#include "qcal/errors.hpp"

namespace qcal {

HybridState sample_initial_state(Philox4x64& rng, const PhysicalParams& params, InitialX mode) {
  const double b = params.level_spacing / (constants::k_B * params.phonon_temp);
  const double p_excited = std::exp(-b) / (1.0 + std::exp(-b));
  HybridState s;
  s.qubit = rng.uniform() < p_excited ? QubitState::excited_state() : QubitState::ground_state();
  const double tp = params.phonon_temp;
  s.x = tp * tp;
  if (mode == InitialX::stationary_ou) {
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(2.0 * constants::k_B * tp * tp * tp / params.heat_capacity_coeff);
    s.x = std::abs(s.x + sd * normal(rng));
  }
  s.t = 0.0;
  return s;
}

EnsembleResult run_ensemble(const EnsembleOptions& opt, const PhysicalParams& params) {
  if (opt.n_traj < 1) throw ConfigError("n_traj must be >= 1");
  const std::size_t n = opt.n_traj;
  std::vector<TrajectoryRecord> records(n);
  std::vector<bool> started_excited(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  TrajectoryOptions topt;
  topt.horizon = opt.horizon;
  topt.dt = opt.dt;
  topt.frame = opt.frame;
  topt.seed = opt.seed;
  topt.stride = opt.stride;
  topt.log_jumps = opt.keep_records;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        Philox4x64 rng(opt.seed, i);
        const HybridState init = sample_initial_state(rng, params, opt.initial_x);
        started_excited[i] = init.qubit.pop_excited() > 0.5;
        auto opts = topt;
        opts.stream = i;
        records[i] = run_trajectory(init, opts, params, rng);
      } catch (...) {
        errors[i] = std::current_exception();
        next = n;
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EnsembleResult out;
  out.finals.reserve(n);
  const std::size_t n_samples = records.front().samples.size();
  out.mean_series.assign(n_samples, MeanSample{0, 0, 0, 0, 0});
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    out.finals.push_back({started_excited[i], r.final_state.x, std::sqrt(r.final_state.x),
                          r.final_state.qubit.pop_excited(), r.n_down, r.n_up,
                          r.ledger_residual(params), r.max_norm_error});
    sum += std::sqrt(r.final_state.x);
    out.total_down += r.n_down;
    out.total_up += r.n_up;
    for (std::size_t k = 0; k < n_samples; ++k) {
      const auto& s = r.samples[k];
      auto& m = out.mean_series[k];
      m.t = s.t;
      m.te += s.te;
      m.pop_excited += s.pop_excited;
      m.n_down += static_cast<double>(s.n_down);
      m.n_up += static_cast<double>(s.n_up);
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& m : out.mean_series) {
    m.te *= inv;
    m.pop_excited *= inv;
    m.n_down *= inv;
    m.n_up *= inv;
  }
  out.mean_te = sum * inv;
  double ss = 0.0;
  for (const auto& f : out.finals) ss += (f.te_final - out.mean_te) * (f.te_final - out.mean_te);
  out.std_te = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  if (opt.keep_records) out.records = std::move(records);
  return out;
}

}  // namespace qcal
