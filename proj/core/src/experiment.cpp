#include "qcal/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcal/errors.hpp"
#include "qcal/rates.hpp"

namespace qcal {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::trajectories: return "trajectories";
    case Mode::hybrid_me: return "hybrid-me";
    case Mode::fp_reduce: return "fp-reduce";
    case Mode::compare: return "compare";
  }
  return "?";
}

Mode mode_from_string(const std::string& text) {
  if (text == "trajectories") return Mode::trajectories;
  if (text == "hybrid-me") return Mode::hybrid_me;
  if (text == "fp-reduce") return Mode::fp_reduce;
  if (text == "compare") return Mode::compare;
  throw ConfigError("mode must be one of trajectories, hybrid-me, fp-reduce, compare; got '" + text + "'");
}

namespace {

const char* to_string(InitialX mode) {
  return mode == InitialX::fixed ? "fixed" : "stationary_ou";
}

InitialX initial_x_from_string(const std::string& text) {
  if (text == "fixed") return InitialX::fixed;
  if (text == "stationary_ou") return InitialX::stationary_ou;
  throw ConfigError("initial_x must be 'fixed' or 'stationary_ou', got '" + text + "'");
}

const char* to_string(CorrectionRoute route) {
  return route == CorrectionRoute::resolvent ? "resolvent" : "spectral";
}

CorrectionRoute route_from_string(const std::string& text) {
  if (text == "resolvent") return CorrectionRoute::resolvent;
  if (text == "spectral") return CorrectionRoute::spectral;
  throw ConfigError("route must be 'resolvent' or 'spectral', got '" + text + "'");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

double ExperimentConfig::resolved_dt() const {
  if (dt > 0.0) return dt;
  if (frame == Frame::lab) return 1.0 / (1000.0 * params.omega());
  const double gmax = jump_rates(1.5 * grid.x_max, params).down;
  return 1.0 / (100.0 * std::max(gmax, params.lambda()));
}

double ExperimentConfig::resolved_dt_me() const {
  if (dt_me > 0.0) return dt_me;
  const HybridGenerator gen(build_grid(params, grid.x_min, grid.x_max, grid.m), params, frame);
  return 0.1 / gen.limits().max();
}

double ExperimentConfig::resolved_bin_width() const {
  return bin_width > 0.0 ? bin_width : params.phonon_temp / 100.0;
}

std::size_t ExperimentConfig::resolved_stride() const {
  if (stride > 0) return stride;
  const auto ticks = tick_count(horizon, resolved_dt());
  return static_cast<std::size_t>(std::max<std::uint64_t>(ticks, 1));
}

ExperimentConfig read_experiment(const KeyValueConfig& kv, const ExperimentConfig& base) {
  ExperimentConfig c = base;
  c.params = read_params(kv, base.params);
  if (auto v = kv.get_string("mode")) c.mode = mode_from_string(*v);
  if (auto v = kv.get_double("horizon")) c.horizon = *v;
  if (auto v = kv.get_double("dt")) c.dt = *v;
  if (auto v = kv.get_uint("n_traj")) c.n_traj = *v;
  if (auto v = kv.get_uint("seed")) c.seed = *v;
  if (auto v = kv.get_string("frame")) c.frame = frame_from_string(*v);
  if (auto v = kv.get_uint("stride")) c.stride = *v;
  if (auto v = kv.get_string("initial_x")) c.initial_x = initial_x_from_string(*v);
  if (auto v = kv.get_uint("threads")) c.threads = static_cast<unsigned>(*v);
  if (auto v = kv.get_double("x_min")) c.grid.x_min = *v;
  if (auto v = kv.get_double("x_max")) c.grid.x_max = *v;
  if (auto v = kv.get_int("m")) c.grid.m = static_cast<int>(*v);
  if (auto v = kv.get_double("dt_me")) c.dt_me = *v;
  if (auto v = kv.get_double("fp_x_min")) c.fp_grid.x_min = *v;
  if (auto v = kv.get_double("fp_x_max")) c.fp_grid.x_max = *v;
  if (auto v = kv.get_uint("fp_nodes")) c.fp_grid.n = *v;
  if (auto v = kv.get_string("route")) c.route = route_from_string(*v);
  if (auto v = kv.get_double("bin_width")) c.bin_width = *v;

  const std::string where = kv.source() + ": ";
  require(c.horizon > 0.0, where + "horizon must be > 0");
  require(c.dt >= 0.0, where + "dt must be >= 0 (0 selects the automatic step)");
  require(c.dt_me >= 0.0, where + "dt_me must be >= 0 (0 selects the automatic step)");
  require(c.n_traj >= 1, where + "n_traj must be >= 1");
  require(c.threads >= 1, where + "threads must be >= 1");
  require(c.grid.m >= 1, where + "m must be >= 1");
  require(c.fp_grid.n >= 2, where + "fp_nodes must be >= 2");
  require(c.fp_grid.x_max > c.fp_grid.x_min, where + "fp_x_max must exceed fp_x_min");
  require(c.bin_width >= 0.0, where + "bin_width must be >= 0");
  if (c.mode == Mode::trajectories || c.mode == Mode::compare) {
    require(c.seed.has_value(), where + "key 'seed' is required for mode " + to_string(c.mode));
  }
  if (c.frame == Frame::rotating) {
    require(c.params.resonant(), where + "rotating frame requires a resonant drive");
  }
  return c;
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << to_config_text(c.params);
  os << "mode = \"" << to_string(c.mode) << "\"\n"
     << "horizon = " << format_double(c.horizon) << "\n"
     << "dt = " << format_double(c.dt) << "\n"
     << "n_traj = " << c.n_traj << "\n";
  if (c.seed) os << "seed = " << *c.seed << "\n";
  os << "frame = \"" << to_string(c.frame) << "\"\n"
     << "stride = " << c.stride << "\n"
     << "initial_x = \"" << to_string(c.initial_x) << "\"\n"
     << "threads = " << c.threads << "\n"
     << "x_min = " << format_double(c.grid.x_min) << "\n"
     << "x_max = " << format_double(c.grid.x_max) << "\n"
     << "m = " << c.grid.m << "\n"
     << "dt_me = " << format_double(c.dt_me) << "\n"
     << "fp_x_min = " << format_double(c.fp_grid.x_min) << "\n"
     << "fp_x_max = " << format_double(c.fp_grid.x_max) << "\n"
     << "fp_nodes = " << c.fp_grid.n << "\n"
     << "route = \"" << to_string(c.route) << "\"\n"
     << "bin_width = " << format_double(c.bin_width) << "\n";
  return os.str();
}

double bin_anchor(const ExperimentConfig& c) {
  return c.params.phonon_temp - 0.5 * c.resolved_bin_width();
}

EnsembleResult run_trajectories(const ExperimentConfig& c) {
  if (!c.seed) throw ConfigError("trajectory runs need a seed");
  EnsembleOptions o;
  o.n_traj = c.n_traj;
  o.horizon = c.horizon;
  o.dt = c.resolved_dt();
  o.frame = c.frame;
  o.seed = *c.seed;
  o.stride = c.resolved_stride();
  o.initial_x = c.initial_x;
  o.threads = c.threads;
  return run_ensemble(o, c.params);
}

MeResult run_hybrid_me(const ExperimentConfig& c) {
  const XGrid grid = build_grid(c.params, c.grid.x_min, c.grid.x_max, c.grid.m);
  const double tp2 = c.params.phonon_temp * c.params.phonon_temp;
  if (tp2 < grid.x_min || tp2 > grid.x_max()) {
    throw ConfigError("hybrid ME grid must contain T_p^2");
  }
  MeResult r;
  const HybridDensity rho0 = gibbs_point_density(grid, c.params, tp2);
  r.density = evolve(rho0, 0.0, c.horizon, c.resolved_dt_me(), c.params, c.frame, &r.report);
  r.marginal = marginal_and_validate(r.density);
  return r;
}

StationaryResult run_fp(const ExperimentConfig& c) {
  CorrectionOptions opt;
  opt.route = c.route;
  return solve_stationary(uniform_nodes(c.fp_grid.x_min, c.fp_grid.x_max, c.fp_grid.n), c.params, opt);
}

CompareOutputs run_compare(const ExperimentConfig& c) {
  CompareOutputs out;
  out.ensemble = run_trajectories(c);
  out.me = run_hybrid_me(c);
  out.fp = run_fp(c);

  const double w = c.resolved_bin_width();
  const double anchor = bin_anchor(c);
  std::vector<double> te;
  te.reserve(out.ensemble.finals.size());
  for (const auto& f : out.ensemble.finals) te.push_back(f.te_final);

  auto& r = out.report;
  r.mc = aligned_histogram(te, w, anchor);
  r.me = temperature_histogram(uniform_cells(out.me.marginal.x, out.me.marginal.f), w, anchor);
  r.fp = temperature_histogram(trapezoid_cells(out.fp.density.x, out.fp.density.f), w, anchor);
  r.mc_me = distance_metrics(r.mc, r.me);
  r.mc_fp = distance_metrics(r.mc, r.fp);
  r.me_fp = distance_metrics(r.me, r.fp);
  r.mc_te = moments(te);

  double m1 = 0.0, m2 = 0.0, mass = 0.0;
  const auto& mg = out.me.marginal;
  for (std::size_t i = 0; i < mg.x.size(); ++i) {
    const double t = std::sqrt(mg.x[i]);
    m1 += mg.f[i] * t;
    m2 += mg.f[i] * t * t;
    mass += mg.f[i];
  }
  r.me_mean_te = m1 / mass;
  r.me_std_te = std::sqrt(std::max(0.0, m2 / mass - r.me_mean_te * r.me_mean_te));
  r.fp_mean_te = out.fp.density.mean_t;
  r.fp_std_te = out.fp.density.std_t;
  r.ts_mc = r.mc_te.mean;
  r.ts_fp = out.fp.t_s;
  r.ts_closed = out.fp.t_s_closed;
  return out;
}

}  // namespace qcal
