#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcal/config.hpp"
#include "qcal/errors.hpp"
#include "qcal/experiment.hpp"
#include "qcal/io.hpp"
#include "qcal/reduction.hpp"
#include "qcal/stats.hpp"

namespace qcal::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr std::uint64_t kPresetSeed = 1;
constexpr std::size_t kPresetTrajectories = 10000;
/// Long-horizon runs cover this many linear relaxation times of the reduced drift.
constexpr double kRelaxationTimes = 12.0;
/// Half-width of the preset ME window around T_p^2, in jump quanta.
constexpr double kWindowQuanta = 20.0;
constexpr int kWindowShifts = 40;

struct Options {
  std::string command;  // subcommand name; presets append their figure name
  std::string preset;
  std::string config_path;
  std::string manifest_path;
  std::string out = "qcal-out";
  std::uint64_t seed = 0;
  double g2 = 0.0;
  double kappa = 0.0;
  std::size_t n_traj = 0;
  unsigned threads = 1;
  std::vector<std::string> sets;
  std::vector<double> ratios;
  std::vector<double> kappas;

  bool has_seed = false;
  bool has_g2 = false;
  bool has_kappa = false;
  bool has_n_traj = false;
  bool has_threads = false;
};

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + format_double(values[i]);
  return s;
}

std::vector<double> split_doubles(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto parsed = KeyValueConfig::parse(what + " = " + item, "manifest argument").get_double(what);
    v.push_back(*parsed);
  }
  if (v.empty()) throw ConfigError("argument '" + what + "' is empty");
  return v;
}

/// Preset-only options that are not part of the experiment config, as
/// `name=value` strings stored in the manifest.
struct PresetArgs {
  std::vector<double> ratios{0.90, 0.92, 0.94, 0.96, 0.98, 1.00, 1.02, 1.04, 1.06, 1.08, 1.10};
  std::vector<double> kappas{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
  bool mc = true;

  std::vector<std::string> encode(const std::string& preset) const {
    if (preset == "fig2") return {"ratios=" + join(ratios)};
    if (preset == "fig3a") return {"kappas=" + join(kappas), std::string("mc=") + (mc ? "on" : "off")};
    return {};
  }

  void decode(const std::vector<std::string>& args) {
    for (const auto& a : args) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw ConfigError("malformed manifest argument '" + a + "'");
      const std::string key = a.substr(0, eq), value = a.substr(eq + 1);
      if (key == "ratios") {
        ratios = split_doubles(value, key);
      } else if (key == "kappas") {
        kappas = split_doubles(value, key);
      } else if (key == "mc") {
        if (value != "on" && value != "off") throw ConfigError("manifest argument mc must be on or off");
        mc = value == "on";
      } else {
        throw ConfigError("unknown manifest argument '" + key + "'");
      }
    }
  }
};

Mode mode_for(const std::string& command, const std::string& preset) {
  if (command == "simulate") return Mode::trajectories;
  if (command == "evolve-me") return Mode::hybrid_me;
  if (command == "reduce-fp" || command == "stationary") return Mode::fp_reduce;
  if (command == "compare") return Mode::compare;
  if (preset == "fig3a") return Mode::fp_reduce;
  return preset == "fig4" ? Mode::compare : Mode::trajectories;
}

ExperimentConfig base_config(const Options& o) {
  ExperimentConfig c;
  c.mode = mode_for(o.command, o.preset);
  if (!o.preset.empty()) {
    c.seed = kPresetSeed;
    c.n_traj = kPresetTrajectories;
    c.frame = (o.preset == "fig1" || o.preset == "fig2") ? Frame::lab : Frame::rotating;
  }
  return c;
}

/// Fills protocol fields that depend on the final physical parameters, unless
/// the config set them explicitly.
void apply_preset_protocol(const std::string& preset, const KeyValueConfig& kv, ExperimentConfig& c) {
  if (preset != "fig1" && preset != "fig2") return;
  const double omega = c.params.omega();
  if (!kv.contains("horizon")) c.horizon = 10.0 * 2.0 * std::numbers::pi / omega;
  const double tp2 = c.params.phonon_temp * c.params.phonon_temp;
  const double half = kWindowQuanta * c.params.jump_quantum();
  if (!kv.contains("x_min")) c.grid.x_min = std::max(0.0, tp2 - half);
  if (!kv.contains("x_max")) c.grid.x_max = tp2 + half;
  if (!kv.contains("m")) c.grid.m = kWindowShifts;
}

struct Prepared {
  ExperimentConfig config;
  PresetArgs preset_args;
  std::vector<ManifestInput> inputs;
};

Prepared prepare(const Options& o) {
  Prepared p;
  KeyValueConfig kv;
  const bool replay = !o.manifest_path.empty();
  if (replay) {
    if (!o.config_path.empty() || !o.sets.empty() || o.has_seed || o.has_g2 || o.has_kappa || o.has_n_traj ||
        !o.ratios.empty() || !o.kappas.empty()) {
      throw ConfigError("--manifest replays a run exactly; only --out and --threads may accompany it");
    }
    const std::string text = read_file(o.manifest_path);
    const Manifest m = parse_manifest(text);
    const std::string command = o.preset.empty() ? o.command : o.command + " " + o.preset;
    if (m.command != command) {
      throw ConfigError("manifest was written by '" + m.command + "', not '" + command + "'");
    }
    kv = KeyValueConfig::parse(m.config_text, o.manifest_path);
    p.preset_args.decode(m.arguments);
    p.inputs.push_back({o.manifest_path, git_blob_sha1(text)});
  } else if (!o.config_path.empty()) {
    const std::string text = read_file(o.config_path);
    kv = KeyValueConfig::parse(text, o.config_path);
    p.inputs.push_back({o.config_path, git_blob_sha1(text)});
  } else {
    kv = KeyValueConfig::parse("", "<defaults>");
  }

  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + s + "'");
    std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    const auto trim = [](std::string& t) {
      t.erase(0, t.find_first_not_of(" \t"));
      t.erase(t.find_last_not_of(" \t") + 1);
    };
    trim(key);
    trim(value);
    kv.set(key, value);
  }
  if (o.has_seed) kv.set("seed", std::to_string(o.seed));
  if (o.has_g2) {
    if (kv.contains("coupling")) kv.set("coupling", format_double(std::sqrt(std::max(0.0, o.g2))));
    else kv.set("coupling_squared", format_double(o.g2));
  }
  if (o.has_kappa) kv.set("drive_strength", format_double(o.kappa));
  if (o.has_n_traj) kv.set("n_traj", std::to_string(o.n_traj));
  if (o.has_threads) kv.set("threads", std::to_string(o.threads));

  const Mode wanted = mode_for(o.command, o.preset);
  if (auto m = kv.get_string("mode"); m && mode_from_string(*m) != wanted) {
    throw ConfigError(kv.source() + ": mode '" + *m + "' does not match command '" + o.command + "'");
  }
  p.config = read_experiment(kv, base_config(o));
  p.config.mode = wanted;
  if (!replay) apply_preset_protocol(o.preset, kv, p.config);
  kv.require_all_consumed();

  if (!replay) {
    if (!o.ratios.empty()) p.preset_args.ratios = o.ratios;
    if (!o.kappas.empty()) p.preset_args.kappas = o.kappas;
    if (o.preset == "fig3a") p.preset_args.mc = o.has_n_traj;
  }
  return p;
}

/// Collects output files and writes the manifest last.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    write_file(dir_ / name, content);
    names_.push_back(name);
  }

  void finish(const std::string& command, const Prepared& p, const std::string& preset) {
    Manifest m;
    m.command = command;
    m.arguments = p.preset_args.encode(preset);
    m.config_text = to_config_text(p.config);
    m.config_sha1 = git_blob_sha1(m.config_text);
    m.inputs = p.inputs;
    m.outputs = names_;
    m.outputs.push_back("manifest.json");
    write_file(dir_ / "manifest.json", manifest_json(m));
  }

  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> final_temperatures(const EnsembleResult& r) {
  std::vector<double> te;
  te.reserve(r.finals.size());
  for (const auto& f : r.finals) te.push_back(f.te_final);
  return te;
}

Histogram mc_histogram(const ExperimentConfig& c, const EnsembleResult& r) {
  return aligned_histogram(final_temperatures(r), c.resolved_bin_width(), bin_anchor(c));
}

Histogram me_histogram(const ExperimentConfig& c, const Marginal& m) {
  return temperature_histogram(uniform_cells(m.x, m.f), c.resolved_bin_width(), bin_anchor(c));
}

Histogram fp_histogram(const ExperimentConfig& c, const StationaryDensity& d) {
  return temperature_histogram(trapezoid_cells(d.x, d.f), c.resolved_bin_width(), bin_anchor(c));
}

ordered_json parse_json(const std::string& text) { return ordered_json::parse(text); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string cmd_simulate(const Prepared& p, OutputDir& out) {
  const auto& c = p.config;
  const EnsembleResult r = run_trajectories(c);
  out.write("trajectories.csv", trajectory_csv(r.mean_series));
  out.write("final_states.csv", final_states_csv(r, c.horizon));
  if (r.finals.size() >= 2) out.write("histogram.csv", histogram_csv({"mc"}, {mc_histogram(c, r)}));
  out.write("summary.json", ensemble_summary_json(c, r));
  return "n_traj=" + std::to_string(r.finals.size()) + " mean_Te_K=" + fmt(r.mean_te) +
         " std_Te_K=" + fmt(r.std_te);
}

std::string cmd_evolve_me(const Prepared& p, OutputDir& out) {
  const auto& c = p.config;
  const MeResult r = run_hybrid_me(c);
  out.write("density.csv", density_csv(r.density));
  out.write("histogram.csv", histogram_csv({"me"}, {me_histogram(c, r.marginal)}));
  out.write("summary.json", me_summary_json(c, r));
  return "nodes=" + std::to_string(r.density.grid.n) + " steps=" + std::to_string(r.report.steps) +
         " trace_drift=" + fmt(r.report.max_trace_drift) + " min_eig=" + fmt(r.report.min_eigenvalue);
}

std::string cmd_reduce_fp(const Prepared& p, OutputDir& out) {
  const auto& c = p.config;
  const StationaryResult r = run_fp(c);
  out.write("fp.csv", fp_csv(r.coeffs, r.density));
  out.write("summary.json", fp_summary_json(c, r));
  return "nodes=" + std::to_string(r.coeffs.nodes.size()) + " T_S_K=" + fmt(r.t_s) +
         " stable_roots=" + std::to_string(r.roots.stable.size());
}

std::string cmd_stationary(const Prepared& p, OutputDir& out) {
  const auto& c = p.config;
  const StationaryResult r = run_fp(c);
  CorrectionOptions opt;
  opt.route = c.route;
  const double tau = relaxation_time(r.x_s, c.params, opt);
  out.write("histogram.csv", histogram_csv({"fp"}, {fp_histogram(c, r.density)}));
  ordered_json j = parse_json(fp_summary_json(c, r));
  j["relaxation_time_s"] = tau;
  out.write("summary.json", dump(j));
  return "T_S_K=" + fmt(r.t_s) + " T_S_closed_K=" + fmt(r.t_s_closed) + " tau_s=" + fmt(tau) +
         (r.roots.multistable() ? " multistable" : "");
}

std::string cmd_compare(const Prepared& p, OutputDir& out) {
  const auto& c = p.config;
  const CompareOutputs r = run_compare(c);
  const auto& rep = r.report;
  out.write("final_states.csv", final_states_csv(r.ensemble, c.horizon));
  out.write("density.csv", density_csv(r.me.density));
  out.write("fp.csv", fp_csv(r.fp.coeffs, r.fp.density));
  out.write("histogram.csv", histogram_csv({"mc", "me", "fp"}, {rep.mc, rep.me, rep.fp}));
  out.write("summary.json", compare_summary_json(c, r));
  return "L1(mc,me)=" + fmt(rep.mc_me.l1) + " L1(mc,fp)=" + fmt(rep.mc_fp.l1) + " L1(me,fp)=" + fmt(rep.me_fp.l1) +
         " T_S_mc_K=" + fmt(rep.ts_mc) + " T_S_fp_K=" + fmt(rep.ts_fp);
}

std::string preset_fig1(const Prepared& p, OutputDir& out) {
  const auto& c = p.config;
  const EnsembleResult ens = run_trajectories(c);
  const MeResult me = run_hybrid_me(c);
  const Histogram mc = mc_histogram(c, ens);
  const Histogram mh = me_histogram(c, me.marginal);
  const Distances d = distance_metrics(mc, mh);
  out.write("final_states.csv", final_states_csv(ens, c.horizon));
  out.write("histogram.csv", histogram_csv({"mc", "me"}, {mc, mh}));
  ordered_json j = parse_json(ensemble_summary_json(c, ens));
  j["me"] = {{"mean_Te_K", mh.mean()}, {"std_Te_K", mh.stddev()}, {"trace_drift", me.report.max_trace_drift},
             {"min_block_eigenvalue", me.report.min_eigenvalue}};
  j["distances"] = {{"mc_me", {{"l1", d.l1}, {"ks", d.ks}}}};
  out.write("summary.json", dump(j));
  return "n_traj=" + std::to_string(ens.finals.size()) + " mean_Te_K=" + fmt(ens.mean_te) +
         " L1(mc,me)=" + fmt(d.l1);
}

std::string preset_fig2(const Prepared& p, OutputDir& out) {
  const auto& c = p.config;
  std::ostringstream csv;
  csv << "omega_ratio,mean_Te_K,std_Te_K,sem_Te_K,n_traj\n";
  ordered_json points = ordered_json::array();
  for (double ratio : p.preset_args.ratios) {
    ExperimentConfig ci = c;
    ci.params.drive_frequency = ratio * c.params.omega();
    ci.params.validate();
    const EnsembleResult r = run_trajectories(ci);
    const Moments m = moments(final_temperatures(r));
    csv << format_double(ratio) << ',' << format_double(m.mean) << ',' << format_double(m.stddev) << ','
        << format_double(m.sem) << ',' << r.finals.size() << '\n';
    points.push_back({{"omega_ratio", ratio}, {"mean_Te_K", m.mean}, {"std_Te_K", m.stddev}, {"sem_Te_K", m.sem}});
  }
  out.write("sweep.csv", csv.str());
  ordered_json j = parse_json(ensemble_summary_json(c, EnsembleResult{}));
  j.erase("mean_Te_K");
  j.erase("std_Te_K");
  j.erase("sem_Te_K");
  j.erase("total_n_down");
  j.erase("total_n_up");
  j.erase("max_energy_ledger_residual");
  j.erase("max_norm_error");
  j["n_traj"] = c.n_traj;
  j["points"] = points;
  out.write("summary.json", dump(j));
  return "points=" + std::to_string(points.size()) + " n_traj=" + std::to_string(c.n_traj);
}

/// Long-horizon rotating-frame ensemble for the steady state at `c.params`.
EnsembleResult steady_ensemble(ExperimentConfig c, double tau) {
  c.mode = Mode::trajectories;
  c.frame = Frame::rotating;
  c.horizon = kRelaxationTimes * tau;
  c.stride = 0;
  return run_trajectories(c);
}

std::string preset_fig3a(const Prepared& p, OutputDir& out) {
  const auto& c = p.config;
  const bool mc = p.preset_args.mc;
  std::ostringstream csv;
  csv << "kappa,T_S_fp_K,T_S_closed_K,tau_s,mc_mean_Te_K,mc_sem_Te_K,mc_n_traj,mc_horizon_s\n";
  ordered_json points = ordered_json::array();
  CorrectionOptions opt;
  opt.route = c.route;
  for (double kappa : p.preset_args.kappas) {
    ExperimentConfig ci = c;
    ci.params.drive_strength = kappa;
    ci.params.validate();
    const StationaryResult fp = run_fp(ci);
    const double tau = relaxation_time(fp.x_s, ci.params, opt);
    ordered_json pt = {{"kappa", kappa}, {"T_S_fp_K", fp.t_s}, {"T_S_closed_K", fp.t_s_closed}, {"tau_s", tau},
                       {"multistable", fp.roots.multistable()}};
    csv << format_double(kappa) << ',' << format_double(fp.t_s) << ',' << format_double(fp.t_s_closed) << ','
        << format_double(tau);
    if (mc) {
      const EnsembleResult r = steady_ensemble(ci, tau);
      const Moments m = moments(final_temperatures(r));
      csv << ',' << format_double(m.mean) << ',' << format_double(m.sem) << ',' << r.finals.size() << ','
          << format_double(kRelaxationTimes * tau) << '\n';
      pt["mc"] = {{"mean_Te_K", m.mean}, {"sem_Te_K", m.sem}, {"n_traj", r.finals.size()},
                  {"horizon_s", kRelaxationTimes * tau}};
    } else {
      csv << ",,,\n";
    }
    points.push_back(pt);
  }
  out.write("ts_vs_kappa.csv", csv.str());
  ordered_json j = parse_json(fp_summary_json(c, run_fp(c)));
  for (const char* key : {"X_S", "T_S", "T_S_closed", "stable_roots_K2", "unstable_roots_K2", "multistable", "F_s"}) {
    j.erase(key);
  }
  j["points"] = points;
  out.write("summary.json", dump(j));
  return "points=" + std::to_string(points.size()) + (mc ? " with MC" : " FP only");
}

std::string preset_fig4(const Prepared& p, OutputDir& out) {
  const auto& c = p.config;
  const StationaryResult fp = run_fp(c);
  CorrectionOptions opt;
  opt.route = c.route;
  const double tau = relaxation_time(fp.x_s, c.params, opt);
  const EnsembleResult r = steady_ensemble(c, tau);
  const Histogram mc = mc_histogram(c, r);
  const Histogram fh = fp_histogram(c, fp.density);
  const Distances d = distance_metrics(mc, fh);
  const Moments m = moments(final_temperatures(r));
  out.write("final_states.csv", final_states_csv(r, kRelaxationTimes * tau));
  out.write("histogram.csv", histogram_csv({"mc", "fp"}, {mc, fh}));
  ordered_json j = parse_json(fp_summary_json(c, fp));
  j["relaxation_time_s"] = tau;
  j["mc"] = {{"n_traj", r.finals.size()}, {"horizon_s", kRelaxationTimes * tau}, {"mean_Te_K", m.mean},
             {"std_Te_K", m.stddev}, {"sem_Te_K", m.sem}};
  j["distances"] = {{"mc_fp", {{"l1", d.l1}, {"ks", d.ks}}}};
  out.write("summary.json", dump(j));
  return "mc_mean_Te_K=" + fmt(m.mean) + " T_S_fp_K=" + fmt(fp.t_s) + " L1(mc,fp)=" + fmt(d.l1);
}

int execute(const Options& o, std::ostream& out) {
  const Prepared p = prepare(o);
  OutputDir dir{fs::path(o.out)};
  std::string line;
  if (o.command == "simulate") line = cmd_simulate(p, dir);
  else if (o.command == "evolve-me") line = cmd_evolve_me(p, dir);
  else if (o.command == "reduce-fp") line = cmd_reduce_fp(p, dir);
  else if (o.command == "stationary") line = cmd_stationary(p, dir);
  else if (o.command == "compare") line = cmd_compare(p, dir);
  else if (o.preset == "fig1") line = preset_fig1(p, dir);
  else if (o.preset == "fig2") line = preset_fig2(p, dir);
  else if (o.preset == "fig3a") line = preset_fig3a(p, dir);
  else line = preset_fig4(p, dir);
  const std::string command = o.preset.empty() ? o.command : o.command + " " + o.preset;
  dir.finish(command, p, o.preset);
  out << command << ": " << line << " -> " << dir.path().string() << "\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qcal: driven qubit coupled to an electron calorimeter"};
  app.name("qcal");
  app.require_subcommand(1, 1);
  app.fallthrough();

  Options o;
  app.add_option("-c,--config", o.config_path, "experiment config file (key = value)");
  app.add_option("--manifest", o.manifest_path, "replay the run recorded in a manifest.json");
  app.add_option("-o,--out", o.out, "output directory (created if missing)")->capture_default_str();
  auto* seed = app.add_option("--seed", o.seed, "RNG seed");
  auto* g2 = app.add_option("--g2", o.g2, "coupling g^2");
  auto* kappa = app.add_option("--kappa", o.kappa, "drive strength kappa");
  auto* n_traj = app.add_option("--n-traj", o.n_traj, "number of trajectories");
  auto* threads = app.add_option("-j,--threads", o.threads, "worker threads");
  app.add_option("--set", o.sets, "override a config key (KEY=VALUE); repeatable");

  for (const char* name : {"simulate", "evolve-me", "reduce-fp", "stationary", "compare"}) {
    app.add_subcommand(name)->callback([&o, name] { o.command = name; });
  }
  app.get_subcommand("simulate")->description("Monte Carlo trajectory ensemble");
  app.get_subcommand("evolve-me")->description("hybrid master equation on a shift grid");
  app.get_subcommand("reduce-fp")->description("Fokker-Planck coefficients and stationary density");
  app.get_subcommand("stationary")->description("stationary temperature and relaxation time");
  app.get_subcommand("compare")->description("run all three pipelines and compare densities");
  auto* preset = app.add_subcommand("preset", "published experiment protocols");
  preset->add_option("name", o.preset, "fig1 | fig2 | fig3a | fig4")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3a", "fig4"}));
  preset->add_option("--ratios", o.ratios, "fig2: drive frequency ratios omega_d/omega")->delimiter(',');
  preset->add_option("--kappas", o.kappas, "fig3a: drive strengths")->delimiter(',');
  preset->callback([&o] { o.command = "preset"; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qcal: " << e.what() << "\n";
    return kConfigError;
  }
  o.has_seed = seed->count() > 0;
  o.has_g2 = g2->count() > 0;
  o.has_kappa = kappa->count() > 0;
  o.has_n_traj = n_traj->count() > 0;
  o.has_threads = threads->count() > 0;

  try {
    return execute(o, out);
  } catch (const NumericalError& e) {
    err << "qcal: numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const ConfigError& e) {
    err << "qcal: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "qcal: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "qcal: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace qcal::cli
