#include "qcal/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "qcal/errors.hpp"

namespace qcal {

using nlohmann::ordered_json;

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  const std::string data = header + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha1(), nullptr) != 1) {
    throw Error("SHA-1 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < length; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

namespace {

std::string num(double v) { return format_double(v); }

ordered_json params_json(const PhysicalParams& p) {
  return {{"level_spacing", p.level_spacing},
          {"level_spacing_K", p.level_spacing_K()},
          {"drive_strength", p.drive_strength},
          {"drive_frequency", p.drive_frequency},
          {"coupling", p.coupling},
          {"coupling_squared", p.coupling_squared()},
          {"heat_capacity_coeff", p.heat_capacity_coeff},
          {"electron_count", p.electron_count},
          {"sigma_v", p.sigma_v},
          {"phonon_temp", p.phonon_temp},
          {"gamma_floor", p.gamma_floor},
          {"jump_quantum_K2", p.jump_quantum()}};
}

ordered_json histogram_json(const Histogram& h) {
  return {{"origin_K", h.origin}, {"width_K", h.width}, {"density", h.density}};
}

ordered_json distances_json(const Distances& d) { return {{"l1", d.l1}, {"ks", d.ks}}; }

ordered_json config_echo(const ExperimentConfig& c) {
  ordered_json j;
  j["mode"] = to_string(c.mode);
  j["params"] = params_json(c.params);
  j["horizon_s"] = c.horizon;
  j["frame"] = to_string(c.frame);
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

}  // namespace

std::string trajectory_csv(const std::vector<MeanSample>& series) {
  std::ostringstream os;
  os << "t_s,Te_K,pop_excited,n_down,n_up\n";
  for (const auto& s : series) {
    os << num(s.t) << ',' << num(s.te) << ',' << num(s.pop_excited) << ',' << num(s.n_down) << ','
       << num(s.n_up) << '\n';
  }
  return os.str();
}

std::string final_states_csv(const EnsembleResult& r, double horizon) {
  std::ostringstream os;
  os << "t_s,Te_K,pop_excited,n_down,n_up\n";
  for (const auto& f : r.finals) {
    os << num(horizon) << ',' << num(f.te_final) << ',' << num(f.pop_excited) << ',' << f.n_down << ','
       << f.n_up << '\n';
  }
  return os.str();
}

std::string density_csv(const HybridDensity& rho) {
  std::ostringstream os;
  os << "X_K2,F,rho00,rho11,Re_rho01,Im_rho01\n";
  for (std::size_t i = 0; i < rho.grid.n; ++i) {
    const Mat2& b = rho.blocks[i];
    os << num(rho.grid.node(i)) << ',' << num(b.trace().real()) << ',' << num(b(0, 0).real()) << ','
       << num(b(1, 1).real()) << ',' << num(b(0, 1).real()) << ',' << num(b(0, 1).imag()) << '\n';
  }
  return os.str();
}

std::string fp_csv(const FPCoefficients& coeffs, const StationaryDensity& density) {
  if (coeffs.nodes.size() != density.f.size()) throw ConfigError("fp_csv: size mismatch");
  std::ostringstream os;
  os << "X,b,D,j1,j2,delta1,delta2,F_s\n";
  for (std::size_t i = 0; i < coeffs.nodes.size(); ++i) {
    const auto& p = coeffs.nodes[i];
    os << num(p.x) << ',' << num(p.b) << ',' << num(p.d) << ',' << num(p.j1) << ',' << num(p.j2) << ','
       << num(p.delta1) << ',' << num(p.delta2) << ',' << num(density.f[i]) << '\n';
  }
  return os.str();
}

std::string histogram_csv(const std::vector<std::string>& names, const std::vector<Histogram>& hists) {
  if (names.size() != hists.size() || hists.empty()) throw ConfigError("histogram_csv: bad arguments");
  const double w = hists.front().width;
  double lo = hists.front().origin;
  double hi = hists.front().edge(hists.front().size());
  for (const auto& h : hists) {
    if (std::abs(h.width - w) > 1e-9 * w) throw ConfigError("histogram_csv: widths differ");
    lo = std::min(lo, h.origin);
    hi = std::max(hi, h.edge(h.size()));
  }
  const auto bins = static_cast<std::size_t>(std::llround((hi - lo) / w));
  std::ostringstream os;
  os << "Te_K";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (std::size_t k = 0; k < bins; ++k) {
    const double centre = lo + (static_cast<double>(k) + 0.5) * w;
    os << num(centre);
    for (const auto& h : hists) {
      const double idx = std::floor((centre - h.origin) / w);
      const bool inside = idx >= 0.0 && idx < static_cast<double>(h.size());
      os << ',' << num(inside ? h.density[static_cast<std::size_t>(idx)] : 0.0);
    }
    os << '\n';
  }
  return os.str();
}

std::string ensemble_summary_json(const ExperimentConfig& c, const EnsembleResult& r) {
  ordered_json j = config_echo(c);
  j["n_traj"] = r.finals.size();
  j["dt_s"] = c.resolved_dt();
  j["mean_Te_K"] = r.mean_te;
  j["std_Te_K"] = r.std_te;
  j["sem_Te_K"] = r.finals.size() > 0 ? r.std_te / std::sqrt(static_cast<double>(r.finals.size())) : 0.0;
  j["total_n_down"] = r.total_down;
  j["total_n_up"] = r.total_up;
  double worst_ledger = 0.0, worst_norm = 0.0;
  for (const auto& f : r.finals) {
    worst_ledger = std::max(worst_ledger, f.ledger_residual);
    worst_norm = std::max(worst_norm, f.max_norm_error);
  }
  j["max_energy_ledger_residual"] = worst_ledger;
  j["max_norm_error"] = worst_norm;
  return j.dump(2) + "\n";
}

std::string me_summary_json(const ExperimentConfig& c, const MeResult& r) {
  ordered_json j = config_echo(c);
  j["grid"] = {{"x_min_K2", r.density.grid.x_min},
               {"dx_K2", r.density.grid.dx},
               {"m", r.density.grid.m},
               {"nodes", r.density.grid.n}};
  j["dt_me_s"] = c.resolved_dt_me();
  j["steps"] = r.report.steps;
  const auto& d = r.marginal.diagnostics;
  j["diagnostics"] = {{"total_mass", d.total_mass},
                      {"trace_drift", r.report.max_trace_drift},
                      {"min_trace", d.min_trace},
                      {"min_block_eigenvalue", r.report.min_eigenvalue},
                      {"hermiticity_residual", d.hermiticity_residual},
                      {"leak", d.leak}};
  j["limits_per_s"] = {{"rate", r.report.limits.rate},
                       {"drift", r.report.limits.drift},
                       {"diffusion", r.report.limits.diffusion},
                       {"coherent", r.report.limits.coherent}};
  return j.dump(2) + "\n";
}

std::string fp_summary_json(const ExperimentConfig& c, const StationaryResult& r) {
  ordered_json j = config_echo(c);
  j["route"] = c.route == CorrectionRoute::resolvent ? "resolvent" : "spectral";
  j["X_S"] = r.x_s;
  j["T_S"] = r.t_s;
  j["T_S_closed"] = r.t_s_closed;
  j["stable_roots_K2"] = r.roots.stable;
  j["unstable_roots_K2"] = r.roots.unstable;
  j["multistable"] = r.roots.multistable();
  j["F_s"] = {{"mean_X_K2", r.density.mean_x},
              {"var_X_K4", r.density.var_x},
              {"mean_Te_K", r.density.mean_t},
              {"std_Te_K", r.density.std_t},
              {"mode_X_K2", r.density.mode_x}};
  return j.dump(2) + "\n";
}

std::string compare_summary_json(const ExperimentConfig& c, const CompareOutputs& out) {
  const auto& r = out.report;
  ordered_json j = config_echo(c);
  j["densities"] = {{"mc", histogram_json(r.mc)}, {"me", histogram_json(r.me)}, {"fp", histogram_json(r.fp)}};
  j["distances"] = {{"mc_me", distances_json(r.mc_me)},
                    {"mc_fp", distances_json(r.mc_fp)},
                    {"me_fp", distances_json(r.me_fp)}};
  j["moments"] = {{"mc", {{"mean_Te_K", r.mc_te.mean}, {"std_Te_K", r.mc_te.stddev}, {"sem_Te_K", r.mc_te.sem}}},
                  {"me", {{"mean_Te_K", r.me_mean_te}, {"std_Te_K", r.me_std_te}}},
                  {"fp", {{"mean_Te_K", r.fp_mean_te}, {"std_Te_K", r.fp_std_te}}}};
  j["T_S"] = {{"mc_long_run_mean_K", r.ts_mc}, {"fp_root_K", r.ts_fp}, {"closed_form_K", r.ts_closed}};
  return j.dump(2) + "\n";
}

std::string manifest_json(const Manifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["arguments"] = m.arguments;
  j["config_sha1"] = m.config_sha1;
  j["config_text"] = m.config_text;
  ordered_json inputs = ordered_json::array();
  for (const auto& in : m.inputs) inputs.push_back({{"path", in.path}, {"sha1", in.sha1}});
  j["inputs"] = inputs;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& text) {
  try {
    const auto j = ordered_json::parse(text);
    Manifest m;
    m.command = j.at("command").get<std::string>();
    m.config_text = j.at("config_text").get<std::string>();
    if (j.contains("arguments")) m.arguments = j.at("arguments").get<std::vector<std::string>>();
    m.config_sha1 = j.at("config_sha1").get<std::string>();
    for (const auto& in : j.at("inputs")) {
      m.inputs.push_back({in.at("path").get<std::string>(), in.at("sha1").get<std::string>()});
    }
    if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::vector<std::string>>();
    if (git_blob_sha1(m.config_text) != m.config_sha1) {
      throw ConfigError("manifest: config_sha1 does not match config_text");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

}  // namespace qcal
