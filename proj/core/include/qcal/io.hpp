#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qcal/ensemble.hpp"
#include "qcal/experiment.hpp"
#include "qcal/hybrid.hpp"
#include "qcal/reduction.hpp"
#include "qcal/stats.hpp"

namespace qcal {

/// Git blob id of `content`: SHA-1 of "blob <size>\0" + content, lowercase hex.
std::string git_blob_sha1(const std::string& content);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncates and writes in one go.
void write_file(const std::filesystem::path& path, const std::string& content);

// CSV text. Numbers use the shortest round-trip decimal form, so identical
// inputs give identical bytes.

/// t_s,Te_K,pop_excited,n_down,n_up (ensemble means per sample time).
std::string trajectory_csv(const std::vector<MeanSample>& series);
/// t_s,Te_K,pop_excited,n_down,n_up (one row per trajectory at the horizon).
std::string final_states_csv(const EnsembleResult& result, double horizon);
/// X_K2,F,rho00,rho11,Re_rho01,Im_rho01
std::string density_csv(const HybridDensity& rho);
/// X,b,D,j1,j2,delta1,delta2,F_s
std::string fp_csv(const FPCoefficients& coeffs, const StationaryDensity& density);
/// Te_K,<name>... with one density column per histogram; all histograms must
/// share width and aligned edges.
std::string histogram_csv(const std::vector<std::string>& names, const std::vector<Histogram>& hists);

// JSON documents.

std::string ensemble_summary_json(const ExperimentConfig& config, const EnsembleResult& result);
std::string me_summary_json(const ExperimentConfig& config, const MeResult& result);
std::string fp_summary_json(const ExperimentConfig& config, const StationaryResult& result);
std::string compare_summary_json(const ExperimentConfig& config, const CompareOutputs& out);

struct ManifestInput {
  std::string path;
  std::string sha1;
};

struct Manifest {
  std::string command;      ///< subcommand, plus preset name for presets
  std::vector<std::string> arguments;  ///< command options not captured by the config
  std::string config_text;  ///< full experiment echo
  std::string config_sha1;
  std::vector<ManifestInput> inputs;
  std::vector<std::string> outputs;
};

std::string manifest_json(const Manifest& manifest);
/// Raises ConfigError on malformed manifests.
Manifest parse_manifest(const std::string& text);

}  // namespace qcal
