#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "adbar/beltrami.hpp"
#include "adbar/dbar.hpp"
#include "adbar/forward.hpp"
#include "adbar/io.hpp"
#include "adbar/scattering.hpp"

namespace adbar {

namespace fs = std::filesystem;

struct RunConfig {
  std::string phantom = "test1";  ///< builtin name or phantom JSON path
  int mesh_level = 8;
  int N = 16;
  double noise_eta = 0.0;
  std::uint64_t seed = 1;
  double R = 6.0;
  int c = 7;
  int boundary_points = 256;
  double zeta_max = 1.2;
  double h_zeta = 2.4 / 256;
  fs::path output_dir = "out";
  int workers = 0;  ///< 0: all available cores
  bool oracle = false;
  int oracle_n = 1024;
  double oracle_half_width = 2.0;

  /// Throws ConfigError.
  void validate() const;
  int zeta_n() const;
};

/// JSON object with any subset of the RunConfig field names; unknown keys are rejected.
RunConfig config_from_json_text(std::string_view text, RunConfig base = {});
RunConfig load_config(const fs::path& path, RunConfig base = {});
std::string config_to_json_text(const RunConfig& cfg);

struct StageRecord {
  std::string name;
  std::string key;
  bool cached = false;
  double seconds = 0.0;
  std::vector<std::pair<std::string, double>> stats;
};

/// Noise-free voltage table, cached as <cache_dir>/voltages.bin with its
/// SHA-256 key in <cache_dir>/stage.key. Empty cache_dir disables caching.
VoltageTable simulate_voltages(const ConductivityField& field, int mesh_level, int N,
                               const fs::path& cache_dir, StageRecord* record = nullptr,
                               Execution exec = Execution::parallel);

DNMatrix noisy_dn(const VoltageTable& clean, double eta, std::uint64_t seed);

struct OracleResult {
  QCMap map;
  ReconstructionGrid gamma;
  std::vector<Complex> boundary;
  int winding = 0;
};

OracleResult run_oracle(const ConductivityField& field, const BeltramiOptions& opt,
                        ReconstructionGrid grid, Execution exec = Execution::parallel);
/// oracle.{csv,pgm,json} and boundary.csv
void save_oracle(const fs::path& dir, const OracleResult& result);

struct Extremes {
  double max = 0.0, min = 0.0;
  double left_max = 0.0, right_max = 0.0;
  double left_min = 0.0, right_min = 0.0;
  Complex argmax, argmin, left_argmax, right_argmax;
};

/// Extremal values over the mask, globally and per half-plane zeta_1 < 0, zeta_1 > 0.
Extremes extremes(const ReconstructionGrid& grid);

struct CompareMetrics {
  double sup_error = 0.0;
  double l2_relative_error = 0.0;
  std::size_t common_points = 0;
  Extremes recon;
  Extremes oracle;
};

/// Errors on the common mask. Throws ConfigError when the grids differ.
CompareMetrics compare(const ReconstructionGrid& recon, const ReconstructionGrid& oracle);
std::string metrics_to_json_text(const CompareMetrics& m);

struct RunResult {
  std::vector<StageRecord> stages;
  ReconstructionGrid reconstruction;
  ScatteringData scattering;
  fs::path manifest_path;
};

/// simulate -> scatter -> reconstruct (-> oracle), writing every intermediate
/// under cfg.output_dir and skipping stages whose inputs hash unchanged.
/// Errors are rethrown with the stage name prefixed.
RunResult run_pipeline(const RunConfig& cfg);

}  // namespace adbar
