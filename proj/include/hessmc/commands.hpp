#pragma once

#include "hessmc/config.hpp"
#include "hessmc/io.hpp"
#include "hessmc/map_solver.hpp"
#include "hessmc/samplers.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace hessmc {

namespace fs = std::filesystem;

/// Writes the observation CSV to out_path and the true field next to it as
/// `<stem>_theta_true.csv`. `seed` overrides forward.data_seed.
io::ObservationFile cmd_gen_data(const ExperimentConfig& cfg, const fs::path& out_path,
                                 std::optional<std::uint64_t> seed = {});

/// Runs BFGS from the configured start; writes map_field.csv and
/// map_result.json into out_dir.
OptimizeResult cmd_find_map(const ExperimentConfig& cfg, const fs::path& out_dir);

/// MAP point and fixed preconditioner used by the Hessian-based samplers.
struct MapArtifacts {
  OptimizeResult result;
  SpdFactor h_map = SpdFactor::identity(1);
};
MapArtifacts compute_map(const ExperimentConfig& cfg, const TargetDensity& target);

/// Runs `chains` chains (seeds seed, seed+1, ...) concurrently and writes
/// chain_<k>.csv plus chain_<k>.json into out_dir.
std::vector<Chain> cmd_sample(const ExperimentConfig& cfg, const fs::path& out_dir,
                              int chains = 1, std::optional<std::uint64_t> seed = {});

struct DiagnoseOptions {
  std::optional<Mesh2D> mesh;  // enables coordinates and the section line
  std::vector<Eigen::Index> probes;
  std::optional<double> section_y;
  double level = 0.95;
  int max_lag = 200;
};

DiagnoseOptions diagnose_options(const ExperimentConfig& cfg);

/// Writes diagnostics.json, intervals.csv and autocorrelation.csv into
/// out_dir and returns the diagnostics document.
nlohmann::json cmd_diagnose(const std::vector<fs::path>& chain_files,
                            const DiagnoseOptions& options, const fs::path& out_dir);

}  // namespace hessmc
