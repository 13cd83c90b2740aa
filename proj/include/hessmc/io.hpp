#pragma once

#include "hessmc/diagnostics.hpp"
#include "hessmc/forward.hpp"
#include "hessmc/mesh.hpp"
#include "hessmc/samplers.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace hessmc::io {

namespace fs = std::filesystem;

/// Header `step,accepted,logJ,psi_0..psi_{n-1}`, one row per kept sample.
void write_chain_csv(const fs::path& path, const Chain& chain);

struct ChainFile {
  std::vector<long> steps;
  std::vector<char> accepted;
  std::vector<double> log_j;
  Matrix samples;
  /// Raw-step acceptance rate from the sidecar when present, otherwise the
  /// mean of the accepted column.
  double acceptance_rate = 0.0;
};

/// Throws IoError with the offending line on malformed input.
ChainFile read_chain_csv(const fs::path& path);

/// `<stem>.json` next to a chain file.
fs::path metadata_path(const fs::path& chain_csv);

nlohmann::json chain_metadata(const Chain& chain, const SamplerConfig& cfg);

void write_json(const fs::path& path, const nlohmann::json& doc);

/// node,x,y,value
void write_field_csv(const fs::path& path, const Mesh2D& mesh,
                     const FieldVector& values);
FieldVector read_field_csv(const fs::path& path);

/// step,time,node,x,y,pressure
void write_trajectory_csv(const fs::path& path, const Trajectory& trajectory);

/// node,x,y,mean,lo,hi for the listed nodes.
void write_interval_csv(const fs::path& path, const Mesh2D& mesh,
                        const std::vector<Eigen::Index>& nodes,
                        const CredibleBounds& bounds);

/// lag,<one column per named series>.
void write_autocorrelation_csv(const fs::path& path,
                               const std::vector<std::string>& names,
                               const std::vector<Vector>& rho);

struct ObservationFile {
  ObservationPlan plan;
  Vector values;
  Vector noiseless;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// index,x,y,value,noiseless,sigma,seed
void write_observations_csv(const fs::path& path, const ObservationFile& obs);
ObservationFile read_observations_csv(const fs::path& path);

nlohmann::json stats_json(const ChainStats& stats);

}  // namespace hessmc::io
