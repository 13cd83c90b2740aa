#pragma once

#include "hessmc/forward.hpp"
#include "hessmc/map_solver.hpp"
#include "hessmc/prior.hpp"
#include "hessmc/samplers.hpp"
#include "hessmc/targets.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hessmc {

struct MeshSection {
  int nx = 16;
  int ny = 8;
  double lx = 8000.0;  // m
  double ly = 4000.0;  // m
};

struct PriorSection {
  double gamma = 0.5;
  double delta = 5e-3;
  double a = 0.018;
  double b = 0.97;
  double beta = 1.017 * 3.14159265358979323846;
  double mean = 33.0;
  /// Mesh coordinates are divided by this before assembling the prior, so
  /// gamma and delta are expressed per length_unit (default km).
  double length_unit = 1000.0;
};

struct Blob {
  double x = 0.0;
  double y = 0.0;
  double radius = 1.0;
  double amplitude = 0.0;
};

struct ForwardSection {
  FluidProperties fluid;
  double porosity = 0.2;
  Eigen::Vector2d gravity{0.0, 9.81};
  double top_pressure = 500e6;
  std::vector<Well> wells;
  double horizon = 1.0;
  int steps = 20;
  /// Noise standard deviation in Pa; when sigma_relative is set it wins and
  /// sigma = sigma_relative * top_pressure.
  double sigma = 1e6;
  std::optional<double> sigma_relative;
  /// Observation points: explicit list, or `count` points from a fixed
  /// low-discrepancy layout (nested: the first k points of a larger set are
  /// the k-point set).
  std::vector<Eigen::Vector2d> points;
  int observation_count = 52;
  /// theta_true = base + sum of Gaussian blobs (coordinates in m).
  std::optional<double> theta_base;  // default prior mean
  std::vector<Blob> blobs;
  std::uint64_t data_seed = 1;
  std::optional<std::string> data_file;

  double noise_sigma() const noexcept {
    return sigma_relative ? *sigma_relative * top_pressure : sigma;
  }
};

struct TargetSection {
  std::string kind = "gaussian";  // gaussian | lognormal | posterior
  Vector mean;                    // gaussian mean / lognormal log-mean
  Matrix covariance;              // gaussian covariance / lognormal log-covariance
  double shift = 0.0;
};

struct MapSection {
  BfgsOptions bfgs;
  /// prior_mean | mean | zero | ones
  std::string start = "default";
  double truncation = kDefaultRelativeTruncation;
};

struct OutputSection {
  std::string directory = "out";
  int thinning = 1;
  std::vector<Eigen::Index> probes;
  std::optional<double> section_y;  // m; default mid-height row
  double level = 0.95;
  int max_lag = 200;
};

struct SamplerSection {
  SamplerConfig cfg;
  /// map | prior_mean | mean (start point of the chain)
  std::string start = "map";
  int chains = 1;
};

struct ExperimentConfig {
  std::string name = "experiment";
  MeshSection mesh;
  PriorSection prior;
  std::optional<ForwardSection> forward;
  std::optional<TargetSection> target;
  std::optional<SamplerSection> sampler;
  MapSection map;
  OutputSection outputs;
  /// Directory of the config file; relative paths resolve against it.
  std::filesystem::path base_dir;
};

/// Parses and validates a config document. Unknown keys and type errors
/// throw ConfigError naming the offending key path.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads a config file; syntax errors report the line and column.
ExperimentConfig load_config(const std::filesystem::path& path);

// ------------------------------------------------------------- constructors

Mesh2D build_mesh(const ExperimentConfig& cfg);
std::shared_ptr<const BilaplacianPrior> build_prior(const ExperimentConfig& cfg);
DarcyProblem build_problem(const ExperimentConfig& cfg);
ObservationPlan build_plan(const ExperimentConfig& cfg);
FieldVector build_theta_true(const ExperimentConfig& cfg);

/// `count` points of a Halton (2, 3) layout inside the domain, away from
/// the Dirichlet edge.
std::vector<Eigen::Vector2d> layout_points(const Mesh2D& mesh, int count);

/// Nodes of the mesh row closest to y.
std::vector<Eigen::Index> section_nodes(const Mesh2D& mesh, double y);

/// Observed data for the posterior: read from forward.data_file when set,
/// otherwise synthesized from theta_true with data_seed.
Vector build_data(const ExperimentConfig& cfg, const DarcyProblem& problem,
                  const ObservationPlan& plan);

/// Target for the config: gaussian, lognormal or posterior.
std::shared_ptr<const TargetDensity> build_target(const ExperimentConfig& cfg);

/// Default optimizer / chain start for the target.
FieldVector default_start(const ExperimentConfig& cfg, const TargetDensity& target);

}  // namespace hessmc
