#include "hessmc/commands.hpp"

#include "hessmc/diagnostics.hpp"
#include "hessmc/errors.hpp"
#include "hessmc/io.hpp"

#include <exception>
#include <fstream>
#include <thread>

namespace hessmc {

namespace {

// Field CSV for analytic targets: coordinates are (index, 0).
Mesh2D pseudo_mesh(Eigen::Index n) {
  return Mesh2D(static_cast<int>(std::max<Eigen::Index>(1, n - 1)), 1,
                static_cast<double>(std::max<Eigen::Index>(1, n - 1)), 1.0);
}

void write_vector(const fs::path& path, const ExperimentConfig& cfg,
                  const FieldVector& v) {
  if (cfg.target && cfg.target->kind == "posterior") {
    io::write_field_csv(path, build_mesh(cfg), v);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.precision(17);
  out << "node,x,y,value\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << i << ',' << i << ',' << 0 << ',' << v[i] << '\n';
  }
}

bool needs_map(Method m) {
  return m == Method::h_hmc || m == Method::sn_map || m == Method::is_map ||
         m == Method::mala;
}

}  // namespace

io::ObservationFile cmd_gen_data(const ExperimentConfig& cfg, const fs::path& out_path,
                                 std::optional<std::uint64_t> seed) {
  if (!cfg.forward) throw ConfigError("config: gen-data needs a 'forward' section");
  const DarcyProblem problem = build_problem(cfg);
  io::ObservationFile obs;
  obs.plan = build_plan(cfg);
  obs.sigma = cfg.forward->noise_sigma();
  obs.seed = seed.value_or(cfg.forward->data_seed);
  const FieldVector theta = build_theta_true(cfg);
  obs.noiseless = observe(solve_forward(problem, theta), obs.plan);
  obs.values = synth_data(problem, theta, obs.plan, obs.sigma, obs.seed);
  io::write_observations_csv(out_path, obs);
  fs::path field = out_path;
  field.replace_filename(out_path.stem().string() + "_theta_true.csv");
  io::write_field_csv(field, problem.mesh, theta);
  return obs;
}

MapArtifacts compute_map(const ExperimentConfig& cfg, const TargetDensity& target) {
  MapArtifacts out;
  out.result = bfgs_minimize(target, default_start(cfg, target), cfg.map.bfgs);
  out.h_map = target.map_preconditioner(out.result.psi_map);
  return out;
}

OptimizeResult cmd_find_map(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto target = build_target(cfg);
  const FieldVector start = default_start(cfg, *target);
  OptimizeResult res = bfgs_minimize(*target, start, cfg.map.bfgs);

  fs::create_directories(out_dir);
  write_vector(out_dir / "map_field.csv", cfg, res.psi_map);
  nlohmann::json doc = {{"target", target->name()},
                        {"J_initial", res.history.front()},
                        {"J_final", res.J_final},
                        {"grad_norm_final", res.grad_norm_final},
                        {"gtol", res.gtol},
                        {"iterations", res.iterations},
                        {"converged", res.converged},
                        {"line_search_failures", res.line_search_failures},
                        {"history", res.history}};
  if (auto* post = dynamic_cast<const PosteriorTarget*>(target.get())) {
    doc["misfit_initial"] = post->misfit_term(start);
    doc["misfit_final"] = post->misfit_term(res.psi_map);
    doc["prior_final"] = post->prior_term(res.psi_map);
  }
  io::write_json(out_dir / "map_result.json", doc);
  return res;
}

std::vector<Chain> cmd_sample(const ExperimentConfig& cfg, const fs::path& out_dir,
                              int chains, std::optional<std::uint64_t> seed) {
  if (!cfg.sampler) throw ConfigError("config: sample needs a 'sampler' section");
  if (chains < 1) throw std::invalid_argument("--chains must be >= 1");
  const auto target = build_target(cfg);
  SamplerConfig scfg = cfg.sampler->cfg;
  scfg.thinning *= cfg.outputs.thinning;
  if (seed) scfg.seed = *seed;

  SamplerInputs inputs;
  FieldVector start = default_start(cfg, *target);
  const std::string& where = cfg.sampler->start;
  if (needs_map(scfg.method) || where == "map") {
    auto map = compute_map(cfg, *target);
    inputs.h_map = map.h_map;
    inputs.psi_map = map.result.psi_map;
    if (where == "map") start = map.result.psi_map;
  }
  if (where == "prior_mean") {
    auto* post = dynamic_cast<const PosteriorTarget*>(target.get());
    if (!post) throw ConfigError("config: 'sampler.start' prior_mean needs a posterior");
    start = post->prior().mean();
  } else if (where == "mean") {
    if (auto* g = dynamic_cast<const GaussianTarget*>(target.get())) start = g->mean();
  } else if (where != "map") {
    throw ConfigError("config: 'sampler.start' must be map, prior_mean or mean");
  }

  std::vector<Chain> out(static_cast<std::size_t>(chains));
  std::vector<std::exception_ptr> errors(out.size());
  auto run_one = [&](std::size_t k) {
    try {
      SamplerConfig c = scfg;
      c.seed = scfg.seed + k;
      out[k] = run_sampler(*target, start, c, inputs);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (chains == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < out.size(); ++k) pool.emplace_back(run_one, k);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const fs::path csv = out_dir / ("chain_" + std::to_string(k) + ".csv");
    io::write_chain_csv(csv, out[k]);
    SamplerConfig c = scfg;
    c.seed = scfg.seed + k;
    auto meta = io::chain_metadata(out[k], c);
    meta["experiment"] = cfg.name;
    meta["target"] = target->name();
    if (cfg.target && cfg.target->kind == "posterior") {
      meta["mesh"] = {{"nx", cfg.mesh.nx}, {"ny", cfg.mesh.ny},
                      {"lx", cfg.mesh.lx}, {"ly", cfg.mesh.ly}};
    }
    io::write_json(io::metadata_path(csv), meta);
  }
  return out;
}

DiagnoseOptions diagnose_options(const ExperimentConfig& cfg) {
  DiagnoseOptions opt;
  if (cfg.target && cfg.target->kind == "posterior") opt.mesh = build_mesh(cfg);
  opt.probes = cfg.outputs.probes;
  opt.section_y = cfg.outputs.section_y;
  opt.level = cfg.outputs.level;
  opt.max_lag = cfg.outputs.max_lag;
  return opt;
}

nlohmann::json cmd_diagnose(const std::vector<fs::path>& chain_files,
                            const DiagnoseOptions& options, const fs::path& out_dir) {
  if (chain_files.empty()) throw std::invalid_argument("diagnose needs a chain file");
  std::vector<io::ChainFile> chains;
  for (const auto& f : chain_files) chains.push_back(io::read_chain_csv(f));
  const Eigen::Index dim = chains.front().samples.cols();
  for (std::size_t k = 0; k < chains.size(); ++k) {
    if (chains[k].samples.cols() != dim) {
      throw IoError(chain_files[k].string() + ": dimension differs from the first chain");
    }
  }
  if (options.mesh && options.mesh->num_nodes() != dim) {
    throw IoError("chain dimension does not match the configured mesh");
  }
  for (auto p : options.probes) {
    if (p >= dim) throw std::invalid_argument("probe node exceeds the chain dimension");
  }

  nlohmann::json doc;
  doc["chains"] = nlohmann::json::array();
  std::vector<std::string> names;
  std::vector<Vector> rho;
  Eigen::Index total = 0;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    const auto& c = chains[k];
    const Vector avg = domain_average(c.samples);
    ChainStats s = iact_ess_se(avg);
    s.acceptance_rate = c.acceptance_rate;
    nlohmann::json entry = io::stats_json(s);
    entry["file"] = chain_files[k].string();
    const Eigen::Index lag = std::min<Eigen::Index>(options.max_lag, avg.size() - 1);
    names.push_back("chain" + std::to_string(k) + "_average");
    rho.push_back(autocorrelation(avg, lag));
    nlohmann::json probes = nlohmann::json::array();
    for (auto p : options.probes) {
      const Vector series = probe_series(c.samples, p);
      ChainStats ps = iact_ess_se(series);
      ps.acceptance_rate = c.acceptance_rate;
      auto pj = io::stats_json(ps);
      pj["node"] = p;
      probes.push_back(pj);
      names.push_back("chain" + std::to_string(k) + "_node" + std::to_string(p));
      rho.push_back(autocorrelation(series, lag));
    }
    entry["probes"] = probes;
    doc["chains"].push_back(entry);
    total += c.samples.rows();
  }

  Matrix pooled(total, dim);
  Eigen::Index row = 0;
  for (const auto& c : chains) {
    pooled.middleRows(row, c.samples.rows()) = c.samples;
    row += c.samples.rows();
  }
  const CredibleBounds bounds = credible_interval(pooled, options.level);
  std::vector<Eigen::Index> nodes;
  Mesh2D mesh = options.mesh ? *options.mesh : pseudo_mesh(dim);
  if (options.mesh) {
    nodes = section_nodes(mesh, options.section_y.value_or(0.5 * mesh.ly()));
  } else {
    for (Eigen::Index i = 0; i < dim; ++i) nodes.push_back(i);
  }
  doc["level"] = options.level;
  doc["mean_interval_width"] = (bounds.hi - bounds.lo).mean();

  fs::create_directories(out_dir);
  io::write_json(out_dir / "diagnostics.json", doc);
  io::write_interval_csv(out_dir / "intervals.csv", mesh, nodes, bounds);
  io::write_autocorrelation_csv(out_dir / "autocorrelation.csv", names, rho);
  return doc;
}

}  // namespace hessmc
