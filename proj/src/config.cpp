#include "hessmc/config.hpp"

#include "hessmc/errors.hpp"
#include "hessmc/io.hpp"
#include "hessmc/random.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hessmc {

namespace {

using nlohmann::json;

// Thin cursor over a JSON object that remembers its key path and rejects
// keys that were never read.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("", "must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) fail(key, "is required");
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) {
    return has(key) ? as_number(key, obj_.at(key)) : fallback;
  }
  double number(const std::string& key) { return as_number(key, at(key)); }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    return v.get<int>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail(key, "must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) fail(key, "must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }

  Section child(const std::string& key) { return Section(at(key), sub(key)); }

  std::string sub(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? path_ : sub(key);
    throw ConfigError("config: '" + (where.empty() ? "<root>" : where) + "' " + what);
  }

  double as_number(const std::string& key, const json& v) const {
    if (!v.is_number()) fail(key, "must be a number");
    return v.get<double>();
  }

  /// Number or array of numbers; a scalar expands to `dim` copies.
  Vector vector(const std::string& key, Eigen::Index dim) {
    const auto& v = at(key);
    if (v.is_number()) {
      if (dim < 1) fail(key, "is a scalar but no dim was given");
      return Vector::Constant(dim, v.get<double>());
    }
    if (!v.is_array() || v.empty()) fail(key, "must be a number or a nonempty array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] = as_number(key, v[i]);
    }
    if (dim > 0 && out.size() != dim) fail(key, "has the wrong length");
    return out;
  }

  Matrix matrix(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array() || v.empty()) fail(key, "must be an array of rows");
    const auto n = static_cast<Eigen::Index>(v.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = v[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        fail(key, "must be a square matrix");
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        m(i, j) = as_number(key, row[static_cast<std::size_t>(j)]);
      }
    }
    return m;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) fail(it.key(), "is not a recognized key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const Section& s, const std::string& key,
             const std::string& what) {
  if (!ok) s.fail(key, what);
}

Eigen::Vector2d point(const json& v, const Section& s, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    s.fail(key, "entries must be [x, y] pairs");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

// Random rotation with log-spaced variances in [max/condition, max].
Matrix spectrum_covariance(Section s, Eigen::Index dim) {
  const double condition = s.number("condition");
  const double vmax = s.number("variance_max", 1.0);
  const auto seed = s.seed("seed", 0);
  s.finish();
  require(condition >= 1.0, s, "condition", "must be >= 1");
  require(vmax > 0.0, s, "variance_max", "must be positive");
  Rng rng(seed);
  Matrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) g.col(j) = standard_normal(rng, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  Vector var(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double t = dim > 1 ? static_cast<double>(i) / static_cast<double>(dim - 1) : 0.0;
    var[i] = vmax * std::pow(condition, -t);
  }
  Matrix c = q * var.asDiagonal() * q.transpose();
  return 0.5 * (c + c.transpose());
}

TargetSection parse_target(Section s) {
  TargetSection t;
  t.kind = s.string("kind", "gaussian");
  if (t.kind == "posterior") {
    s.finish();
    return t;
  }
  const bool lognormal = t.kind == "lognormal";
  if (!lognormal && t.kind != "gaussian") {
    s.fail("kind", "must be gaussian, lognormal or posterior");
  }
  const std::string mean_key = lognormal ? "log_mean" : "mean";
  const std::string var_key = lognormal ? "log_variance" : "variance";
  const std::string cov_key = lognormal ? "log_covariance" : "covariance";
  const Eigen::Index dim = s.integer("dim", 0);
  t.mean = s.vector(mean_key, dim);
  const Eigen::Index n = t.mean.size();

  const int forms = int(s.has(var_key)) + int(s.has(cov_key)) + int(s.has("spectrum"));
  require(forms == 1, s, var_key,
          "exactly one of " + var_key + ", " + cov_key + ", spectrum is required");
  if (s.has(var_key)) {
    const Vector v = s.vector(var_key, n);
    require((v.array() > 0.0).all(), s, var_key, "must be positive");
    t.covariance = v.asDiagonal();
  } else if (s.has(cov_key)) {
    t.covariance = s.matrix(cov_key);
    require(t.covariance.rows() == n, s, cov_key, "has the wrong size");
  } else {
    t.covariance = spectrum_covariance(s.child("spectrum"), n);
  }
  if (lognormal) {
    t.shift = s.number("shift", 0.0);
    require(t.shift >= 0.0, s, "shift", "must be >= 0");
  }
  s.finish();
  return t;
}

ForwardSection parse_forward(Section s) {
  ForwardSection f;
  if (s.has("fluid")) {
    Section fl = s.child("fluid");
    f.fluid.bulk_modulus = fl.number("bulk_modulus", f.fluid.bulk_modulus);
    f.fluid.density = fl.number("density", f.fluid.density);
    f.fluid.viscosity = fl.number("viscosity", f.fluid.viscosity);
    fl.finish();
    require(f.fluid.bulk_modulus > 0 && f.fluid.viscosity > 0 && f.fluid.density >= 0,
            s, "fluid", "needs positive bulk_modulus and viscosity");
  }
  f.porosity = s.number("porosity", f.porosity);
  require(f.porosity > 0.0, s, "porosity", "must be positive");
  if (s.has("gravity")) f.gravity = point(s.at("gravity"), s, "gravity");
  f.top_pressure = s.number("top_pressure", f.top_pressure);
  if (s.has("wells")) {
    const auto& arr = s.at("wells");
    require(arr.is_array(), s, "wells", "must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section w(arr[i], s.sub("wells[" + std::to_string(i) + "]"));
      f.wells.push_back({w.number("x"), w.number("y"), w.number("rate")});
      w.finish();
    }
  }
  f.horizon = s.number("horizon", f.horizon);
  require(f.horizon > 0.0, s, "horizon", "must be positive");
  f.steps = s.integer("steps", f.steps);
  require(f.steps >= 1, s, "steps", "must be >= 1");
  if (s.has("sigma")) f.sigma = s.number("sigma");
  if (s.has("sigma_relative")) f.sigma_relative = s.number("sigma_relative");
  require(f.noise_sigma() >= 0.0, s, "sigma", "must be >= 0");

  if (s.has("observations")) {
    Section o = s.child("observations");
    f.observation_count = o.integer("count", f.observation_count);
    if (o.has("points")) {
      const auto& arr = o.at("points");
      require(arr.is_array(), o, "points", "must be an array");
      for (const auto& p : arr) f.points.push_back(point(p, o, "points"));
      f.observation_count = static_cast<int>(f.points.size());
    }
    o.finish();
    require(f.observation_count >= 1, s, "observations", "needs at least one point");
  }
  if (s.has("theta_true")) {
    Section t = s.child("theta_true");
    if (t.has("base")) f.theta_base = t.number("base");
    if (t.has("blobs")) {
      const auto& arr = t.at("blobs");
      require(arr.is_array(), t, "blobs", "must be an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Section b(arr[i], t.sub("blobs[" + std::to_string(i) + "]"));
        Blob blob{b.number("x"), b.number("y"), b.number("radius"), b.number("amplitude")};
        require(blob.radius > 0.0, b, "radius", "must be positive");
        b.finish();
        f.blobs.push_back(blob);
      }
    }
    t.finish();
  }
  f.data_seed = s.seed("data_seed", f.data_seed);
  if (s.has("data_file")) f.data_file = s.string("data_file", "");
  s.finish();
  return f;
}

SamplerSection parse_sampler(Section s) {
  SamplerSection out;
  auto& c = out.cfg;
  try {
    c.method = parse_method(s.string("method", "mh"));
  } catch (const std::invalid_argument& e) {
    s.fail("method", e.what());
  }
  c.dt = s.number("dt", c.dt);
  c.tau = s.number("tau", c.tau);
  c.leapfrog_steps = s.integer("leapfrog_steps", c.leapfrog_steps);
  c.learning_rate_max = s.number("learning_rate_max", c.learning_rate_max);
  c.random_learning_rate = s.boolean("random_learning_rate", c.random_learning_rate);
  c.n_samples = s.integer("n_samples", c.n_samples);
  c.seed = s.seed("seed", c.seed);
  c.thinning = s.integer("thinning", c.thinning);
  out.start = s.string("start", out.start);
  out.chains = s.integer("chains", out.chains);
  s.finish();
  try {
    c.validate();
  } catch (const std::exception& e) {
    s.fail("", e.what());
  }
  require(out.chains >= 1, s, "chains", "must be >= 1");
  return out;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  Section root(doc, "");
  cfg.name = root.string("name", cfg.name);
  if (root.has("mesh")) {
    Section m = root.child("mesh");
    cfg.mesh.nx = m.integer("nx", cfg.mesh.nx);
    cfg.mesh.ny = m.integer("ny", cfg.mesh.ny);
    cfg.mesh.lx = m.number("lx", cfg.mesh.lx);
    cfg.mesh.ly = m.number("ly", cfg.mesh.ly);
    m.finish();
    require(cfg.mesh.nx >= 1 && cfg.mesh.ny >= 1, m, "nx", "cells must be >= 1");
    require(cfg.mesh.lx > 0 && cfg.mesh.ly > 0, m, "lx", "extents must be positive");
  }
  if (root.has("prior")) {
    Section p = root.child("prior");
    auto& pr = cfg.prior;
    pr.gamma = p.number("gamma", pr.gamma);
    pr.delta = p.number("delta", pr.delta);
    pr.a = p.number("a", pr.a);
    pr.b = p.number("b", pr.b);
    pr.beta = p.number("beta", pr.beta);
    pr.mean = p.number("mean", pr.mean);
    pr.length_unit = p.number("length_unit", pr.length_unit);
    p.finish();
    require(pr.gamma >= 0.0, p, "gamma", "must be >= 0");
    require(pr.delta > 0.0, p, "delta", "must be positive");
    require(pr.a > 0.0 && pr.b > 0.0, p, "a", "a and b must be positive");
    require(pr.length_unit > 0.0, p, "length_unit", "must be positive");
  }
  if (root.has("forward")) cfg.forward = parse_forward(root.child("forward"));
  if (root.has("target")) cfg.target = parse_target(root.child("target"));
  if (root.has("sampler")) cfg.sampler = parse_sampler(root.child("sampler"));
  if (root.has("map")) {
    Section m = root.child("map");
    cfg.map.bfgs.gtol = m.number("gtol", cfg.map.bfgs.gtol);
    cfg.map.bfgs.max_iter = m.integer("max_iter", cfg.map.bfgs.max_iter);
    cfg.map.start = m.string("start", cfg.map.start);
    cfg.map.truncation = m.number("truncation", cfg.map.truncation);
    m.finish();
    require(cfg.map.bfgs.max_iter >= 0, m, "max_iter", "must be >= 0");
  }
  if (root.has("outputs")) {
    Section o = root.child("outputs");
    auto& out = cfg.outputs;
    out.directory = o.string("directory", out.directory);
    out.thinning = o.integer("thinning", out.thinning);
    if (o.has("probes")) {
      const auto& arr = o.at("probes");
      require(arr.is_array(), o, "probes", "must be an array of node indices");
      for (const auto& v : arr) {
        require(v.is_number_integer() && v.get<long long>() >= 0, o, "probes",
                "entries must be node indices");
        out.probes.push_back(static_cast<Eigen::Index>(v.get<long long>()));
      }
    }
    if (o.has("section_y")) out.section_y = o.number("section_y");
    out.level = o.number("level", out.level);
    out.max_lag = o.integer("max_lag", out.max_lag);
    o.finish();
    require(out.thinning >= 1, o, "thinning", "must be >= 1");
    require(out.level > 0.0 && out.level < 1.0, o, "level", "must lie in (0, 1)");
    require(out.max_lag >= 1, o, "max_lag", "must be >= 1");
  }
  root.finish();

  const std::string kind = cfg.target ? cfg.target->kind : "";
  if (kind == "posterior" && !cfg.forward) {
    throw ConfigError("config: a posterior target needs a 'forward' section");
  }
  const Eigen::Index nodes = static_cast<Eigen::Index>(cfg.mesh.nx + 1) * (cfg.mesh.ny + 1);
  for (auto p : cfg.outputs.probes) {
    if (kind == "posterior" && p >= nodes) {
      throw ConfigError("config: 'outputs.probes' entry " + std::to_string(p) +
                        " exceeds the node count");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ":" + std::to_string(line_of(text, e.byte)) +
                      ": " + e.what());
  }
  ExperimentConfig cfg = parse_config(doc);
  cfg.base_dir = path.parent_path();
  return cfg;
}

// ------------------------------------------------------------- constructors

Mesh2D build_mesh(const ExperimentConfig& cfg) {
  return Mesh2D(cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.lx, cfg.mesh.ly);
}

std::shared_ptr<const BilaplacianPrior> build_prior(const ExperimentConfig& cfg) {
  const Mesh2D mesh = build_mesh(cfg).scaled(1.0 / cfg.prior.length_unit);
  const auto& p = cfg.prior;
  return std::make_shared<const BilaplacianPrior>(
      build_prior(mesh, p.gamma, p.delta, Anisotropy{p.a, p.b, p.beta},
                  FieldVector::Constant(mesh.num_nodes(), p.mean)));
}

DarcyProblem build_problem(const ExperimentConfig& cfg) {
  if (!cfg.forward) throw ConfigError("config: 'forward' section is required");
  const auto& f = *cfg.forward;
  DarcyProblem p;
  p.mesh = build_mesh(cfg);
  p.fluid = f.fluid;
  p.porosity = f.porosity;
  p.gravity = f.gravity;
  p.top_pressure = f.top_pressure;
  p.wells = f.wells;
  p.horizon = f.horizon;
  p.steps = f.steps;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: 'forward' ") + e.what());
  }
  return p;
}

std::vector<Eigen::Vector2d> layout_points(const Mesh2D& mesh, int count) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(count));
  // Keep a margin of 5% on the sides and bottom and 10% below the top edge,
  // where the pressure is pinned and carries no information.
  for (int i = 1; i <= count; ++i) {
    const double u = halton(i, 2), v = halton(i, 3);
    pts.emplace_back(mesh.lx() * (0.05 + 0.9 * u), mesh.ly() * (0.05 + 0.85 * v));
  }
  return pts;
}

ObservationPlan build_plan(const ExperimentConfig& cfg) {
  if (!cfg.forward) throw ConfigError("config: 'forward' section is required");
  ObservationPlan plan;
  plan.points = cfg.forward->points.empty()
                    ? layout_points(build_mesh(cfg), cfg.forward->observation_count)
                    : cfg.forward->points;
  return plan;
}

FieldVector build_theta_true(const ExperimentConfig& cfg) {
  if (!cfg.forward) throw ConfigError("config: 'forward' section is required");
  const Mesh2D mesh = build_mesh(cfg);
  const auto& f = *cfg.forward;
  FieldVector theta =
      FieldVector::Constant(mesh.num_nodes(), f.theta_base.value_or(cfg.prior.mean));
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const auto x = mesh.coord(i);
    for (const auto& b : f.blobs) {
      const double r2 = (x - Eigen::Vector2d(b.x, b.y)).squaredNorm();
      theta[i] += b.amplitude * std::exp(-0.5 * r2 / (b.radius * b.radius));
    }
  }
  return theta;
}

std::vector<Eigen::Index> section_nodes(const Mesh2D& mesh, double y) {
  const int j = static_cast<int>(std::lround(std::clamp(y / mesh.hy(), 0.0,
                                                        double(mesh.ny()))));
  std::vector<Eigen::Index> nodes;
  for (int i = 0; i <= mesh.nx(); ++i) nodes.push_back(mesh.node(i, j));
  return nodes;
}

Vector build_data(const ExperimentConfig& cfg, const DarcyProblem& problem,
                  const ObservationPlan& plan) {
  const auto& f = *cfg.forward;
  if (f.data_file) {
    std::filesystem::path path = *f.data_file;
    if (path.is_relative()) path = cfg.base_dir / path;
    const auto obs = io::read_observations_csv(path);
    if (obs.plan.size() != plan.size()) {
      throw ConfigError("config: data file has " + std::to_string(obs.plan.size()) +
                        " observations, plan has " + std::to_string(plan.size()));
    }
    return obs.values;
  }
  return synth_data(problem, build_theta_true(cfg), plan, f.noise_sigma(), f.data_seed);
}

std::shared_ptr<const TargetDensity> build_target(const ExperimentConfig& cfg) {
  if (!cfg.target) throw ConfigError("config: 'target' section is required");
  const auto& t = *cfg.target;
  if (t.kind == "gaussian") {
    return std::make_shared<GaussianTarget>(t.mean, cholesky(t.covariance.inverse()));
  }
  if (t.kind == "lognormal") {
    return std::make_shared<LogNormalTarget>(t.mean, t.covariance, t.shift);
  }
  const DarcyProblem problem = build_problem(cfg);
  const ObservationPlan plan = build_plan(cfg);
  const Vector data = build_data(cfg, problem, plan);
  const double sigma = cfg.forward->noise_sigma();
  if (!(sigma > 0.0)) {
    throw ConfigError("config: a posterior target needs a positive noise sigma");
  }
  auto post = std::make_shared<PosteriorTarget>(build_prior(cfg), problem, plan, data,
                                                sigma);
  post->set_truncation(cfg.map.truncation);
  return post;
}

FieldVector default_start(const ExperimentConfig& cfg, const TargetDensity& target) {
  const std::string& start = cfg.map.start;
  if (start == "zero") return FieldVector::Zero(target.dim());
  if (start == "ones") return FieldVector::Ones(target.dim());
  if (auto* g = dynamic_cast<const GaussianTarget*>(&target)) {
    if (start == "default") return FieldVector::Zero(target.dim());
    return g->mean();
  }
  if (auto* l = dynamic_cast<const LogNormalTarget*>(&target)) {
    // The mode of each marginal lies inside the support.
    return (l->log_mean() - l->log_covariance().diagonal()).array().exp() + l->shift();
  }
  if (auto* p = dynamic_cast<const PosteriorTarget*>(&target)) return p->prior().mean();
  return FieldVector::Zero(target.dim());
}

}  // namespace hessmc
