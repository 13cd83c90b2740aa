#include "hessmc/io.hpp"

#include "hessmc/errors.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hessmc::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const fs::path& path, long line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path.string() + ":" + std::to_string(line) +
                  ": not a number: '" + s + "'");
  }
}

// Reads a CSV with the expected leading header columns; returns numeric rows.
std::vector<std::vector<double>> read_numeric(const fs::path& path,
                                              std::vector<std::string>& header) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  header = split(line);
  std::vector<std::vector<double>> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(header.size()) + " columns, got " +
                    std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      row[i] = to_double(cells[i], path, lineno);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void expect_header(const std::vector<std::string>& header,
                   const std::vector<std::string>& expected, const fs::path& path) {
  if (header.size() < expected.size()) {
    throw IoError(path.string() + ":1: header has too few columns");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (header[i] != expected[i]) {
      throw IoError(path.string() + ":1: expected column '" + expected[i] +
                    "', found '" + header[i] + "'");
    }
  }
}

}  // namespace

void write_chain_csv(const fs::path& path, const Chain& chain) {
  auto out = open_out(path);
  out << "step,accepted,logJ";
  for (Eigen::Index j = 0; j < chain.dim(); ++j) out << ",psi_" << j;
  out << '\n';
  for (Eigen::Index k = 0; k < chain.size(); ++k) {
    const long step = chain.kept_steps[k];
    out << step << ',' << int(chain.accepted[step]) << ',' << chain.log_j[k];
    for (Eigen::Index j = 0; j < chain.dim(); ++j) out << ',' << chain.samples(k, j);
    out << '\n';
  }
}

ChainFile read_chain_csv(const fs::path& path) {
  std::vector<std::string> header;
  const auto rows = read_numeric(path, header);
  expect_header(header, {"step", "accepted", "logJ"}, path);
  const Eigen::Index dim = static_cast<Eigen::Index>(header.size()) - 3;
  if (dim < 1) throw IoError(path.string() + ":1: no psi columns");
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (header[3 + j] != "psi_" + std::to_string(j)) {
      throw IoError(path.string() + ":1: unexpected column '" + header[3 + j] + "'");
    }
  }
  ChainFile f;
  f.samples.resize(static_cast<Eigen::Index>(rows.size()), dim);
  double acc = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    f.steps.push_back(static_cast<long>(r[0]));
    f.accepted.push_back(r[1] != 0.0 ? 1 : 0);
    acc += r[1] != 0.0 ? 1.0 : 0.0;
    f.log_j.push_back(r[2]);
    for (Eigen::Index j = 0; j < dim; ++j) {
      f.samples(static_cast<Eigen::Index>(k), j) = r[3 + j];
    }
  }
  f.acceptance_rate = rows.empty() ? 0.0 : acc / static_cast<double>(rows.size());
  const auto meta = metadata_path(path);
  if (fs::exists(meta)) {
    auto in = open_in(meta);
    try {
      const auto doc = nlohmann::json::parse(in);
      if (doc.contains("acceptance_rate")) {
        f.acceptance_rate = doc.at("acceptance_rate").get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw IoError(meta.string() + ": " + e.what());
    }
  }
  return f;
}

fs::path metadata_path(const fs::path& chain_csv) {
  fs::path p = chain_csv;
  return p.replace_extension(".json");
}

nlohmann::json chain_metadata(const Chain& chain, const SamplerConfig& cfg) {
  nlohmann::json doc;
  doc["method"] = to_string(chain.method);
  doc["seed"] = chain.seed;
  doc["acceptance_rate"] = chain.acceptance_rate;
  doc["raw_steps"] = chain.accepted.size();
  doc["kept_samples"] = chain.size();
  doc["dim"] = chain.dim();
  doc["wall_time_s"] = chain.wall_time;
  doc["config"] = {{"method", to_string(cfg.method)},
                   {"dt", cfg.dt},
                   {"tau", cfg.tau},
                   {"leapfrog_steps", cfg.leapfrog_steps},
                   {"learning_rate_max", cfg.learning_rate_max},
                   {"random_learning_rate", cfg.random_learning_rate},
                   {"n_samples", cfg.n_samples},
                   {"seed", cfg.seed},
                   {"thinning", cfg.thinning}};
  return doc;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

void write_field_csv(const fs::path& path, const Mesh2D& mesh,
                     const FieldVector& values) {
  if (values.size() != mesh.num_nodes()) {
    throw DimensionMismatch(static_cast<std::size_t>(mesh.num_nodes()),
                            static_cast<std::size_t>(values.size()));
  }
  auto out = open_out(path);
  out << "node,x,y,value\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto x = mesh.coord(i);
    out << i << ',' << x.x() << ',' << x.y() << ',' << values[i] << '\n';
  }
}

FieldVector read_field_csv(const fs::path& path) {
  std::vector<std::string> header;
  const auto rows = read_numeric(path, header);
  expect_header(header, {"node", "x", "y", "value"}, path);
  FieldVector v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (static_cast<std::size_t>(rows[k][0]) != k) {
      throw IoError(path.string() + ":" + std::to_string(k + 2) +
                    ": nodes must be listed in order");
    }
    v[static_cast<Eigen::Index>(k)] = rows[k][3];
  }
  return v;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& trajectory) {
  auto out = open_out(path);
  out << "step,time,node,x,y,pressure\n";
  for (std::size_t s = 0; s < trajectory.pressure.size(); ++s) {
    const auto& p = trajectory.pressure[s];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const auto x = trajectory.mesh.coord(i);
      out << s << ',' << trajectory.dt * static_cast<double>(s) << ',' << i << ','
          << x.x() << ',' << x.y() << ',' << p[i] << '\n';
    }
  }
}

void write_interval_csv(const fs::path& path, const Mesh2D& mesh,
                        const std::vector<Eigen::Index>& nodes,
                        const CredibleBounds& bounds) {
  auto out = open_out(path);
  out << "node,x,y,mean,lo,hi\n";
  for (auto i : nodes) {
    const auto x = mesh.coord(i);
    out << i << ',' << x.x() << ',' << x.y() << ',' << bounds.mean[i] << ','
        << bounds.lo[i] << ',' << bounds.hi[i] << '\n';
  }
}

void write_autocorrelation_csv(const fs::path& path,
                               const std::vector<std::string>& names,
                               const std::vector<Vector>& rho) {
  auto out = open_out(path);
  out << "lag";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  Eigen::Index lags = 0;
  for (const auto& r : rho) lags = std::max(lags, r.size());
  for (Eigen::Index t = 0; t < lags; ++t) {
    out << t + 1;
    for (const auto& r : rho) {
      out << ',';
      if (t < r.size()) out << r[t];
    }
    out << '\n';
  }
}

void write_observations_csv(const fs::path& path, const ObservationFile& obs) {
  auto out = open_out(path);
  out << "index,x,y,value,noiseless,sigma,seed\n";
  for (Eigen::Index i = 0; i < obs.plan.size(); ++i) {
    const auto& p = obs.plan.points[i];
    out << i << ',' << p.x() << ',' << p.y() << ',' << obs.values[i] << ','
        << obs.noiseless[i] << ',' << obs.sigma << ',' << obs.seed << '\n';
  }
}

ObservationFile read_observations_csv(const fs::path& path) {
  std::vector<std::string> header;
  const auto rows = read_numeric(path, header);
  expect_header(header, {"index", "x", "y", "value", "noiseless", "sigma", "seed"},
                path);
  ObservationFile obs;
  const auto n = static_cast<Eigen::Index>(rows.size());
  obs.values.resize(n);
  obs.noiseless.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[i];
    obs.plan.points.emplace_back(r[1], r[2]);
    obs.values[i] = r[3];
    obs.noiseless[i] = r[4];
    obs.sigma = r[5];
    obs.seed = static_cast<std::uint64_t>(r[6]);
  }
  return obs;
}

nlohmann::json stats_json(const ChainStats& s) {
  return {{"tau", s.tau},
          {"n_eff", s.n_eff},
          {"se", s.se},
          {"se_sqrt", s.se_sqrt},
          {"sigma", s.sigma},
          {"mean", s.mean},
          {"n", s.n},
          {"truncation_lag", s.truncation_lag},
          {"acceptance_rate", s.acceptance_rate}};
}

}  // namespace hessmc::io
