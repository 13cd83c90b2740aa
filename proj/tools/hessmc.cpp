// Command-line front end: gen-data, find-map, sample, diagnose.
#include "hessmc/commands.hpp"
#include "hessmc/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Hessian-preconditioned MCMC experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  int chains = 1;
  std::vector<std::string> chain_files;

  auto* gen = app.add_subcommand("gen-data", "Synthesize noisy pressure observations");
  gen->add_option("--config", config_path, "Experiment config (JSON)")->required();
  gen->add_option("--out", out, "Observation CSV to write")->required();
  auto* gen_seed = gen->add_option("--seed", seed, "Noise seed (overrides data_seed)");

  auto* find = app.add_subcommand("find-map", "Locate the MAP point with BFGS");
  find->add_option("--config", config_path, "Experiment config (JSON)")->required();
  find->add_option("--out", out, "Output directory");

  auto* sample = app.add_subcommand("sample", "Run the configured sampler");
  sample->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sample->add_option("--out", out, "Output directory");
  auto* sample_seed = sample->add_option("--seed", seed, "Chain seed (overrides sampler.seed)");
  auto* sample_chains =
      sample->add_option("--chains", chains, "Independent chains run in parallel")
          ->check(CLI::PositiveNumber);

  auto* diag = app.add_subcommand("diagnose", "IACT, ESS, intervals and autocorrelations");
  diag->add_option("chains", chain_files, "Chain CSV files")->required();
  diag->add_option("--config", config_path, "Config supplying mesh, probes and level");
  diag->add_option("--out", out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    using namespace hessmc;
    std::optional<ExperimentConfig> cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    auto out_dir = [&]() -> fs::path {
      return out.empty() ? fs::path(cfg ? cfg->outputs.directory : "out") : fs::path(out);
    };

    if (*gen) {
      std::optional<std::uint64_t> s;
      if (*gen_seed) s = seed;
      const auto obs = cmd_gen_data(*cfg, out, s);
      std::cout << "wrote " << obs.plan.size() << " observations to " << out << '\n';
    } else if (*find) {
      const auto res = cmd_find_map(*cfg, out_dir());
      std::cout << "J = " << res.J_final << ", |grad|_inf = " << res.grad_norm_final
                << ", iterations = " << res.iterations
                << (res.converged ? ", converged" : ", NOT converged") << '\n';
    } else if (*sample) {
      std::optional<std::uint64_t> s;
      if (*sample_seed) s = seed;
      int n = *sample_chains ? chains : (cfg->sampler ? cfg->sampler->chains : 1);
      const auto result = cmd_sample(*cfg, out_dir(), n, s);
      for (std::size_t k = 0; k < result.size(); ++k) {
        std::cout << "chain " << k << ": acceptance " << result[k].acceptance_rate
                  << ", " << result[k].wall_time << " s\n";
      }
    } else if (*diag) {
      DiagnoseOptions opt = cfg ? diagnose_options(*cfg) : DiagnoseOptions{};
      std::vector<fs::path> files(chain_files.begin(), chain_files.end());
      const auto doc = cmd_diagnose(files, opt, out_dir());
      std::cout << doc.dump(2) << '\n';
    }
  } catch (const hessmc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(hessmc::ErrorCategory::invalid_argument);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(hessmc::ErrorCategory::io);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
