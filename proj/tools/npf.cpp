#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "npf/parallel.hpp"
#include "npf/types.hpp"

namespace {

namespace ex = npf::experiment;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Root seed (overrides the config)");
  cmd->add_option("--out", args.out, "Output directory (overrides the config)");
  cmd->add_option("--threads", args.threads, "Worker threads (default: NPF_THREADS or hardware)");
}

ex::ExperimentConfig resolve(const CommonArgs& args, std::filesystem::path& out) {
  auto cfg = args.config.empty() ? ex::ExperimentConfig{} : ex::load_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (!args.out.empty()) cfg.output_dir = args.out;
  if (args.threads > 0) npf::set_thread_count(args.threads);
  out = cfg.output_dir;
  return cfg;
}

void print_files(const std::filesystem::path& out) {
  std::cout << "wrote " << (out / "manifest.json").string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested particle filter experiments"};
  app.require_subcommand(1);

  CommonArgs sim_args, run_args, sweep_args, kalman_args;
  bool no_jitter = false;
  auto* sim = app.add_subcommand("simulate", "Simulate ground truth and observations");
  add_common(sim, sim_args);
  auto* run = app.add_subcommand("run", "Run the nested particle filter over repeats");
  add_common(run, run_args);
  run->add_flag("--no-jitter", no_jitter, "Disable the jittering kernel");
  auto* sweep = app.add_subcommand("sweep", "Error versus particle count with N = M");
  add_common(sweep, sweep_args);
  auto* kalman = app.add_subcommand("kalman-check", "Compare the inner filter with a Kalman filter");
  add_common(kalman, kalman_args);

  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::path out;
    if (sim->parsed()) {
      auto cfg = resolve(sim_args, out);
      ex::run_simulate(cfg, out);
      print_files(out);
    } else if (run->parsed()) {
      auto cfg = resolve(run_args, out);
      cfg.no_jitter = cfg.no_jitter || no_jitter;
      const auto res = ex::run_npf(cfg, out);
      std::cout << "final mean normalised error:";
      for (double e : res.mean_errors.back()) std::cout << ' ' << e;
      std::cout << '\n';
      print_files(out);
    } else if (sweep->parsed()) {
      auto cfg = resolve(sweep_args, out);
      const auto res = ex::run_sweep(cfg, out);
      for (std::size_t k = 0; k < res.fits.size(); ++k) {
        std::cout << "param " << k + 1 << ": c_hat=" << res.fits[k].c_hat
                  << " slope=" << res.fits[k].loglog_slope << '\n';
      }
      print_files(out);
    } else if (kalman->parsed()) {
      auto cfg = resolve(kalman_args, out);
      if (kalman_args.config.empty()) cfg.model = "linear_gaussian";
      const auto res = ex::run_kalman_check(cfg, out);
      std::cout << "mean |pf - kalman| = " << res.mean_abs_dev
                << ", max |loglik diff| = " << res.max_loglik_diff << '\n'
                << (res.pass ? "PASS" : "FAIL") << '\n';
      print_files(out);
      return res.pass ? 0 : 2;
    }
  } catch (const npf::ContractViolation& e) {
    std::cerr << "npf: invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "npf: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
