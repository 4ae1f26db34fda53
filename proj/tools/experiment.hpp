#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "npf/jitter.hpp"
#include "npf/linear_gaussian.hpp"
#include "npf/lorenz63.hpp"
#include "npf/model.hpp"

namespace npf::experiment {

struct KernelSpec {
  /// "truncated_gaussian", "mixture_dirac" or "none".
  std::string type = "truncated_gaussian";
  double p = 1.0;
  /// Truncated Gaussian constants; empty = the model's default.
  std::vector<double> constants;
  std::optional<double> epsilon;
  std::vector<double> base_spread;
};

struct KalmanCheckSpec {
  double max_mean_abs_dev = 0.15;
  double max_loglik_diff = 0.5;
};

struct ExperimentConfig {
  std::string model = "lorenz63";  ///< "lorenz63" or "linear_gaussian"
  std::uint64_t seed = 1;
  std::size_t N = 100;
  std::size_t M = 100;
  std::size_t n_obs = 300;
  std::size_t repeats = 10;
  KernelSpec kernel;
  lorenz63::LorenzConfig lorenz;
  LinearGaussianConfig linear_gaussian;
  std::optional<std::vector<double>> true_params;
  std::string output_dir = "npf-out";
  /// Existing observation CSV for `run`; empty = simulate truth per repeat.
  std::string observations;
  std::vector<std::size_t> sweep_N{50, 100, 200};
  /// Errors in a sweep are averaged over this trailing fraction of epochs.
  double window_fraction = 1.0 / 12.0;
  std::size_t budget_cap = 1'000'000;
  bool no_jitter = false;
  KalmanCheckSpec kalman;

  /// Throws ContractViolation on inconsistent settings.
  void validate() const;
};

/// Every key is optional; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

ModelPtr make_model(const ExperimentConfig& cfg);
JitterKernel make_kernel(const ExperimentConfig& cfg, const StateSpaceModel& model);
/// Configured true parameters, or the model's reference values.
ParamVector true_params(const ExperimentConfig& cfg);

/// Observation record plus hidden states when they are known.
struct ObservationSet {
  std::vector<ObsVector> observations;
  std::vector<StateVector> hidden;  ///< at observation epochs; empty if unknown
};

/// Simulate ground truth for the configured model and write truth.csv and
/// observations.csv into `dir`. Returns the written files.
std::vector<std::filesystem::path> write_truth(const ExperimentConfig& cfg, Rng& rng,
                                               const std::filesystem::path& dir,
                                               ObservationSet* out = nullptr);

/// Reads `epoch,y...` (observations.csv) or a truth CSV with y columns.
std::vector<ObsVector> read_observations(const std::filesystem::path& path, std::size_t obs_dim);

struct RunRecord {
  std::size_t repeat = 0;
  std::vector<double> epoch_seconds;
  ParamVector final_estimate;
  std::vector<double> final_errors;  ///< normalised, per parameter
  /// Normalised errors of the posterior-mean estimate at every epoch.
  std::vector<std::vector<double>> errors;
  std::vector<std::size_t> n_distinct;
};

struct RunResult {
  std::vector<RunRecord> runs;
  std::vector<std::filesystem::path> files;
  /// Errors averaged over repeats, per epoch and parameter.
  std::vector<std::vector<double>> mean_errors;
};

struct SweepResult {
  struct Fit {
    double c_hat = 0.0;
    double residual = 0.0;
    double loglog_slope = 0.0;
  };
  std::vector<std::size_t> N_values;
  /// [N index][parameter] window-averaged normalised error, mean over repeats.
  std::vector<std::vector<double>> mean_errors;
  std::vector<Fit> fits;  ///< per parameter
  std::vector<std::filesystem::path> files;
  std::vector<std::vector<double>> epoch_seconds;  ///< per (N, repeat) run
};

struct KalmanCheckResult {
  double mean_abs_dev = 0.0;
  double max_abs_dev = 0.0;
  double max_loglik_diff = 0.0;
  double mean_loglik_diff = 0.0;
  bool pass = false;
  std::vector<std::filesystem::path> files;
};

std::vector<std::filesystem::path> run_simulate(const ExperimentConfig& cfg,
                                                const std::filesystem::path& out_dir);
RunResult run_npf(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
SweepResult run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
KalmanCheckResult run_kalman_check(const ExperimentConfig& cfg,
                                   const std::filesystem::path& out_dir);

/// Fixed paper-scale constants of the inverse-square-root fit for
/// (S, R, B, k_o), kept as reference metadata only.
inline const std::vector<double> kReferenceRateConstants{0.807, 0.290, 0.496, 0.397};

/// Checks that every file named in the manifest exists and is non-empty.
bool verify_manifest(const std::filesystem::path& manifest_path, std::string* problem = nullptr);

}  // namespace npf::experiment
