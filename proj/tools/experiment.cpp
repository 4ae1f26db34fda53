#include "experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "npf/bounded_likelihood.hpp"
#include "npf/csv.hpp"
#include "npf/diagnostics.hpp"
#include "npf/inner_filter.hpp"
#include "npf/kalman.hpp"
#include "npf/nested.hpp"
#include "npf/parallel.hpp"

#ifndef NPF_GIT_DESCRIBE
#define NPF_GIT_DESCRIBE "unknown"
#endif

namespace npf::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream keys under a repeat's stream.
constexpr std::uint64_t kTruthStream = 0;
constexpr std::uint64_t kFilterStream = 1;

constexpr const char* kTruthPolicySimulated =
    "ground truth re-simulated for every repeat from the repeat's seed stream";
constexpr const char* kTruthPolicyShared = "observations shared by all repeats (read from file)";

std::string repeat_dir_name(std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rep_%03zu", r);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void close_checked(std::ofstream& os, const fs::path& p) {
  os.close();
  if (!os) throw std::runtime_error("I/O error writing " + p.string());
}

template <class T>
void read_key(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ContractViolation(where + ": expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ContractViolation(where + ": unknown key '" + k + "'");
  }
}

std::vector<double> default_constants(const std::string& model) {
  if (model == "lorenz63") return {60.0, 60.0, 10.0, 1.0};
  return {1.0};
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 1; k <= n; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

std::vector<double> normalized_errors(const ParamVector& estimate, const ParamVector& truth) {
  std::vector<double> e(truth.size());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = normalized_abs_error(estimate[k], truth[k]);
  return e;
}

struct FilterRun {
  std::vector<double> epoch_seconds;
  ParamVector final_estimate;
  std::vector<std::vector<double>> errors;
  std::vector<std::size_t> n_distinct;
};

/// One nested filter over `observations`, optionally writing its CSVs.
FilterRun filter_once(const StateSpaceModel& model, const JitterKernel& kernel,
                      const std::vector<ObsVector>& observations, std::size_t N, std::size_t M,
                      Rng rng, const std::optional<ParamVector>& truth,
                      const fs::path* dir, std::vector<fs::path>* files) {
  FilterRun run;
  std::ofstream steps_os, ness_os, est_os;
  std::optional<StepCsvWriter> steps_csv;
  std::optional<CsvWriter> est_csv;
  std::vector<NessRecord> ness;
  const std::size_t d = model.param_dim();
  if (dir != nullptr) {
    steps_os = open_out(*dir / "steps.csv");
    steps_csv.emplace(steps_os, d, model.state_dim());
    est_os = open_out(*dir / "estimates.csv");
    std::vector<std::string> header{"t"};
    for (auto& h : numbered("theta_", d)) header.push_back(h);
    if (truth) {
      for (auto& h : numbered("err_", d)) header.push_back(h);
    }
    est_csv.emplace(est_os, header);
  }

  auto sys = initialize(model, N, M, rng);
  for (const auto& y : observations) {
    const auto start = std::chrono::steady_clock::now();
    const auto out = step(sys, model, kernel, y, rng);
    run.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());

    const auto estimate = param_estimate(sys);
    run.n_distinct.push_back(out.ness.n_distinct);
    ness.push_back(out.ness);
    std::vector<double> cells(estimate.begin(), estimate.end());
    if (truth) {
      auto e = normalized_errors(estimate, *truth);
      cells.insert(cells.end(), e.begin(), e.end());
      run.errors.push_back(std::move(e));
    }
    if (dir != nullptr) {
      steps_csv->write(out);
      est_csv->row_keyed(out.t, cells);
    }
  }
  run.final_estimate = param_estimate(sys);

  if (dir != nullptr) {
    close_checked(steps_os, *dir / "steps.csv");
    close_checked(est_os, *dir / "estimates.csv");
    auto ness_os2 = open_out(*dir / "ness.csv");
    write_ness_csv(ness, ness_os2);
    close_checked(ness_os2, *dir / "ness.csv");
    files->push_back(*dir / "steps.csv");
    files->push_back(*dir / "estimates.csv");
    files->push_back(*dir / "ness.csv");
  }
  return run;
}

void write_manifest(const fs::path& out_dir, const std::string& verb, const ExperimentConfig& cfg,
                    const std::vector<fs::path>& files, json extra) {
  json m;
  m["verb"] = verb;
  m["git_describe"] = NPF_GIT_DESCRIBE;
  m["config"] = to_json(cfg);
  m["threads"] = thread_count();
  std::vector<std::string> rel;
  for (const auto& f : files) rel.push_back(fs::relative(f, out_dir).generic_string());
  m["outputs"] = rel;
  for (auto& [k, v] : extra.items()) m[k] = v;
  const auto p = out_dir / "manifest.json";
  auto os = open_out(p);
  os << m.dump(2) << '\n';
  close_checked(os, p);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (model != "lorenz63" && model != "linear_gaussian") {
    throw ContractViolation("config: model must be 'lorenz63' or 'linear_gaussian'");
  }
  if (N < 1 || M < 1) throw ContractViolation("config: N and M must be >= 1");
  if (N * M > budget_cap) {
    throw ContractViolation("config: N*M = " + std::to_string(N * M) + " exceeds budget_cap " +
                            std::to_string(budget_cap));
  }
  for (auto n : sweep_N) {
    if (n < 1 || n * n > budget_cap) {
      throw ContractViolation("config: sweep size " + std::to_string(n) + " outside budget");
    }
  }
  if (repeats < 1) throw ContractViolation("config: repeats must be >= 1");
  if (n_obs < 1) throw ContractViolation("config: n_obs must be >= 1");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw ContractViolation("config: window_fraction must lie in (0, 1]");
  }
  if (kernel.type != "truncated_gaussian" && kernel.type != "mixture_dirac" &&
      kernel.type != "none") {
    throw ContractViolation("config: kernel.type must be truncated_gaussian, mixture_dirac or none");
  }
  lorenz.validate();
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  if (j.is_null()) return cfg;
  check_keys(j,
             {"model", "seed", "N", "M", "n_obs", "repeats", "kernel", "lorenz", "linear_gaussian",
              "true_params", "output_dir", "observations", "sweep_N", "window_fraction",
              "budget_cap", "no_jitter", "kalman"},
             "config");
  read_key(j, "model", cfg.model);
  read_key(j, "seed", cfg.seed);
  read_key(j, "N", cfg.N);
  read_key(j, "M", cfg.M);
  read_key(j, "n_obs", cfg.n_obs);
  read_key(j, "repeats", cfg.repeats);
  read_key(j, "output_dir", cfg.output_dir);
  read_key(j, "observations", cfg.observations);
  read_key(j, "sweep_N", cfg.sweep_N);
  read_key(j, "window_fraction", cfg.window_fraction);
  read_key(j, "budget_cap", cfg.budget_cap);
  read_key(j, "no_jitter", cfg.no_jitter);
  if (j.contains("true_params")) cfg.true_params = j.at("true_params").get<std::vector<double>>();

  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    check_keys(k, {"type", "p", "constants", "epsilon", "base_spread"}, "kernel");
    read_key(k, "type", cfg.kernel.type);
    read_key(k, "p", cfg.kernel.p);
    read_key(k, "constants", cfg.kernel.constants);
    read_key(k, "base_spread", cfg.kernel.base_spread);
    if (k.contains("epsilon")) cfg.kernel.epsilon = k.at("epsilon").get<double>();
  }
  if (j.contains("lorenz")) {
    const auto& l = j.at("lorenz");
    check_keys(l, {"T_e", "obs_gap", "obs_var", "x_star", "v0_sq"}, "lorenz");
    read_key(l, "T_e", cfg.lorenz.T_e);
    read_key(l, "obs_gap", cfg.lorenz.obs_gap);
    read_key(l, "obs_var", cfg.lorenz.obs_var);
    read_key(l, "v0_sq", cfg.lorenz.v0_sq);
    if (l.contains("x_star")) cfg.lorenz.x_star = StateVector(l.at("x_star").get<std::vector<double>>());
  }
  if (j.contains("linear_gaussian")) {
    const auto& l = j.at("linear_gaussian");
    check_keys(l, {"a", "q", "r", "prior_mean", "prior_var", "a_lower", "a_upper"},
               "linear_gaussian");
    auto& lg = cfg.linear_gaussian;
    read_key(l, "a", lg.a);
    read_key(l, "q", lg.q);
    read_key(l, "r", lg.r);
    read_key(l, "prior_mean", lg.prior_mean);
    read_key(l, "prior_var", lg.prior_var);
    read_key(l, "a_lower", lg.a_lower);
    read_key(l, "a_upper", lg.a_upper);
  }
  if (j.contains("kalman")) {
    const auto& k = j.at("kalman");
    check_keys(k, {"max_mean_abs_dev", "max_loglik_diff"}, "kalman");
    read_key(k, "max_mean_abs_dev", cfg.kalman.max_mean_abs_dev);
    read_key(k, "max_loglik_diff", cfg.kalman.max_loglik_diff);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["model"] = cfg.model;
  j["seed"] = cfg.seed;
  j["N"] = cfg.N;
  j["M"] = cfg.M;
  j["n_obs"] = cfg.n_obs;
  j["repeats"] = cfg.repeats;
  json k;
  k["type"] = cfg.kernel.type;
  k["p"] = cfg.kernel.p;
  k["constants"] = cfg.kernel.constants.empty() ? default_constants(cfg.model) : cfg.kernel.constants;
  if (cfg.kernel.epsilon) k["epsilon"] = *cfg.kernel.epsilon;
  if (!cfg.kernel.base_spread.empty()) k["base_spread"] = cfg.kernel.base_spread;
  j["kernel"] = k;
  j["lorenz"] = {{"T_e", cfg.lorenz.T_e},
                 {"obs_gap", cfg.lorenz.obs_gap},
                 {"obs_var", cfg.lorenz.obs_var},
                 {"x_star", cfg.lorenz.x_star.values()},
                 {"v0_sq", cfg.lorenz.v0_sq}};
  const auto& lg = cfg.linear_gaussian;
  j["linear_gaussian"] = {{"a", lg.a},
                          {"q", lg.q},
                          {"r", lg.r},
                          {"prior_mean", lg.prior_mean},
                          {"prior_var", lg.prior_var},
                          {"a_lower", lg.a_lower},
                          {"a_upper", lg.a_upper}};
  j["true_params"] = true_params(cfg).values();
  j["output_dir"] = cfg.output_dir;
  if (!cfg.observations.empty()) j["observations"] = cfg.observations;
  j["sweep_N"] = cfg.sweep_N;
  j["window_fraction"] = cfg.window_fraction;
  j["budget_cap"] = cfg.budget_cap;
  j["no_jitter"] = cfg.no_jitter;
  j["kalman"] = {{"max_mean_abs_dev", cfg.kalman.max_mean_abs_dev},
                 {"max_loglik_diff", cfg.kalman.max_loglik_diff}};
  return j;
}

ModelPtr make_model(const ExperimentConfig& cfg) {
  if (cfg.model == "lorenz63") return lorenz63::build_lorenz_model(cfg.lorenz);
  auto lg = cfg.linear_gaussian;
  if (cfg.true_params) {
    if (cfg.true_params->size() != 1) throw ContractViolation("true_params: expected 1 value");
    lg.a = cfg.true_params->front();
  }
  return build_linear_gaussian_model(lg);
}

JitterKernel make_kernel(const ExperimentConfig& cfg, const StateSpaceModel& model) {
  const auto& box = model.support();
  if (cfg.no_jitter || cfg.kernel.type == "none") return JitterKernel::none(box);
  if (cfg.kernel.type == "mixture_dirac") {
    return JitterKernel::mixture_dirac(box, cfg.kernel.p, cfg.kernel.epsilon, cfg.kernel.base_spread);
  }
  auto c = cfg.kernel.constants.empty() ? default_constants(cfg.model) : cfg.kernel.constants;
  return JitterKernel::truncated_gaussian(box, std::move(c), cfg.kernel.p);
}

ParamVector true_params(const ExperimentConfig& cfg) {
  if (cfg.true_params) return ParamVector(*cfg.true_params);
  if (cfg.model == "lorenz63") return lorenz63::reference_params();
  return ParamVector{cfg.linear_gaussian.a};
}

std::vector<fs::path> write_truth(const ExperimentConfig& cfg, Rng& rng, const fs::path& dir,
                                  ObservationSet* out) {
  fs::create_directories(dir);
  const auto theta = true_params(cfg);
  const auto truth_path = dir / "truth.csv";
  const auto obs_path = dir / "observations.csv";
  auto truth_os = open_out(truth_path);
  auto obs_os = open_out(obs_path);

  ObservationSet set;
  if (cfg.model == "lorenz63") {
    const auto truth = lorenz63::simulate_truth(cfg.lorenz, theta, cfg.n_obs * cfg.lorenz.obs_gap, rng);
    lorenz63::write_truth_csv(truth, truth_os);
    CsvWriter obs(obs_os, {"epoch", "y1", "y3"});
    for (std::size_t n = 1; n <= truth.epochs(); ++n) {
      obs.row(n, truth.observations[n - 1][0], truth.observations[n - 1][1]);
      set.hidden.push_back(truth.state_at_epoch(n));
    }
    set.observations = truth.observations;
  } else {
    const auto model = make_model(cfg);
    const auto traj = simulate(*model, theta, cfg.n_obs, rng);
    CsvWriter truth_csv(truth_os, {"epoch", "t_continuous", "x1", "y1"});
    CsvWriter obs(obs_os, {"epoch", "y1"});
    for (std::size_t n = 1; n <= cfg.n_obs; ++n) {
      truth_csv.row(n, static_cast<double>(n), traj.states[n - 1][0], traj.observations[n - 1][0]);
      obs.row(n, traj.observations[n - 1][0]);
    }
    set.observations = traj.observations;
    set.hidden = traj.states;
  }
  close_checked(truth_os, truth_path);
  close_checked(obs_os, obs_path);
  if (out != nullptr) *out = std::move(set);
  return {truth_path, obs_path};
}

std::vector<ObsVector> read_observations(const fs::path& path, std::size_t obs_dim) {
  const auto table = read_csv_file(path.string());
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (!table.header[k].empty() && table.header[k][0] == 'y') cols.push_back(k);
  }
  if (cols.size() != obs_dim) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(obs_dim) +
                             " observation columns (y...), found " + std::to_string(cols.size()));
  }
  std::vector<ObsVector> obs;
  obs.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    ObsVector y(obs_dim);
    for (std::size_t k = 0; k < obs_dim; ++k) y[k] = row[cols[k]];
    if (!y.all_finite()) throw std::runtime_error(path.string() + ": non-finite observation");
    obs.push_back(std::move(y));
  }
  if (obs.empty()) throw std::runtime_error(path.string() + ": no observations");
  return obs;
}

std::vector<fs::path> run_simulate(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  Rng truth_rng = Rng(cfg.seed).child({0, kTruthStream});
  auto files = write_truth(cfg, truth_rng, out_dir);
  json extra;
  extra["truth_policy"] = "single ground truth from the seed's repeat-0 stream";
  if (cfg.model == "lorenz63") extra["euler_steps"] = cfg.n_obs * cfg.lorenz.obs_gap;
  write_manifest(out_dir, "simulate", cfg, files, extra);
  return files;
}

RunResult run_npf(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  const auto model = make_model(cfg);
  const auto kernel = make_kernel(cfg, *model);
  const auto theta_true = true_params(cfg);
  const bool shared_obs = !cfg.observations.empty();
  std::vector<ObsVector> shared;
  if (shared_obs) shared = read_observations(cfg.observations, model->obs_dim());

  const Rng root(cfg.seed);
  std::vector<RunRecord> records(cfg.repeats);
  std::vector<std::vector<fs::path>> files(cfg.repeats);
  parallel_for(cfg.repeats, [&](std::size_t r) {
    const Rng rep = root.child(r);
    const fs::path dir = out_dir / repeat_dir_name(r);
    fs::create_directories(dir);
    std::vector<ObsVector> observations = shared;
    if (!shared_obs) {
      Rng truth_rng = rep.child(kTruthStream);
      ObservationSet set;
      files[r] = write_truth(cfg, truth_rng, dir, &set);
      observations = std::move(set.observations);
    }
    auto run = filter_once(*model, kernel, observations, cfg.N, cfg.M, rep.child(kFilterStream),
                           theta_true, &dir, &files[r]);
    auto& rec = records[r];
    rec.repeat = r;
    rec.epoch_seconds = std::move(run.epoch_seconds);
    rec.final_estimate = run.final_estimate;
    rec.final_errors = normalized_errors(run.final_estimate, theta_true);
    rec.errors = std::move(run.errors);
    rec.n_distinct = std::move(run.n_distinct);
  });

  RunResult result;
  for (auto& f : files) result.files.insert(result.files.end(), f.begin(), f.end());

  const std::size_t d = model->param_dim();
  const std::size_t epochs = records.front().errors.size();
  result.mean_errors.assign(epochs, std::vector<double>(d, 0.0));
  for (const auto& rec : records) {
    for (std::size_t t = 0; t < epochs; ++t) {
      for (std::size_t k = 0; k < d; ++k) {
        result.mean_errors[t][k] += rec.errors[t][k] / static_cast<double>(cfg.repeats);
      }
    }
  }

  const auto mean_path = out_dir / "errors_mean.csv";
  {
    auto os = open_out(mean_path);
    std::vector<std::string> header{"t"};
    for (auto& h : numbered("err_", d)) header.push_back(h);
    CsvWriter csv(os, header);
    for (std::size_t t = 0; t < epochs; ++t) csv.row_keyed(t + 1, result.mean_errors[t]);
    close_checked(os, mean_path);
  }
  const auto final_path = out_dir / "final.csv";
  {
    auto os = open_out(final_path);
    std::vector<std::string> header{"repeat"};
    for (auto& h : numbered("theta_", d)) header.push_back(h);
    for (auto& h : numbered("err_", d)) header.push_back(h);
    CsvWriter csv(os, header);
    for (const auto& rec : records) {
      std::vector<double> cells(rec.final_estimate.begin(), rec.final_estimate.end());
      cells.insert(cells.end(), rec.final_errors.begin(), rec.final_errors.end());
      csv.row_keyed(rec.repeat, cells);
    }
    close_checked(os, final_path);
  }
  result.files.push_back(mean_path);
  result.files.push_back(final_path);

  json extra;
  extra["truth_policy"] = shared_obs ? kTruthPolicyShared : kTruthPolicySimulated;
  extra["kernel"] = kernel.describe();
  json timing = json::array();
  for (const auto& rec : records) timing.push_back(rec.epoch_seconds);
  extra["epoch_seconds"] = timing;
  write_manifest(out_dir, cfg.no_jitter ? "run --no-jitter" : "run", cfg, result.files, extra);
  result.runs = std::move(records);
  return result;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  if (cfg.sweep_N.size() < 2) throw ContractViolation("sweep: need at least 2 values in sweep_N");
  fs::create_directories(out_dir);
  const auto model = make_model(cfg);
  const auto kernel = make_kernel(cfg, *model);
  const auto theta_true = true_params(cfg);
  const std::size_t d = model->param_dim();
  const std::size_t n_sizes = cfg.sweep_N.size();
  const std::size_t window =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.window_fraction * cfg.n_obs)));

  const Rng root(cfg.seed);
  // Truth is shared by all sizes within a repeat.
  std::vector<std::vector<ObsVector>> truths(cfg.repeats);
  parallel_for(cfg.repeats, [&](std::size_t r) {
    Rng truth_rng = root.child(r).child(kTruthStream);
    if (cfg.model == "lorenz63") {
      truths[r] = lorenz63::simulate_truth(cfg.lorenz, theta_true,
                                           cfg.n_obs * cfg.lorenz.obs_gap, truth_rng)
                      .observations;
    } else {
      truths[r] = simulate(*model, theta_true, cfg.n_obs, truth_rng).observations;
    }
  });

  const std::size_t jobs = n_sizes * cfg.repeats;
  std::vector<std::vector<double>> window_errors(jobs);
  std::vector<std::vector<double>> seconds(jobs);
  parallel_for(jobs, [&](std::size_t job) {
    const std::size_t s = job / cfg.repeats;
    const std::size_t r = job % cfg.repeats;
    const std::size_t N = cfg.sweep_N[s];
    auto run = filter_once(*model, kernel, truths[r], N, N,
                           root.child(r).child({kFilterStream, N}), theta_true, nullptr, nullptr);
    std::vector<double> e(d, 0.0);
    const std::size_t first = run.errors.size() - std::min(window, run.errors.size());
    for (std::size_t t = first; t < run.errors.size(); ++t) {
      for (std::size_t k = 0; k < d; ++k) e[k] += run.errors[t][k];
    }
    for (auto& v : e) v /= static_cast<double>(run.errors.size() - first);
    window_errors[job] = std::move(e);
    seconds[job] = std::move(run.epoch_seconds);
  });

  SweepResult result;
  result.N_values = cfg.sweep_N;
  result.epoch_seconds = seconds;
  result.mean_errors.assign(n_sizes, std::vector<double>(d, 0.0));
  for (std::size_t job = 0; job < jobs; ++job) {
    for (std::size_t k = 0; k < d; ++k) {
      result.mean_errors[job / cfg.repeats][k] +=
          window_errors[job][k] / static_cast<double>(cfg.repeats);
    }
  }

  const auto raw_path = out_dir / "sweep.csv";
  {
    auto os = open_out(raw_path);
    std::vector<std::string> header{"N", "repeat"};
    for (auto& h : numbered("err_", d)) header.push_back(h);
    CsvWriter csv(os, header);
    for (std::size_t job = 0; job < jobs; ++job) {
      std::vector<double> cells{static_cast<double>(job % cfg.repeats)};
      cells.insert(cells.end(), window_errors[job].begin(), window_errors[job].end());
      csv.row_keyed(cfg.sweep_N[job / cfg.repeats], cells);
    }
    close_checked(os, raw_path);
  }
  const auto mean_path = out_dir / "sweep_mean.csv";
  {
    auto os = open_out(mean_path);
    std::vector<std::string> header{"N"};
    for (auto& h : numbered("err_", d)) header.push_back(h);
    CsvWriter csv(os, header);
    for (std::size_t s = 0; s < n_sizes; ++s) csv.row_keyed(cfg.sweep_N[s], result.mean_errors[s]);
    close_checked(os, mean_path);
  }
  const auto fit_path = out_dir / "rate_fit.csv";
  {
    auto os = open_out(fit_path);
    CsvWriter csv(os, {"param", "c_hat", "residual", "loglog_slope"});
    for (std::size_t k = 0; k < d; ++k) {
      std::vector<std::pair<double, double>> pts;
      std::vector<double> ns, es;
      bool positive = true;
      for (std::size_t s = 0; s < n_sizes; ++s) {
        const double N = static_cast<double>(cfg.sweep_N[s]);
        pts.emplace_back(N, result.mean_errors[s][k]);
        ns.push_back(N);
        es.push_back(result.mean_errors[s][k]);
        positive = positive && result.mean_errors[s][k] > 0.0;
      }
      const auto fit = fit_inverse_sqrt_rate(pts);
      SweepResult::Fit f{fit.c_hat, fit.residual, positive ? fit_loglog_slope(ns, es) : NAN};
      result.fits.push_back(f);
      csv.row(k + 1, f.c_hat, f.residual, f.loglog_slope);
    }
    close_checked(os, fit_path);
  }
  result.files = {raw_path, mean_path, fit_path};

  json extra;
  extra["truth_policy"] = "one ground truth per repeat, shared by every N in the sweep";
  extra["kernel"] = kernel.describe();
  extra["error_window_epochs"] = window;
  if (cfg.model == "lorenz63") extra["reference_rate_constants"] = kReferenceRateConstants;
  extra["epoch_seconds"] = seconds;
  write_manifest(out_dir, "sweep", cfg, result.files, extra);
  return result;
}

KalmanCheckResult run_kalman_check(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  if (cfg.model != "linear_gaussian") {
    throw ContractViolation("kalman-check: requires model = linear_gaussian");
  }
  fs::create_directories(out_dir);
  const auto model = std::static_pointer_cast<const LinearGaussianModel>(make_model(cfg));
  const double a = model->config().a;
  const ParamVector theta{a};

  struct Series {
    std::vector<double> kalman_mean, pf_mean, kalman_ll, pf_ll;
  };
  const Rng root(cfg.seed);
  std::vector<Series> series(cfg.repeats);
  parallel_for(cfg.repeats, [&](std::size_t r) {
    Rng truth_rng = root.child(r).child(kTruthStream);
    const auto traj = simulate(*model, theta, cfg.n_obs, truth_rng);
    std::vector<double> ys;
    for (const auto& y : traj.observations) ys.push_back(y[0]);
    const auto kf = kalman_filter(model->config(), a, ys);
    Rng pf_rng = root.child(r).child(kFilterStream);
    const auto pf = run_bootstrap(*model, theta, traj.observations, cfg.M, pf_rng);
    auto& s = series[r];
    double kll = 0.0, pll = 0.0;
    for (std::size_t t = 0; t < ys.size(); ++t) {
      kll += kf.step_log_likelihood[t];
      pll += pf.steps[t].estimate.log_u;
      s.kalman_mean.push_back(kf.filter_mean[t]);
      s.pf_mean.push_back(pf.steps[t].filter_mean[0]);
      s.kalman_ll.push_back(kll);
      s.pf_ll.push_back(pll);
    }
  });

  KalmanCheckResult res;
  const auto series_path = out_dir / "kalman_check.csv";
  {
    auto os = open_out(series_path);
    CsvWriter csv(os, {"repeat", "t", "kalman_mean", "pf_mean", "abs_dev", "kalman_loglik",
                       "pf_loglik"});
    double dev_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      const auto& s = series[r];
      for (std::size_t t = 0; t < s.pf_mean.size(); ++t) {
        const double dev = std::abs(s.pf_mean[t] - s.kalman_mean[t]);
        dev_sum += dev;
        ++count;
        res.max_abs_dev = std::max(res.max_abs_dev, dev);
        csv.row(r, t + 1, s.kalman_mean[t], s.pf_mean[t], dev, s.kalman_ll[t], s.pf_ll[t]);
      }
      const double lld = std::abs(s.pf_ll.back() - s.kalman_ll.back());
      res.max_loglik_diff = std::max(res.max_loglik_diff, lld);
      res.mean_loglik_diff += lld / static_cast<double>(cfg.repeats);
    }
    res.mean_abs_dev = dev_sum / static_cast<double>(count);
    close_checked(os, series_path);
  }
  res.pass = res.mean_abs_dev < cfg.kalman.max_mean_abs_dev &&
             res.max_loglik_diff < cfg.kalman.max_loglik_diff;

  const auto summary_path = out_dir / "kalman_summary.csv";
  {
    auto os = open_out(summary_path);
    CsvWriter csv(os, {"mean_abs_dev", "max_abs_dev", "mean_loglik_diff", "max_loglik_diff", "pass"});
    csv.row(res.mean_abs_dev, res.max_abs_dev, res.mean_loglik_diff, res.max_loglik_diff,
            res.pass ? 1 : 0);
    close_checked(os, summary_path);
  }
  res.files = {series_path, summary_path};
  json extra;
  extra["truth_policy"] = kTruthPolicySimulated;
  extra["pass"] = res.pass;
  extra["mean_abs_dev"] = res.mean_abs_dev;
  extra["max_loglik_diff"] = res.max_loglik_diff;
  write_manifest(out_dir, "kalman-check", cfg, res.files, extra);
  return res;
}

bool verify_manifest(const fs::path& manifest_path, std::string* problem) {
  std::ifstream in(manifest_path);
  if (!in) {
    if (problem) *problem = "missing manifest " + manifest_path.string();
    return false;
  }
  json m;
  in >> m;
  const auto base = manifest_path.parent_path();
  for (const auto& rel : m.at("outputs")) {
    const auto p = base / rel.get<std::string>();
    std::error_code ec;
    if (!fs::exists(p, ec) || fs::file_size(p, ec) == 0) {
      if (problem) *problem = "missing or empty output " + p.string();
      return false;
    }
  }
  return true;
}

}  // namespace npf::experiment
