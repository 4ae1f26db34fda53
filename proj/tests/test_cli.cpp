#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "experiment.hpp"
#include "npf/csv.hpp"
#include "npf/parallel.hpp"

using namespace npf;
using namespace npf::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "npf_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Every CSV under `dir`, keyed by relative path.
std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.path().extension() == ".csv") out[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
  }
  return out;
}

ExperimentConfig small_lg() {
  ExperimentConfig cfg;
  cfg.model = "linear_gaussian";
  cfg.N = 20;
  cfg.M = 20;
  cfg.n_obs = 25;
  cfg.repeats = 3;
  cfg.sweep_N = {10, 20};
  return cfg;
}

ExperimentConfig small_lorenz() {
  ExperimentConfig cfg;
  cfg.N = 10;
  cfg.M = 10;
  cfg.n_obs = 8;
  cfg.repeats = 2;
  cfg.sweep_N = {5, 10};
  return cfg;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NPF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, EmptyDocumentGivesDeskDefaults) {
  const auto cfg = parse_config(nlohmann::json::object());
  EXPECT_EQ(cfg.model, "lorenz63");
  EXPECT_EQ(cfg.N, 100u);
  EXPECT_EQ(cfg.M, 100u);
  EXPECT_EQ(cfg.n_obs, 300u);
  EXPECT_EQ(cfg.repeats, 10u);
  EXPECT_EQ(cfg.lorenz.obs_gap, 40u);
  EXPECT_EQ(true_params(cfg), lorenz63::reference_params());
  const auto model = make_model(cfg);
  const auto kernel = make_kernel(cfg, *model);
  EXPECT_EQ(variance_schedule(kernel, 1), (std::vector<double>{60, 60, 10, 1}));
}

TEST(Config, RoundTripsThroughJson) {
  auto cfg = small_lg();
  cfg.kernel.type = "mixture_dirac";
  cfg.kernel.epsilon = 0.25;
  cfg.seed = 1234567890123ULL;
  const auto back = parse_config(to_json(cfg));
  EXPECT_EQ(to_json(back), to_json(cfg));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config(nlohmann::json{{"Nn", 5}}), ContractViolation);
  EXPECT_THROW(parse_config(nlohmann::json{{"kernel", {{"typ", "none"}}}}), ContractViolation);
  EXPECT_THROW(parse_config(nlohmann::json{{"model", "van_der_pol"}}), ContractViolation);
  EXPECT_THROW(parse_config(nlohmann::json{{"repeats", 0}}), ContractViolation);
  EXPECT_THROW(parse_config(nlohmann::json{{"N", 2000}, {"M", 2000}}), ContractViolation);
  EXPECT_NO_THROW(parse_config(nlohmann::json{{"N", 2000}, {"M", 2000}, {"budget_cap", 4000000}}));
  EXPECT_THROW(parse_config(nlohmann::json{{"lorenz", {{"obs_var", -1.0}}}}), ContractViolation);
}

TEST(Simulate, PaperLengthIs24000EulerSteps) {
  auto cfg = small_lorenz();
  cfg.n_obs = 600;
  const auto dir = scratch("sim600");
  run_simulate(cfg, dir);
  const auto truth = read_csv_file((dir / "truth.csv").string());
  ASSERT_EQ(truth.rows.size(), 600u);
  EXPECT_NEAR(truth.rows.back()[truth.column("t_continuous")], 24000 * 1e-3, 1e-9);
}

TEST(Simulate, SingleEpochIs40EulerSteps) {
  auto cfg = small_lorenz();
  cfg.n_obs = 1;
  const auto dir = scratch("sim1");
  run_simulate(cfg, dir);
  const auto truth = read_csv_file((dir / "truth.csv").string());
  ASSERT_EQ(truth.rows.size(), 1u);
  EXPECT_NEAR(truth.rows[0][1], 40 * 1e-3, 1e-12);
  const auto obs = read_observations(dir / "observations.csv", 2);
  EXPECT_EQ(obs.size(), 1u);
}

TEST(Simulate, ByteIdenticalForSameSeed) {
  const auto cfg = small_lorenz();
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  run_simulate(cfg, a);
  run_simulate(cfg, b);
  EXPECT_EQ(csv_files(a), csv_files(b));
  auto other = cfg;
  other.seed = cfg.seed + 1;
  const auto c = scratch("sim_c");
  run_simulate(other, c);
  EXPECT_NE(csv_files(a), csv_files(c));
}

TEST(Run, OneRowPerEpochWithFinalErrors) {
  const auto cfg = small_lorenz();
  const auto dir = scratch("run");
  const auto res = run_npf(cfg, dir);
  ASSERT_EQ(res.runs.size(), cfg.repeats);
  const auto steps = read_csv_file((dir / "rep_000" / "steps.csv").string());
  EXPECT_EQ(steps.rows.size(), cfg.n_obs);
  EXPECT_EQ(steps.header.size(), 1u + 1u + 4u + 3u + 1u);
  const auto ness = read_csv_file((dir / "rep_000" / "ness.csv").string());
  EXPECT_EQ(ness.rows.size(), cfg.n_obs);
  const auto final = read_csv_file((dir / "final.csv").string());
  ASSERT_EQ(final.rows.size(), cfg.repeats);
  EXPECT_EQ(final.header.back(), "err_4");
  for (const auto& rec : res.runs) EXPECT_EQ(rec.epoch_seconds.size(), cfg.n_obs);
}

TEST(Run, DegenerateSizesComplete) {
  auto cfg = small_lorenz();
  cfg.N = 1;
  cfg.M = 1;
  cfg.n_obs = 20;
  cfg.repeats = 1;
  EXPECT_NO_THROW(run_npf(cfg, scratch("run11")));
}

TEST(Run, ReadsExistingObservations) {
  auto cfg = small_lg();
  const auto sim = scratch("obs_src");
  run_simulate(cfg, sim);
  cfg.observations = (sim / "observations.csv").string();
  cfg.repeats = 2;
  const auto dir = scratch("run_obs");
  const auto res = run_npf(cfg, dir);
  EXPECT_FALSE(fs::exists(dir / "rep_000" / "truth.csv"));
  EXPECT_EQ(read_csv_file((dir / "rep_001" / "steps.csv").string()).rows.size(), cfg.n_obs);
  std::string problem;
  EXPECT_TRUE(verify_manifest(dir / "manifest.json", &problem)) << problem;
}

TEST(Run, NoJitterCollapsesDiversity) {
  auto cfg = small_lg();
  cfg.no_jitter = true;
  cfg.n_obs = 60;
  cfg.repeats = 1;
  const auto res = run_npf(cfg, scratch("nojit"));
  const auto& nd = res.runs[0].n_distinct;
  for (std::size_t t = 1; t < nd.size(); ++t) ASSERT_LE(nd[t], nd[t - 1]);
  EXPECT_LT(nd.back(), cfg.N / 2);
}

TEST(Determinism, AllModesAcrossRunsAndThreads) {
  for (const auto& base : {small_lg(), small_lorenz()}) {
    for (const std::string mode : {"simulate", "run", "run-nojitter", "sweep", "kalman"}) {
      if (mode == "kalman" && base.model != "linear_gaussian") continue;
      auto cfg = base;
      cfg.no_jitter = mode == "run-nojitter";
      std::vector<std::map<std::string, std::string>> outputs;
      for (std::size_t threads : {1u, 4u, 4u}) {
        set_thread_count(threads);
        const auto dir = scratch("det_" + mode);
        if (mode == "simulate") run_simulate(cfg, dir);
        if (mode == "run" || mode == "run-nojitter") run_npf(cfg, dir);
        if (mode == "sweep") run_sweep(cfg, dir);
        if (mode == "kalman") run_kalman_check(cfg, dir);
        outputs.push_back(csv_files(dir));
      }
      set_thread_count(0);
      ASSERT_FALSE(outputs[0].empty());
      EXPECT_EQ(outputs[0], outputs[1]) << base.model << " " << mode;
      EXPECT_EQ(outputs[1], outputs[2]) << base.model << " " << mode;
    }
  }
}

TEST(Manifest, ListsEveryOutput) {
  const auto dir = scratch("manifest");
  auto cfg = small_lg();
  run_npf(cfg, dir / "run");
  run_sweep(cfg, dir / "sweep");
  run_kalman_check(cfg, dir / "kalman");
  run_simulate(cfg, dir / "sim");
  for (const char* sub : {"run", "sweep", "kalman", "sim"}) {
    std::string problem;
    ASSERT_TRUE(verify_manifest(dir / sub / "manifest.json", &problem)) << problem;
    const auto m = nlohmann::json::parse(slurp(dir / sub / "manifest.json"));
    EXPECT_TRUE(m.contains("git_describe"));
    EXPECT_TRUE(m.contains("truth_policy"));
    EXPECT_EQ(m["config"]["seed"], cfg.seed);
    std::size_t listed = m["outputs"].size();
    std::size_t on_disk = csv_files(dir / sub).size();
    EXPECT_EQ(listed, on_disk) << sub;
  }
  fs::remove(dir / "run" / "final.csv");
  EXPECT_FALSE(verify_manifest(dir / "run" / "manifest.json"));
}

TEST(Sweep, ReportsFitsAndRawTable) {
  auto cfg = small_lg();
  const auto dir = scratch("sweep");
  const auto res = run_sweep(cfg, dir);
  ASSERT_EQ(res.fits.size(), 1u);
  EXPECT_GT(res.fits[0].c_hat, 0.0);
  const auto raw = read_csv_file((dir / "sweep.csv").string());
  EXPECT_EQ(raw.rows.size(), cfg.sweep_N.size() * cfg.repeats);
  const auto fit = read_csv_file((dir / "rate_fit.csv").string());
  EXPECT_EQ(fit.rows.size(), 1u);
  cfg.sweep_N = {10};
  EXPECT_THROW(run_sweep(cfg, scratch("sweep1")), ContractViolation);
}

TEST(Sweep, PerEpochCostFlat) {
  auto cfg = small_lg();
  cfg.repeats = 1;
  cfg.sweep_N = {30, 60};
  cfg.n_obs = 300;
  const auto res = run_sweep(cfg, scratch("sweep_cost"));
  const auto& secs = res.epoch_seconds.back();
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  const std::size_t decile = secs.size() / 10;
  const double first = median({secs.begin(), secs.begin() + decile});
  const double last = median({secs.end() - decile, secs.end()});
  EXPECT_LT(last, 2.0 * first);
}

TEST(KalmanCheck, LargeMPassesAndSmallMDeviatesMore) {
  auto cfg = small_lg();
  cfg.n_obs = 50;
  cfg.repeats = 20;
  cfg.M = 5000;
  const auto big = run_kalman_check(cfg, scratch("kal_big"));
  cfg.M = 10;
  const auto small = run_kalman_check(cfg, scratch("kal_small"));
  EXPECT_GT(small.mean_abs_dev, big.mean_abs_dev);
  EXPECT_TRUE(big.pass);
}

TEST(KalmanCheck, RequiresLinearGaussian) {
  EXPECT_THROW(run_kalman_check(small_lorenz(), scratch("kal_lorenz")), ContractViolation);
}

TEST(Binary, VerbsAndExitCodes) {
  const auto dir = scratch("binary");
  auto j = to_json(small_lg());
  j["repeats"] = 1;
  const auto cfg_path = write_config(dir, j);
  const std::string common = " --config " + cfg_path.string() + " --seed 9 --out ";
  EXPECT_EQ(run_cli("simulate" + common + (dir / "sim").string()), 0);
  EXPECT_EQ(run_cli("run" + common + (dir / "run").string()), 0);
  EXPECT_EQ(run_cli("run --no-jitter" + common + (dir / "nojit").string()), 0);
  EXPECT_EQ(run_cli("sweep" + common + (dir / "sweep").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "sweep" / "rate_fit.csv"));
  const auto m = nlohmann::json::parse(slurp(dir / "nojit" / "manifest.json"));
  EXPECT_EQ(m["config"]["seed"], 9);
  EXPECT_EQ(m["config"]["no_jitter"], true);

  j["M"] = 2000;
  j["kalman"] = {{"max_mean_abs_dev", 0.15}, {"max_loglik_diff", 0.5}};
  const auto pass_cfg = write_config(dir, j);
  EXPECT_EQ(run_cli("kalman-check --config " + pass_cfg.string() + " --out " + (dir / "k1").string()), 0);
  j["M"] = 2;
  j["kalman"] = {{"max_mean_abs_dev", 1e-6}, {"max_loglik_diff", 1e-6}};
  const auto fail_cfg = write_config(dir, j);
  EXPECT_NE(run_cli("kalman-check --config " + fail_cfg.string() + " --out " + (dir / "k2").string()), 0);

  EXPECT_NE(run_cli("run --config " + (dir / "missing.json").string()), 0);
  EXPECT_NE(run_cli("frobnicate"), 0);
  j = nlohmann::json{{"N", 5}, {"bogus", 1}};
  EXPECT_NE(run_cli("run --config " + write_config(dir, j).string() + " --out " + (dir / "bad").string()), 0);
}
