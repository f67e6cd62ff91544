#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lse/commands.hpp"

namespace lse {
namespace {

namespace fs = std::filesystem;

const std::string kDir = LSE_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lse_test_commands_" + name);
  fs::remove_all(p);
  return p;
}

// Shipped double-well config at eps = 0.4, which solves in about a second.
RunConfig fast_double_well() {
  RunConfig cfg = load_run_config(kDir + "/double_well.json");
  cfg.problem.params.eps = 0.4;
  cfg.solver.grad_tol = 1e-8;
  cfg.outputs.verbosity = 0;
  return cfg;
}

TEST(Overrides, OutDirSeedVerbose) {
  RunConfig cfg = fast_double_well();
  CommandOptions opt;
  opt.out_dir = "elsewhere";
  opt.seed = 99;
  opt.verbose = true;
  const RunConfig c = apply_overrides(cfg, opt);
  EXPECT_EQ(c.outputs.dir, "elsewhere");
  EXPECT_EQ(c.rng_seed, 99u);
  EXPECT_EQ(c.solver.probe_seed, 99u);
  EXPECT_GE(c.outputs.verbosity, 2);
}

TEST(Solve, OutputsAreIdenticalAcrossJobCounts) {
  const fs::path a = scratch("jobs1");
  const fs::path b = scratch("jobs2");
  RunConfig cfg = fast_double_well();
  cfg.outputs.log_iterations = true;
  cfg.solver.record_history = true;
  std::ostringstream log;
  CommandOptions opt;
  opt.out_dir = a.string();
  opt.jobs = 1;
  ASSERT_EQ(cmd_solve(cfg, opt, log), kExitOk) << log.str();
  opt.out_dir = b.string();
  opt.jobs = 2;
  ASSERT_EQ(cmd_solve(cfg, opt, log), kExitOk) << log.str();
  for (const char* f : {"levels.csv", "report.json", "fields/u_well1.csv", "fields/u_well2.csv",
                        "fields/v_well1.csv", "fields/v_well2.csv", "history/well1.csv", "history/well2.csv"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Solve, ReportJsonShape) {
  const fs::path dir = scratch("report");
  std::ostringstream log;
  CommandOptions opt;
  opt.out_dir = dir.string();
  ASSERT_EQ(cmd_solve(fast_double_well(), opt, log), kExitOk);
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_TRUE(j["passed"].get<bool>());
  ASSERT_EQ(j["wells"].size(), 2u);
  EXPECT_EQ(j["wells"][0]["well"], 1);
  EXPECT_EQ(j["wells"][1]["well"], 2);
  EXPECT_EQ(j["wells"][1]["status"], "Converged");
  EXPECT_EQ(j["tolerances"]["grad_tol"], 1e-8);
  EXPECT_EQ(j["pairs"][0]["wells"], nlohmann::json::array({1, 2}));

  const std::string levels = slurp(dir / "levels.csv");
  EXPECT_EQ(levels.rfind("well,level,Q,distance_to_well,region,", 0), 0u);
  // The dumped field reloads on the scaled grid.
  std::ifstream is(dir / "fields" / "v_well2.csv");
  const LoadedField v = read_field_csv(is);
  EXPECT_NEAR(v.grid.radius(), 0.4 * j["wells"][1]["R_final"].get<double>(), 1e-12);
  fs::remove_all(dir);
}

TEST(Solve, FailureStillWritesReport) {
  const fs::path dir = scratch("eps5");
  RunConfig cfg = load_run_config(kDir + "/double_well_eps5.json");
  cfg.outputs.verbosity = 0;
  std::ostringstream log;
  CommandOptions opt;
  opt.out_dir = dir.string();
  EXPECT_EQ(cmd_solve(cfg, opt, log), kExitFailure);
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_FALSE(j["localization_ok"].get<bool>());
  EXPECT_FALSE(j["failures"].empty());
  EXPECT_NE(slurp(dir / "levels.csv").find("BoundaryHit"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Sweep, ListValidation) {
  EXPECT_THROW(validate_sweep_list({}), Error);
  EXPECT_THROW(validate_sweep_list({0.1, 0.2}), Error);
  EXPECT_THROW(validate_sweep_list({0.2, 0.2}), Error);
  EXPECT_THROW(validate_sweep_list({0.2, -0.1}), Error);
  EXPECT_NO_THROW(validate_sweep_list({0.4, 0.2, 0.1}));

  const fs::path dir = scratch("empty_sweep");
  RunConfig cfg = fast_double_well();
  cfg.sweep_eps.clear();
  std::ostringstream log;
  CommandOptions opt;
  opt.out_dir = dir.string();
  EXPECT_EQ(cmd_sweep(cfg, {}, opt, log), kExitUsage);
  EXPECT_NE(log.str().find("nonempty"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "sweep.csv"));
}

SweepResult synthetic(const std::vector<std::vector<double>>& distances) {
  SweepResult s;
  for (std::size_t k = 0; k < distances.size(); ++k) {
    s.eps.push_back(1.0 / (k + 1));
    SolveOutcome o;
    for (std::size_t i = 0; i < distances[k].size(); ++i) {
      WellAudit w;
      w.well = i;
      w.status = SolveStatus::Converged;
      w.distance_to_well = distances[k][i];
      o.report.wells.push_back(w);
    }
    s.outcomes.push_back(o);
  }
  return s;
}

TEST(Sweep, TrendCheck) {
  SweepResult s = synthetic({{1e-3, 2e-3}, {1e-4, 2e-3}, {1e-5, 1e-4}});
  check_trend(s);
  EXPECT_TRUE(s.trend_ok);

  // Growth inside the resolution band is a tie.
  s = synthetic({{1e-10, 1e-10}, {5e-10, 1e-10}});
  check_trend(s);
  EXPECT_TRUE(s.trend_ok);

  s = synthetic({{1e-4, 1e-3}, {1e-5, 2e-3}});
  check_trend(s);
  EXPECT_FALSE(s.trend_ok);
  ASSERT_EQ(s.trend_violations.size(), 1u);
  EXPECT_NE(s.trend_violations[0].find("well 2"), std::string::npos);

  // Non-converged wells are not compared.
  s = synthetic({{1e-4, 1e-3}, {1e-5, 2e-3}});
  s.outcomes[1].report.wells[1].status = SolveStatus::BoundaryHit;
  check_trend(s);
  EXPECT_TRUE(s.trend_ok);
}

TEST(Sweep, TwoEpsValues) {
  RunConfig cfg = fast_double_well();
  std::ostringstream log;
  const SweepResult s = run_sweep(cfg, {0.4, 0.2}, 2, log);
  ASSERT_EQ(s.outcomes.size(), 2u);
  ASSERT_EQ(s.rows.size(), 4u);
  ASSERT_TRUE(s.onset.has_value());
  EXPECT_EQ(*s.onset, 0.4);
  EXPECT_TRUE(s.trend_ok);
  EXPECT_EQ(sweep_exit_code(s), kExitOk);
  std::ostringstream csv;
  write_sweep_csv(csv, s);
  EXPECT_EQ(csv.str().rfind("eps,well,level,distance_to_well,status,separation_ok\n0.4,1,", 0), 0u);
}

TEST(Sweep, OnsetExcludesFailingLargeEps) {
  RunConfig cfg = load_run_config(kDir + "/double_well_eps5.json");
  cfg.outputs.verbosity = 0;
  std::ostringstream log;
  const SweepResult s = run_sweep(cfg, {5.0, 0.4}, 1, log);
  ASSERT_TRUE(s.onset.has_value());
  EXPECT_EQ(*s.onset, 0.4);
  EXPECT_EQ(sweep_exit_code(s), kExitFailure);
}

TEST(Verify, SuiteExitCode) {
  SuiteOptions opt;
  opt.include_solves = false;
  opt.split_samples = 10'000;
  std::ostringstream log;
  EXPECT_EQ(cmd_verify(opt, true, log), kExitOk);
  EXPECT_NE(log.str().find("PASS"), std::string::npos);
  opt.split = [](double s, double delta) {
    FSplit f = f_split(s, delta);
    f.f2 += 1.0;
    return f;
  };
  std::ostringstream bad;
  EXPECT_EQ(cmd_verify(opt, false, bad), kExitFailure);
  EXPECT_NE(bad.str().find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace lse
