#include <gtest/gtest.h>

#include <cmath>

#include "lse/verify.hpp"

namespace lse {
namespace {

const SuiteCheck& find_check(const std::vector<SuiteCheck>& checks, const std::string& prefix) {
  for (const SuiteCheck& c : checks) {
    if (c.name.rfind(prefix, 0) == 0) return c;
  }
  throw std::runtime_error("no check named " + prefix);
}

struct DoubleWellRun {
  Problem problem;
  SolverConfig config;
  MultiplicityRun run;
};

// eps = 0.4 keeps the two solves around a second.
const DoubleWellRun& double_well_run() {
  static const DoubleWellRun fixture = [] {
    DoubleWellRun d;
    d.problem.params.eps = 0.4;
    d.problem.params.potential = make_multiwell({{0.0, 0.0}, {2.0, 0.0}}, 2.0, 0.25);
    d.config.localization = default_geometry(*d.problem.params.potential);
    d.run = solve_multiplicity(d.problem, d.config);
    return d;
  }();
  return fixture;
}

AuditContext context_of(const DoubleWellRun& d) {
  AuditContext ctx;
  ctx.eps = d.problem.params.eps;
  ctx.params = d.problem.params;
  ctx.config = d.config;
  ctx.c0 = d.run.c0;
  ctx.c_inf = d.run.c_inf;
  ctx.gamma = d.run.gamma;
  return ctx;
}

TEST(IdentitySuite, AllChecksPass) {
  const std::vector<SuiteCheck> checks = run_identity_suite();
  ASSERT_GE(checks.size(), 10u);
  for (const SuiteCheck& c : checks) {
    EXPECT_TRUE(c.pass) << c.name << ": worst " << c.worst << " tol " << c.tolerance << " " << c.detail;
    EXPECT_GT(c.samples, 0u) << c.name;
  }
  EXPECT_EQ(find_check(checks, "splitting identity").samples, 1'000'000u);
}

TEST(IdentitySuite, CorruptedF2BranchIsCaught) {
  SuiteOptions opt;
  opt.include_solves = false;
  opt.split = [](double s, double delta) {
    FSplit f = f_split(s, delta);
    if (std::abs(s) > delta) f.f2 *= 1.0 + 1e-6;
    return f;
  };
  const std::vector<SuiteCheck> checks = run_identity_suite(opt);
  const SuiteCheck& split = find_check(checks, "splitting identity");
  EXPECT_FALSE(split.pass);
  EXPECT_GT(split.failures, 0u);
  EXPECT_GT(split.worst, split.tolerance);
}

TEST(IdentitySuite, DiscontinuousSeamIsCaught) {
  SuiteOptions opt;
  opt.include_solves = false;
  opt.split = [](double s, double delta) {
    FSplit f = f_split(s, delta);
    if (std::abs(s) >= delta) f.f1 += 1e-9;
    return f;
  };
  EXPECT_FALSE(check_seam(opt).pass);
}

TEST(IdentitySuite, Deterministic) {
  SuiteOptions opt;
  opt.include_solves = false;
  opt.split_samples = 10'000;
  const auto a = run_identity_suite(opt);
  const auto b = run_identity_suite(opt);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].worst, b[k].worst) << a[k].name;
    EXPECT_EQ(a[k].failures, b[k].failures) << a[k].name;
  }
}

TEST(Audit, ConvergedDoubleWellPasses) {
  const DoubleWellRun& d = double_well_run();
  ASSERT_TRUE(d.run.all_converged);
  const VerificationReport rep = audit(d.run, d.problem, d.config);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.status(), 0);
  EXPECT_TRUE(rep.failures.empty());
  ASSERT_EQ(rep.wells.size(), 2u);
  ASSERT_EQ(rep.pairs.size(), 1u);
  EXPECT_TRUE(rep.pairs[0].disjoint_balls);
  EXPECT_GT(rep.pairs[0].relative_l2, kDistinctL2);
  for (const WellAudit& w : rep.wells) {
    EXPECT_TRUE(w.localized);
    EXPECT_TRUE(w.positivity.ok);
    EXPECT_LT(w.level, rep.c0 + rep.gamma);
    EXPECT_LT(w.distance_to_well, d.config.localization.rho0);
  }
  EXPECT_EQ(rep.tolerances.grad_tol, d.config.grad_tol);
}

TEST(Audit, IsPure) {
  const DoubleWellRun& d = double_well_run();
  const VerificationReport a = audit(d.run, d.problem, d.config);
  const VerificationReport b = audit(d.run, d.problem, d.config);
  ASSERT_EQ(a.wells.size(), b.wells.size());
  for (std::size_t i = 0; i < a.wells.size(); ++i) {
    EXPECT_EQ(a.wells[i].level, b.wells[i].level);
    EXPECT_EQ(a.wells[i].barycenter, b.wells[i].barycenter);
    EXPECT_EQ(a.wells[i].weak_res, b.wells[i].weak_res);
    EXPECT_EQ(a.wells[i].nehari_res, b.wells[i].nehari_res);
  }
  EXPECT_EQ(a.failures, b.failures);
}

TEST(Audit, NegatedSolutionFailsPositivity) {
  const DoubleWellRun& d = double_well_run();
  std::vector<SolveResult> results = d.run.results;
  results[0].u = -1.0 * results[0].u;
  const VerificationReport rep = audit(results, context_of(d));
  EXPECT_FALSE(rep.positivity_ok);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.status(), 1);
}

TEST(Audit, DuplicateSolutionsAreNotDistinct) {
  const DoubleWellRun& d = double_well_run();
  std::vector<SolveResult> results{d.run.results[0], d.run.results[0]};
  results[1].well_index = 1;
  const VerificationReport rep = audit(results, context_of(d));
  EXPECT_FALSE(rep.distinct_ok);
  // The copy also sits in the wrong ball.
  EXPECT_FALSE(rep.localization_ok);
  EXPECT_FALSE(rep.passed());
}

TEST(Audit, OffNehariIsCaught) {
  const DoubleWellRun& d = double_well_run();
  std::vector<SolveResult> results = d.run.results;
  results[1].u = 1.01 * results[1].u;
  const VerificationReport rep = audit(results, context_of(d));
  EXPECT_FALSE(rep.nehari_ok);
  EXPECT_FALSE(rep.wells[1].nehari_ok);
  EXPECT_TRUE(rep.wells[0].nehari_ok);
}

TEST(Audit, SeparationThreshold) {
  const DoubleWellRun& d = double_well_run();
  AuditContext ctx = context_of(d);
  ctx.gamma = 1e-6;  // no solution at eps = 0.4 is this close to c0
  const VerificationReport rep = audit(d.run.results, ctx);
  EXPECT_FALSE(rep.separation_ok);
  EXPECT_TRUE(rep.nehari_ok);
}

TEST(Audit, BoundaryHitFailsLocalization) {
  const DoubleWellRun& d = double_well_run();
  std::vector<SolveResult> results = d.run.results;
  results[0].status = SolveStatus::BoundaryHit;
  const VerificationReport rep = audit(results, context_of(d));
  EXPECT_FALSE(rep.all_converged);
  EXPECT_FALSE(rep.localization_ok);
  EXPECT_EQ(rep.status(), 1);
}

TEST(Audit, SeedFailureHasNoField) {
  const DoubleWellRun& d = double_well_run();
  std::vector<SolveResult> results = d.run.results;
  results[1] = SolveResult{};
  results[1].well_index = 1;
  results[1].status = SolveStatus::SeedFailed;
  const VerificationReport rep = audit(results, context_of(d));
  EXPECT_FALSE(rep.all_converged);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.wells.size(), 2u);
}

TEST(Audit, GapFailure) {
  const DoubleWellRun& d = double_well_run();
  AuditContext ctx = context_of(d);
  std::swap(ctx.c0, ctx.c_inf);
  EXPECT_FALSE(audit(d.run.results, ctx).gap_ok);
}

}  // namespace
}  // namespace lse
