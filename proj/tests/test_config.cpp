#include <gtest/gtest.h>

#include <string>

#include "lse/config.hpp"

namespace lse {
namespace {

using nlohmann::json;

const std::string kDir = LSE_CONFIG_DIR;

json minimal() {
  return json::parse(R"({
    "problem": {"dim": 1, "eps": 0.1, "potential": {"wells": [[0.0], [2.0]], "v_inf": 2.0, "width": 0.25}},
    "numerics": {"h": 0.05, "R_schedule": [30, 60]}
  })");
}

// Returns the InvalidConfig message, or "" when parsing succeeds.
std::string error_of(const json& j) {
  try {
    parse_run_config(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    return e.what();
  }
  return "";
}

bool mentions(const std::string& msg, const std::string& needle) { return msg.find(needle) != std::string::npos; }

TEST(Config, MinimalDefaults) {
  const RunConfig c = parse_run_config(minimal());
  EXPECT_EQ(c.problem.dim, 1);
  EXPECT_EQ(c.problem.params.eps, 0.1);
  EXPECT_EQ(c.problem.params.delta, kDefaultDelta);
  EXPECT_EQ(c.problem.params.p, 3.0);
  EXPECT_EQ(c.problem.ground_radius, 10.0);
  ASSERT_EQ(c.problem.params.potential->count(), 2u);
  EXPECT_EQ(c.problem.params.potential->wells()[1], (Point{2.0, 0.0}));
  EXPECT_EQ(c.solver.R_schedule, (std::vector<double>{30.0, 60.0}));
  EXPECT_FALSE(c.solver.gamma.has_value());
  EXPECT_EQ(c.solver.probe_seed, c.rng_seed);
  EXPECT_TRUE(c.sweep_eps.empty());
  EXPECT_EQ(c.outputs.dir, "out");
}

TEST(Config, BareNumbersAsOneDimensionalWells) {
  json j = minimal();
  j["problem"]["potential"]["wells"] = {0.0, 2.0};
  EXPECT_EQ(parse_run_config(j).problem.params.potential->wells()[1], (Point{2.0, 0.0}));
}

TEST(Config, DeltaErrorCitesTheCap) {
  json j = minimal();
  j["numerics"]["delta"] = 0.5;
  const std::string msg = error_of(j);
  EXPECT_TRUE(mentions(msg, "numerics.delta")) << msg;
  EXPECT_TRUE(mentions(msg, "e^{-3/2}")) << msg;
  EXPECT_TRUE(mentions(msg, "0.5")) << msg;
  j["numerics"]["delta"] = kDeltaCap;
  EXPECT_EQ(error_of(j), "");
}

TEST(Config, FieldPreciseErrors) {
  struct Case {
    std::string pointer;
    json value;
    std::string field;
  };
  const std::vector<Case> cases{
      {"/problem/eps", -1.0, "problem.eps"},
      {"/problem/dim", 3, "problem.dim"},
      {"/problem/eps", "x", "problem.eps"},
      {"/numerics/h", 0.07, "numerics.h"},
      {"/numerics/R_schedule", json::array({60, 30}), "numerics.R_schedule[1]"},
      {"/numerics/p", 2.0, "numerics.p"},
      {"/problem/potential/v_inf", 0.5, "problem.potential"},
      {"/problem/potential/wells", json::array({json::array({0.0, 1.0})}), "problem.potential.wells[0]"},
      {"/solver/rho0", 1.5, "solver.rho0"},
      {"/solver/R0", 40.0, "numerics.R_schedule[0]"},
      {"/solver/backtrack", 1.0, "solver.backtrack"},
      {"/solver/gamma", -1.0, "solver.gamma"},
      {"/sweep/eps", json::array({0.1, -0.2}), "sweep.eps[1]"},
      {"/rng_seed", -3, "rng_seed"},
      {"/schema_version", 2, "schema_version"},
  };
  for (const Case& c : cases) {
    json j = minimal();
    j[json::json_pointer(c.pointer)] = c.value;
    const std::string msg = error_of(j);
    EXPECT_TRUE(mentions(msg, "'" + c.field + "'")) << c.pointer << " -> " << msg;
  }
}

TEST(Config, UnknownKeysAreRejected) {
  for (const std::string pointer : {"/extra", "/problem/extra", "/numerics/R", "/solver/tolerance", "/outputs/x"}) {
    json j = minimal();
    j[json::json_pointer(pointer)] = 1;
    std::string field = pointer.substr(1);
    for (char& ch : field) {
      if (ch == '/') ch = '.';
    }
    const std::string msg = error_of(j);
    EXPECT_TRUE(mentions(msg, "'" + field + "'")) << msg;
    EXPECT_TRUE(mentions(msg, "unknown key")) << msg;
  }
}

TEST(Config, MissingSections) {
  json j = minimal();
  j.erase("numerics");
  EXPECT_TRUE(mentions(error_of(j), "'numerics'"));
  j = minimal();
  j["problem"].erase("eps");
  EXPECT_TRUE(mentions(error_of(j), "problem.eps"));
}

TEST(Config, ParseErrorReportsLine) {
  try {
    parse_run_config(std::string("{\n  \"problem\": {\n    \"eps\": 0.1,,\n  }\n}\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    EXPECT_TRUE(mentions(e.what(), "line 3")) << e.what();
  }
}

TEST(Config, MissingFile) {
  try {
    load_run_config(kDir + "/does_not_exist.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

TEST(Config, ShippedConfigsLoad) {
  const RunConfig dw = load_run_config(kDir + "/double_well.json");
  EXPECT_EQ(dw.problem.params.eps, 0.1);
  EXPECT_EQ(dw.solver.grad_tol, 1e-10);
  EXPECT_EQ(dw.sweep_eps, (std::vector<double>{0.4, 0.2, 0.1}));
  EXPECT_EQ(dw.outputs.dir, "out/double_well");
  EXPECT_EQ(load_run_config(kDir + "/double_well_eps5.json").problem.params.eps, 5.0);
  EXPECT_NO_THROW(load_run_config(kDir + "/single_well.json"));
  try {
    load_run_config(kDir + "/bad_delta.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(mentions(e.what(), "numerics.delta"));
  }
}

}  // namespace
}  // namespace lse
