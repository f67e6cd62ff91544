// Command-line front end: lse solve | verify | sweep.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lse/commands.hpp"

namespace {

int load_and_run(const std::string& path, const std::function<int(const lse::RunConfig&)>& body) {
  lse::RunConfig cfg;
  try {
    cfg = lse::load_run_config(path);
  } catch (const lse::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lse::kExitUsage;
  }
  return body(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple positive solutions of the logarithmic Schrodinger equation"};
  app.require_subcommand(1);

  lse::CommandOptions opt;
  std::string config_path;
  std::uint64_t seed = 0;
  std::vector<double> eps_list;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config_path, "run configuration (JSON)");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--jobs", opt.jobs, "wells solved concurrently")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out_dir, "output directory (overrides outputs.dir)");
    sub->add_option("--seed", seed, "probe seed (overrides rng_seed)");
    sub->add_flag("--verbose", opt.verbose, "print per-check margins and potential warnings");
  };

  CLI::App* solve = app.add_subcommand("solve", "compute one localized solution per well and audit them");
  add_common(solve, true);
  CLI::App* verify = app.add_subcommand("verify", "run the identity and oracle property suite");
  add_common(verify, false);
  CLI::App* sweep = app.add_subcommand("sweep", "repeat the solve over a decreasing list of eps");
  add_common(sweep, true);
  sweep->add_option("--eps", eps_list, "eps values, strictly decreasing (overrides sweep.eps)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? lse::kExitOk : lse::kExitUsage;
  }

  for (CLI::App* sub : {solve, verify, sweep}) {
    if (sub->count("--seed") > 0) opt.seed = seed;
  }

  if (*solve) {
    return load_and_run(config_path, [&](const lse::RunConfig& cfg) { return lse::cmd_solve(cfg, opt, std::cout); });
  }
  if (*verify) {
    lse::SuiteOptions suite;
    if (opt.seed) suite.seed = *opt.seed;
    return lse::cmd_verify(suite, opt.verbose, std::cout);
  }
  return load_and_run(config_path, [&](const lse::RunConfig& cfg) {
    if (sweep->count("--eps") > 0 && eps_list.empty()) {
      std::cerr << "error: --eps needs at least one value\n";
      return lse::kExitUsage;
    }
    return lse::cmd_sweep(cfg, eps_list, opt, std::cout);
  });
}
