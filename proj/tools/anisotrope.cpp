#include "anisotrope/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  using namespace anisotrope;
  CLI::App app{"Verifies area, coarea and anisotropic geometry identities on JSON scenario suites."};
  app.require_subcommand(1);

  std::string config, out_dir, out_pos, filter, scenario, out_file;
  std::optional<std::uint64_t> seed;
  int parallel = 0;

  auto* run = app.add_subcommand("run", "run every scenario of a config and write reports");
  run->add_option("config", config, "scenario config (JSON)")->required();
  run->add_option("dir", out_pos, "report directory (same as --out)");
  run->add_option("--out", out_dir, "report directory");
  run->add_option("--seed", seed, "override every scenario seed");
  run->add_option("--parallel", parallel, "scenarios run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--filter", filter, "only scenarios whose name contains this");

  auto* curve = app.add_subcommand("curve", "write the tube or Minkowski table of one scenario as CSV");
  curve->add_option("config", config, "scenario config (JSON)")->required();
  curve->add_option("scenario", scenario, "scenario name")->required();
  curve->add_option("--out", out_file, "CSV file")->required();
  curve->add_option("--seed", seed, "override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run) {
    RunOptions opts;
    if (!out_dir.empty() && !out_pos.empty() && out_dir != out_pos) {
      std::cerr << "config error: two different report directories given\n";
      return kExitConfig;
    }
    opts.out_dir = out_dir.empty() ? out_pos : out_dir;
    opts.seed = seed;
    opts.filter = filter;
    opts.parallel = parallel;
    if (opts.parallel == 0) {
      const char* env = std::getenv("ANISOTROPE_WORKERS");
      opts.parallel = env ? std::max(1, std::atoi(env)) : 1;
    }
    return run_command(config, opts, std::cout);
  }
  return curve_command(config, scenario, out_file, seed, std::cout);
}
