#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ftl/errors.hpp"
#include "ftl/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Follow-the-leader particle approximation: runs, audits and convergence studies"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  double tol_scale = 1.0;
  bool seedless = false;
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--tol-scale", tol_scale, "multiply every diagnostic tolerance");
  app.add_flag("--seedless", seedless, "reserved; the pipeline uses no random numbers");

  auto* run = app.add_subcommand("run", "integrate, reconstruct and audit every n; write trajectories and fields");
  auto* diagnose = app.add_subcommand("diagnose", "integrate and audit every n; write reports only");
  auto* converge = app.add_subcommand("converge", "L1 error against the reference across the n sweep");
  auto* compare = app.add_subcommand("compare", "FTL, finite volumes and the exact solution on a common grid");
  for (auto* sub : {run, diagnose, converge, compare}) {
    sub->add_option("config", config_path, "key = value config file")->required();
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto config = ftl::load_config(config_path);
    ftl::CliOverrides overrides;
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    if (app.count("--tol-scale") > 0) overrides.tol_scale = tol_scale;
    overrides.seedless = seedless;
    ftl::apply_overrides(config, overrides);

    if (run->parsed()) return ftl::command_run(config, std::cout);
    if (diagnose->parsed()) return ftl::command_diagnose(config, std::cout);
    if (converge->parsed()) return ftl::command_converge(config, std::cout);
    return ftl::command_compare(config, std::cout);
  } catch (const ftl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "FAIL " << e.what() << "\n";
    return 1;
  }
}
