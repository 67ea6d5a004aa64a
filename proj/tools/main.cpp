#include "harness/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace demix;
using namespace demix::harness;

int main(int argc, char** argv) {
  CLI::App app{"Sparse blind deconvolution and demixing via l1,2-minimization"};
  app.require_subcommand(1);

  GlobalArgs global;
  app.add_option("--config", global.config_path, "Experiment config (JSON)");
  app.add_option("--out", global.out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", global.seed, "Master seed (overrides config)");
  app.add_option("--threads", global.threads, "Worker threads (overrides config)");

  auto* gen = app.add_subcommand("gen", "Write seeded instance files");
  auto* solve = app.add_subcommand("solve", "Solve one instance file");
  auto* certify = app.add_subcommand("certify", "Certificate report for one instance file");
  auto* phase = app.add_subcommand("phase", "Phase-transition sweep (CSV)");
  auto* moments = app.add_subcommand("moments", "Monte-Carlo Gaussian moment check");
  auto* deconv = app.add_subcommand("deconv-demo", "End-to-end deconvolution demo");

  std::string instance_path;
  std::string method = "l12";
  double sigma = 0.0;
  SolveOptions opts;
  solve->add_option("--instance", instance_path, "Instance JSON file")->required();
  solve->add_option("--method", method, "l12 | l1 | nuclear")
      ->check(CLI::IsMember({"l12", "l1", "nuclear"}));
  auto* sigma_opt = solve->add_option("--sigma", sigma, "Noise budget (overrides instance)");
  solve->add_option("--max-iters", opts.max_iters, "Iteration budget");
  solve->add_option("--abs-tol", opts.abs_tol, "Absolute residual tolerance");
  solve->add_option("--rel-tol", opts.rel_tol, "Relative residual tolerance");
  solve->add_option("--penalty", opts.penalty, "Splitting parameter");
  solve->add_option("--over-relaxation", opts.over_relaxation, "Over-relaxation in [1, 1.9]");

  certify->add_option("--instance", instance_path, "Instance JSON file")->required();

  try {
    app.parse(argc, argv);
    global.seed_set = seed_opt->count() > 0;
    if (gen->parsed()) return cmd_gen(global);
    if (solve->parsed())
      return cmd_solve(global, instance_path, method, sigma, sigma_opt->count() > 0, opts, true);
    if (certify->parsed()) return cmd_certify(global, instance_path);
    if (phase->parsed()) return cmd_phase(global);
    if (moments->parsed()) return cmd_moments(global);
    if (deconv->parsed()) return cmd_deconv_demo(global);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
