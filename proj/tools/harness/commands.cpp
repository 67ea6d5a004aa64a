#include "harness/commands.hpp"

#include "demix/certificate.hpp"
#include "demix/oracle.hpp"
#include "demix/rng.hpp"
#include "demix/tuple_ops.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace demix::harness {

namespace {

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

MatrixTuple certify_reference(const ProblemInstance& inst) {
  if (inst.planted) return *inst.planted;
  // no planted signal: unit columns on the declared support, seeded from the
  // instance so the report is reproducible
  Rng rng(derive_seed(inst.sketch_seed, 105, 0));
  MatrixTuple z = MatrixTuple::zero(inst.profile);
  for (int i = 0; i < z.components(); ++i)
    for (Index j : inst.support->set(i)) {
      for (Index t = 0; t < z.block(i).rows(); ++t) z.block(i)(t, j) = rng.complex_normal();
      z.block(i).col(j).normalize();
    }
  return z;
}

}  // namespace

ExperimentConfig load_config(const GlobalArgs& args) {
  if (args.config_path.empty()) throw ConfigError("--config", "a config file is required");
  Json j;
  try {
    j = load_json_file(args.config_path);
  } catch (const Json::exception& ex) {
    throw ConfigError(args.config_path, ex.what());
  }
  ExperimentConfig c = config_from_json(j);
  if (!args.out_dir.empty()) c.out_dir = args.out_dir;
  if (args.seed_set) c.seed = args.seed;
  if (args.threads > 0) c.threads = args.threads;
  c.validate();
  return c;
}

int cmd_gen(const GlobalArgs& args) {
  const ExperimentConfig config = load_config(args);
  for (size_t ci = 0; ci < config.q_grid.size(); ++ci) {
    for (int t = 0; t < config.trials; ++t) {
      ProblemInstance inst =
          generate_instance(config, config.q_grid[ci], ci, static_cast<std::uint64_t>(t));
      char name[64];
      std::snprintf(name, sizeof(name), "instance_q%04lld_t%03d.json",
                    static_cast<long long>(config.q_grid[ci]), t);
      const std::string path = out_path(config.out_dir, name);
      save_json_file(path, instance_to_json(inst));
      std::cout << path << '\n';
    }
  }
  return kExitOk;
}

int cmd_solve(const GlobalArgs& args, const std::string& instance_path, const std::string& method,
              double sigma, bool sigma_set, const SolveOptions& opts, bool /*opts_set*/) {
  ProblemInstance inst = instance_from_json(load_json_file(instance_path));
  const MeasurementEnsemble e = inst.ensemble();
  Vector y;
  if (inst.measurements) {
    y = *inst.measurements;
  } else if (inst.planted) {
    y = forward(e, *inst.planted);
    if (inst.noise) y += *inst.noise;
  } else {
    throw ConfigError(instance_path, "instance has neither measurements nor a planted signal");
  }
  const double effective_sigma = sigma_set ? sigma : inst.sigma;

  SolveReport report = run_method(e, y, method, effective_sigma, opts);
  Json j = solve_report_to_json(report);
  j["method"] = method;
  j["sigma"] = effective_sigma;
  if (inst.planted) {
    MatrixTuple diff = report.solution;
    diff -= *inst.planted;
    j["relative_error"] = norm_frobenius(diff) / std::max(norm_frobenius(*inst.planted), 1e-300);
  }
  const double feas_tol = opts.abs_tol * (1.0 + y.norm());
  const bool infeasible = report.feasibility_gap > feas_tol;
  j["status"] = report.converged ? "ok" : (infeasible ? "infeasible" : "diverged");
  const std::string dir = args.out_dir.empty() ? "." : args.out_dir;
  const std::string path = out_path(dir, "solve_report.json");
  save_json_file(path, j);
  std::cout << path << '\n';
  return report.converged ? kExitOk : kExitDiverged;
}

int cmd_certify(const GlobalArgs& args, const std::string& instance_path) {
  ProblemInstance inst = instance_from_json(load_json_file(instance_path));
  if (!inst.support) throw ConfigError(instance_path, "instance has no declared support");
  const MeasurementEnsemble e = inst.ensemble();
  const CertificateReport report = certificate_params(e, *inst.support, certify_reference(inst));

  BudgetQuery bq;
  bq.profile = inst.profile;
  for (int i = 0; i < inst.support->components(); ++i)
    bq.sparsity.push_back(inst.support->sparsity(i));
  bq.mu_minus = e.frames().mu_minus();
  bq.mu_plus = e.frames().mu_plus();
  Json j = certificate_to_json(report);
  j["budget_q"] = inst.support->total_sparsity() > 0 ? measurement_budget(bq) : 0;
  j["q"] = inst.q;

  const std::string dir = args.out_dir.empty() ? "." : args.out_dir;
  const std::string path = out_path(dir, "certificate.json");
  save_json_file(path, j);
  std::cout << path << '\n';
  return kExitOk;
}

int cmd_phase(const GlobalArgs& args) {
  const ExperimentConfig config = load_config(args);
  const std::string path = out_path(config.out_dir, "phase.csv");
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot open '" + path + "' for writing");
  csv << phase_csv_header() << '\n';
  csv.flush();
  run_phase(config, [&csv](const CellResult& row) {
    // flush row by row so interrupted sweeps keep their partial results
    csv << phase_csv_row(row) << '\n';
    csv.flush();
    std::cerr << "q=" << row.q << " method=" << row.method << " success=" << row.successes << "/"
              << row.trials << '\n';
  });
  if (!csv) throw std::runtime_error("write failed for '" + path + "'");
  std::cout << path << '\n';
  return kExitOk;
}

int cmd_moments(const GlobalArgs& args) {
  const ExperimentConfig config = load_config(args);
  MomentReport report =
      mc_gauss_moments(config.sparsity, config.convention, config.moment_samples, config.seed);
  const std::string path = out_path(config.out_dir, "moments.json");
  save_json_file(path, moment_report_to_json(report));
  std::cout << path << '\n';
  return kExitOk;
}

int cmd_deconv_demo(const GlobalArgs& args) {
  const ExperimentConfig config = load_config(args);
  DeconvolutionInstance instance =
      make_deconvolution_instance(config.profile, config.q_grid.front(), config.sparsity,
                                  config.convention, config.frame_kind, config.seed);
  DeconvDemoReport report = run_deconv_demo(instance, config.solver);
  const std::string path = out_path(config.out_dir, "deconv_demo.json");
  save_json_file(path, deconv_report_to_json(report));
  std::cout << path << '\n';
  return report.solve.converged ? kExitOk : kExitDiverged;
}

}  // namespace demix::harness
