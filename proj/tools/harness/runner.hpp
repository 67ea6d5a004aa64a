#pragma once

#include "harness/config.hpp"

#include "demix/certificate.hpp"
#include "demix/deconv.hpp"
#include "demix/io.hpp"
#include "demix/solvers.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace demix::harness {

inline constexpr const char* kPhaseSchemaId = "demix-phase-v1";

/// One (q, method) cell of a sweep. Certificate means are taken over the
/// trials where the scalar is defined (delta >= 1 leaves most undefined).
struct CellResult {
  Index q = 0;
  std::string method;
  int trials = 0;
  int successes = 0;
  double mean_rel_err = 0.0;
  double mean_iters = 0.0;
  double mean_delta = 0.0;
  double mean_beta = 0.0;
  double mean_theta = 0.0;
  double mean_rho = 0.0;
  double wall_ms = 0.0;
};

/// Deterministic instance for (cell, trial) under the config's master seed.
ProblemInstance generate_instance(const ExperimentConfig& config, Index q, std::uint64_t cell,
                                  std::uint64_t trial);

struct TrialOutcome {
  CertificateReport certificate;
  struct PerMethod {
    double rel_err = 0.0;
    int iterations = 0;
    bool success = false;
    bool converged = false;
  };
  std::vector<PerMethod> methods;
};

SolveReport run_method(const MeasurementEnsemble& e, const Vector& y, const std::string& method,
                       double sigma, const SolveOptions& opts);

/// Runs trials of one cell concurrently (config.threads); results are
/// gathered in trial order, so the outcome is thread-count independent.
std::vector<TrialOutcome> run_cell(const ExperimentConfig& config, Index q, std::uint64_t cell);

std::vector<CellResult> run_phase(const ExperimentConfig& config,
                                  const std::function<void(const CellResult&)>& on_row = {});

std::string phase_csv_header();
std::string phase_csv_row(const CellResult& r);

struct DeconvDemoReport {
  bool rank_one_ok = true;
  double resynthesis_error = 0.0;         // |v_rec - v| / |v|
  std::vector<double> component_errors;   // per-pair demixing error
  std::vector<double> filter_errors;      // up to the scalar ambiguity
  std::vector<double> signal_errors;
  SolveReport solve;
};

/// Lift, solve P_{1,2}, split each recovered block into its leading singular
/// pair (normalized filter, phase-fixed) and re-synthesize the observation.
DeconvDemoReport run_deconv_demo(const DeconvolutionInstance& instance, const SolveOptions& opts);

Json deconv_report_to_json(const DeconvDemoReport& r);

}  // namespace demix::harness
