#include "harness/runner.hpp"

#include "demix/oracle.hpp"
#include "demix/rng.hpp"
#include "demix/tuple_ops.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/SVD>

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace demix::harness {

namespace {

SupportPattern draw_support(const Profile& profile, const std::vector<Index>& sparsity, Rng& rng) {
  std::vector<std::vector<Index>> sets(profile.size());
  for (size_t i = 0; i < profile.size(); ++i) {
    const Index n = profile[i].cols;
    std::vector<Index> pool(static_cast<size_t>(n));
    for (Index t = 0; t < n; ++t) pool[static_cast<size_t>(t)] = t;
    for (Index t = 0; t < sparsity[i]; ++t) {
      const auto pick = static_cast<size_t>(t) +
                        static_cast<size_t>(rng.below(static_cast<std::uint64_t>(n - t)));
      std::swap(pool[static_cast<size_t>(t)], pool[pick]);
      sets[i].push_back(pool[static_cast<size_t>(t)]);
    }
  }
  return SupportPattern(profile, std::move(sets));
}

MatrixTuple draw_signal(const Profile& profile, const SupportPattern& s, const std::string& kind,
                        Rng& rng) {
  MatrixTuple z = MatrixTuple::zero(profile);
  for (int i = 0; i < z.components(); ++i) {
    const Index k = profile[static_cast<size_t>(i)].rows;
    if (kind == "rank_one") {
      Vector f(k);
      for (Index t = 0; t < k; ++t) f(t) = rng.complex_normal();
      for (Index j : s.set(i)) z.block(i).col(j) = f * rng.complex_normal();
    } else {
      for (Index j : s.set(i))
        for (Index t = 0; t < k; ++t) z.block(i)(t, j) = rng.complex_normal();
    }
  }
  return z;
}

double finite_mean(const std::vector<double>& values) {
  double acc = 0.0;
  int n = 0;
  for (double v : values)
    if (std::isfinite(v)) {
      acc += v;
      ++n;
    }
  return n > 0 ? acc / n : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

ProblemInstance generate_instance(const ExperimentConfig& config, Index q, std::uint64_t cell,
                                  std::uint64_t trial) {
  const std::uint64_t trial_seed = derive_seed(config.seed, cell, trial);
  ProblemInstance inst;
  inst.profile = config.profile;
  inst.q = q;
  inst.frame_kind = config.frame_kind;
  inst.frame_seed = derive_seed(trial_seed, 101, 0);
  inst.sketch_seed = derive_seed(trial_seed, 102, 0);
  inst.convention = config.convention;

  Rng rng(derive_seed(trial_seed, 103, 0));
  inst.support = draw_support(config.profile, config.sparsity, rng);
  inst.planted = draw_signal(config.profile, *inst.support, config.signal, rng);

  const MeasurementEnsemble e = inst.ensemble();
  Vector y = forward(e, *inst.planted);
  double sigma = config.sigma;
  if (sigma == 0.0 && config.sigma_rel > 0.0) sigma = config.sigma_rel * y.norm();
  if (sigma > 0.0) {
    NoiseModel noise = NoiseModel::scaled_gaussian(sigma, q, derive_seed(trial_seed, 104, 0));
    inst.noise = noise.nu;
    y += noise.nu;
  }
  inst.sigma = sigma;
  inst.measurements = y;
  return inst;
}

SolveReport run_method(const MeasurementEnsemble& e, const Vector& y, const std::string& method,
                       double sigma, const SolveOptions& opts) {
  if (method == "l12") return sigma > 0 ? solve_l12_noisy(e, y, sigma, opts) : solve_l12_eq(e, y, opts);
  if (method == "l1") return sigma > 0 ? solve_l1_noisy(e, y, sigma, opts) : solve_l1_eq(e, y, opts);
  if (method == "nuclear")
    return sigma > 0 ? solve_nuclear_noisy(e, y, sigma, opts) : solve_nuclear_eq(e, y, opts);
  throw std::invalid_argument("unknown method '" + method + "'");
}

std::vector<TrialOutcome> run_cell(const ExperimentConfig& config, Index q, std::uint64_t cell) {
  std::vector<TrialOutcome> outcomes(static_cast<size_t>(config.trials));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= config.trials) return;
      ProblemInstance inst = generate_instance(config, q, cell, static_cast<std::uint64_t>(t));
      const MeasurementEnsemble e = inst.ensemble();
      TrialOutcome& out = outcomes[static_cast<size_t>(t)];
      out.certificate = certificate_params(e, *inst.support, *inst.planted);
      out.methods.resize(config.methods.size());
      for (size_t m = 0; m < config.methods.size(); ++m) {
        SolveReport r = run_method(e, *inst.measurements, config.methods[m], inst.sigma,
                                   config.solver);
        MatrixTuple diff = r.solution;
        diff -= *inst.planted;
        const double rel = norm_frobenius(diff) / std::max(norm_frobenius(*inst.planted), 1e-300);
        out.methods[m].rel_err = rel;
        out.methods[m].iterations = r.iterations;
        out.methods[m].converged = r.converged;
        out.methods[m].success = rel <= config.success_threshold;
      }
    }
  };
  const int nthreads = std::min(config.threads, config.trials);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return outcomes;
}

std::vector<CellResult> run_phase(const ExperimentConfig& config,
                                  const std::function<void(const CellResult&)>& on_row) {
  std::vector<CellResult> rows;
  for (size_t ci = 0; ci < config.q_grid.size(); ++ci) {
    const Index q = config.q_grid[ci];
    const auto start = std::chrono::steady_clock::now();
    std::vector<TrialOutcome> outcomes = run_cell(config, q, static_cast<std::uint64_t>(ci));
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    std::vector<double> deltas, betas, thetas, rhos;
    for (const auto& o : outcomes) {
      deltas.push_back(o.certificate.delta);
      betas.push_back(o.certificate.beta);
      thetas.push_back(o.certificate.theta);
      rhos.push_back(o.certificate.rho);
    }
    for (size_t m = 0; m < config.methods.size(); ++m) {
      CellResult row;
      row.q = q;
      row.method = config.methods[m];
      row.trials = config.trials;
      row.wall_ms = wall_ms;
      double err = 0.0, iters = 0.0;
      for (const auto& o : outcomes) {
        row.successes += o.methods[m].success ? 1 : 0;
        err += o.methods[m].rel_err;
        iters += o.methods[m].iterations;
      }
      row.mean_rel_err = err / config.trials;
      row.mean_iters = iters / config.trials;
      row.mean_delta = finite_mean(deltas);
      row.mean_beta = finite_mean(betas);
      row.mean_theta = finite_mean(thetas);
      row.mean_rho = finite_mean(rhos);
      rows.push_back(row);
      if (on_row) on_row(row);
    }
  }
  return rows;
}

std::string phase_csv_header() {
  return "schema_id,q,method,trials,successes,mean_rel_err,mean_iters,delta,beta,theta,rho,wall_ms";
}

std::string phase_csv_row(const CellResult& r) {
  std::ostringstream os;
  os.precision(12);
  os << kPhaseSchemaId << ',' << r.q << ',' << r.method << ',' << r.trials << ',' << r.successes
     << ',' << r.mean_rel_err << ',' << r.mean_iters << ',' << r.mean_delta << ',' << r.mean_beta
     << ',' << r.mean_theta << ',' << r.mean_rho << ',' << r.wall_ms;
  return os.str();
}

DeconvDemoReport run_deconv_demo(const DeconvolutionInstance& instance, const SolveOptions& opts) {
  const LiftedProblem lifted = lift_deconvolution(instance);
  DeconvDemoReport report;
  report.solve = solve_l12_eq(lifted.ensemble, lifted.observed_hat, opts);

  const int r = report.solve.solution.components();
  Vector vhat_rec = Vector::Zero(instance.q);
  for (int i = 0; i < r; ++i) {
    Eigen::JacobiSVD<Matrix> svd(report.solve.solution.block(i),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() > 1 && sv(1) > 1e-3 * sv(0)) report.rank_one_ok = false;

    // scalar ambiguity: |f| = 1 with the largest-magnitude entry positive real
    Vector f = svd.matrixU().col(0);
    Index peak = 0;
    f.cwiseAbs().maxCoeff(&peak);
    f *= std::polar(1.0, -std::arg(f(peak)));
    Matrix rank1 = sv(0) * svd.matrixU().col(0) * svd.matrixV().col(0).adjoint();
    Vector g = rank1.adjoint() * f;  // Z = f g^* and |f| = 1 give g = Z^* f

    // per-pair errors against the planted factors, scalars aligned
    const Vector& f_true = instance.filter_coeffs[static_cast<size_t>(i)];
    Vector g_true = instance.signal_coeffs[static_cast<size_t>(i)].conjugate();
    auto aligned_error = [](const Vector& got, const Vector& truth) {
      const Complex c = got.dot(truth) / got.squaredNorm();
      return (c * got - truth).norm() / truth.norm();
    };
    report.filter_errors.push_back(aligned_error(f, f_true));
    report.signal_errors.push_back(aligned_error(g, g_true));

    // contribution of this pair to the observation
    MatrixTuple single = MatrixTuple::zero(lifted.planted.profile());
    single.block(i) = rank1;
    Vector vhat_i = forward(lifted.ensemble, single);
    vhat_rec += vhat_i;
    const Vector true_conv = circular_convolve(instance.filters[static_cast<size_t>(i)],
                                               instance.signals[static_cast<size_t>(i)]);
    report.component_errors.push_back((idft_unitary(vhat_i) - true_conv).norm() /
                                      std::max(true_conv.norm(), 1e-300));
  }
  report.resynthesis_error =
      (idft_unitary(vhat_rec) - instance.observed).norm() / instance.observed.norm();
  return report;
}

Json deconv_report_to_json(const DeconvDemoReport& r) {
  Json j;
  j["rank_one_ok"] = r.rank_one_ok;
  j["resynthesis_error"] = r.resynthesis_error;
  j["component_errors"] = r.component_errors;
  j["filter_errors"] = r.filter_errors;
  j["signal_errors"] = r.signal_errors;
  j["solve"] = solve_report_to_json(r.solve);
  return j;
}

}  // namespace demix::harness
