#pragma once

#include "demix/ensemble.hpp"
#include "demix/types.hpp"

#include <cstdint>

namespace demix {

struct SolveOptions {
  int max_iters = 5000;
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  double penalty = 1.0;          // ADMM splitting parameter rho
  double over_relaxation = 1.0;  // in [1, 1.9]

  void validate() const;  // throws std::invalid_argument
};

struct SolveReport {
  MatrixTuple solution;
  int iterations = 0;
  /// Residuals are scale-normalized, so converged implies
  /// max(primal_residual, dual_residual) <= rel_tol.
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;        // program norm of the returned solution
  double feasibility_gap = 0.0;  // |A x - y| (equality) or distance to the sigma-ball
  bool converged = false;
};

/// l2 noise budget together with a concrete noise vector, |nu|_2 <= sigma.
struct NoiseModel {
  double sigma = 0.0;
  Vector nu;

  /// Gaussian direction scaled to |nu| = sigma exactly.
  static NoiseModel scaled_gaussian(double sigma, Index dim, std::uint64_t seed);
  void validate() const;
};

/// min |X|_{1,2} subject to A(X) = y.
SolveReport solve_l12_eq(const MeasurementEnsemble& e, const Vector& y,
                         const SolveOptions& opts = {});

/// min |X|_{1,2} subject to |A(X) - y|_2 <= sigma.
SolveReport solve_l12_noisy(const MeasurementEnsemble& e, const Vector& y, double sigma,
                            const SolveOptions& opts = {});

/// Entrywise-l1 baselines.
SolveReport solve_l1_eq(const MeasurementEnsemble& e, const Vector& y,
                        const SolveOptions& opts = {});
SolveReport solve_l1_noisy(const MeasurementEnsemble& e, const Vector& y, double sigma,
                           const SolveOptions& opts = {});

/// Nuclear-norm baseline (sum of per-block nuclear norms).
SolveReport solve_nuclear_eq(const MeasurementEnsemble& e, const Vector& y,
                             const SolveOptions& opts = {});
SolveReport solve_nuclear_noisy(const MeasurementEnsemble& e, const Vector& y, double sigma,
                                const SolveOptions& opts = {});

/// Objectives of the three programs.
double norm_l1(const MatrixTuple& x);
double norm_nuclear(const MatrixTuple& x);

/// Proximal maps used by the baselines (block_soft_threshold lives with the
/// tuple operations).
MatrixTuple entrywise_soft_threshold(const MatrixTuple& x, double lam);
MatrixTuple singular_value_soft_threshold(const MatrixTuple& x, double lam);

}  // namespace demix
