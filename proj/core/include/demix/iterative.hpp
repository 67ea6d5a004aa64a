#pragma once

#include "demix/rng.hpp"
#include "demix/types.hpp"

#include <functional>

namespace demix {

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

using LinearMap = std::function<Vector(const Vector&)>;

/// Conjugate gradients for a Hermitian positive semidefinite map. x holds the
/// warm start on entry and the solution on exit. Convergence is
/// |b - A x| <= rel_tol * |b|; stagnation (no residual progress over 50
/// iterations) stops early with converged = false.
CgResult cg_solve(const LinearMap& apply, const Vector& b, Vector& x, double rel_tol,
                  int max_iters);

struct PowerResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of a Hermitian PSD map by power iteration with random
/// restarts; returns the best estimate across restarts. A restart counts as
/// converged when both the eigenvalue increment and the residual
/// |A v - lambda v| fall below tol * max(lambda, 1e-300).
PowerResult power_iteration(const LinearMap& apply, Index dim, Rng& rng, double tol,
                            int max_iters, int restarts);

}  // namespace demix
