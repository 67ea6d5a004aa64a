#include "demix/solvers.hpp"

#include "demix/rng.hpp"
#include "demix/tuple_ops.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace demix {

void SolveOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("SolveOptions: max_iters must be >= 1");
  if (!(abs_tol > 0) || !(rel_tol > 0))
    throw std::invalid_argument("SolveOptions: tolerances must be positive");
  if (!(penalty > 0)) throw std::invalid_argument("SolveOptions: penalty must be positive");
  if (over_relaxation < 1.0 || over_relaxation > 1.9)
    throw std::invalid_argument("SolveOptions: over_relaxation must be in [1, 1.9]");
}

NoiseModel NoiseModel::scaled_gaussian(double sigma, Index dim, std::uint64_t seed) {
  if (sigma < 0) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
  NoiseModel m;
  m.sigma = sigma;
  m.nu = Vector::Zero(dim);
  if (sigma > 0 && dim > 0) {
    Rng rng(seed);
    for (Index i = 0; i < dim; ++i) m.nu(i) = rng.complex_normal();
    m.nu *= sigma / m.nu.norm();
  }
  return m;
}

void NoiseModel::validate() const {
  if (sigma < 0 || nu.norm() > sigma * (1 + 1e-12) + 1e-300)
    throw std::invalid_argument("NoiseModel: |nu| exceeds sigma");
}

double norm_l1(const MatrixTuple& x) {
  double acc = 0;
  for (const auto& b : x.blocks()) acc += b.cwiseAbs().sum();
  return acc;
}

double norm_nuclear(const MatrixTuple& x) {
  double acc = 0;
  for (const auto& b : x.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(b);
    acc += svd.singularValues().sum();
  }
  return acc;
}

MatrixTuple entrywise_soft_threshold(const MatrixTuple& x, double lam) {
  if (!(lam > 0)) throw std::invalid_argument("entrywise_soft_threshold: lam must be positive");
  MatrixTuple out = MatrixTuple::zero(x.profile());
  for (int i = 0; i < x.components(); ++i) {
    const Matrix& b = x.block(i);
    out.block(i) = b.unaryExpr([lam](Complex c) {
      const double a = std::abs(c);
      return a > lam ? c * (1.0 - lam / a) : Complex(0, 0);
    });
  }
  return out;
}

MatrixTuple singular_value_soft_threshold(const MatrixTuple& x, double lam) {
  if (!(lam > 0)) throw std::invalid_argument("singular_value_soft_threshold: lam must be positive");
  MatrixTuple out = MatrixTuple::zero(x.profile());
  for (int i = 0; i < x.components(); ++i) {
    Eigen::JacobiSVD<Matrix> svd(x.block(i), Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = (svd.singularValues().array() - lam).max(0.0);
    out.block(i) = svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
  }
  return out;
}

namespace {

enum class Program { L12, L1, Nuclear };

MatrixTuple prox(Program p, const MatrixTuple& x, double lam) {
  switch (p) {
    case Program::L12: return block_soft_threshold(x, lam);
    case Program::L1: return entrywise_soft_threshold(x, lam);
    case Program::Nuclear: return singular_value_soft_threshold(x, lam);
  }
  throw std::logic_error("unreachable");
}

double objective(Program p, const MatrixTuple& x) {
  switch (p) {
    case Program::L12: return norm_l12(x);
    case Program::L1: return norm_l1(x);
    case Program::Nuclear: return norm_nuclear(x);
  }
  throw std::logic_error("unreachable");
}

// Project v onto {y} (sigma = 0) or the closed ball of radius sigma around y.
Vector constraint_project(const Vector& v, const Vector& y, double sigma) {
  if (sigma <= 0) return y;
  Vector d = v - y;
  const double n = d.norm();
  if (n <= sigma) return v;
  return y + d * (sigma / n);
}

// Conjugate gradients on matrix tuples for the regularized normal operator
// X + A^* A X = rhs.
struct TupleCg {
  int iterations = 0;
  bool converged = false;
};

TupleCg cg_regularized_normal(const MeasurementEnsemble& e, const MatrixTuple& rhs,
                              MatrixTuple& x, double rel_tol, int max_iters) {
  TupleCg res;
  const double nb = norm_frobenius(rhs);
  if (nb == 0) {
    x.set_zero();
    res.converged = true;
    return res;
  }
  auto apply = [&e](const MatrixTuple& v) {
    MatrixTuple out = adjoint(e, forward(e, v));
    out += v;
    return out;
  };
  MatrixTuple r = rhs;
  r -= apply(x);
  MatrixTuple p = r;
  double rs = inner(r, r).real();
  const double target = rel_tol * nb;
  for (int it = 0; it < max_iters; ++it) {
    if (std::sqrt(rs) <= target) break;
    MatrixTuple ap = apply(p);
    const double p_ap = inner(p, ap).real();
    if (!(p_ap > 0)) break;
    const double alpha = rs / p_ap;
    x += alpha * p;
    r -= alpha * ap;
    const double rs_new = inner(r, r).real();
    p *= Complex(rs_new / rs, 0);
    p += r;
    rs = rs_new;
    ++res.iterations;
  }
  res.converged = std::sqrt(rs) <= target;
  return res;
}

// Nudges x so that A x moves toward target: least-squares correction c from
// A^* A c = A^* (target - A x) by CG (always consistent, also when A has a
// nontrivial cokernel), applied only when it reduces the distance to target.
void least_norm_correction(const MeasurementEnsemble& e, MatrixTuple& x, const Vector& target,
                           double rel_tol) {
  const Vector d = target - forward(e, x);
  if (d.norm() <= rel_tol * std::max(1.0, target.norm())) return;
  auto normal = [&e](const MatrixTuple& v) { return adjoint(e, forward(e, v)); };
  const MatrixTuple rhs = adjoint(e, d);
  const double nb = norm_frobenius(rhs);
  if (nb == 0) return;

  MatrixTuple c = MatrixTuple::zero(x.profile());
  MatrixTuple r = rhs;
  MatrixTuple p = r;
  double rs = inner(r, r).real();
  const int max_iters = 4 * static_cast<int>(std::max(e.q(), profile_dim(x.profile()))) + 200;
  for (int it = 0; it < max_iters; ++it) {
    if (std::sqrt(rs) <= 1e-13 * nb) break;
    MatrixTuple ap = normal(p);
    const double p_ap = inner(p, ap).real();
    if (!(p_ap > 0)) break;
    const double alpha = rs / p_ap;
    c += alpha * p;
    r -= alpha * ap;
    const double rs_new = inner(r, r).real();
    p *= Complex(rs_new / rs, 0);
    p += r;
    rs = rs_new;
  }
  MatrixTuple candidate = x;
  candidate += c;
  if ((target - forward(e, candidate)).norm() < d.norm()) x = std::move(candidate);
}

SolveReport admm_solve(const MeasurementEnsemble& e, const Vector& y, double sigma, Program program,
                       const SolveOptions& opts) {
  opts.validate();
  if (y.size() != e.q()) throw std::invalid_argument("solve: measurement length mismatch");
  if (!y.allFinite()) throw std::invalid_argument("solve: non-finite measurements");
  if (sigma < 0) throw std::invalid_argument("solve: sigma must be >= 0");

  const Profile profile = e.profile();
  double rho = opts.penalty;
  const double alpha = opts.over_relaxation;
  const Index dim = profile_dim(profile);
  const Index q = e.q();
  const double sqrt_dim_p = std::sqrt(static_cast<double>(dim + q));
  const double sqrt_dim_d = std::sqrt(static_cast<double>(dim));

  MatrixTuple x = MatrixTuple::zero(profile);
  MatrixTuple z = MatrixTuple::zero(profile);
  MatrixTuple u1 = MatrixTuple::zero(profile);
  Vector w = Vector::Zero(q);
  Vector u2 = Vector::Zero(q);

  SolveReport report;
  double prev_rel = 1.0;

  for (int it = 1; it <= opts.max_iters; ++it) {
    // x-step: (I + A^*A) x = (z - u1) + A^*(w - u2), warm-started CG.
    MatrixTuple rhs = z;
    rhs -= u1;
    rhs += adjoint(e, w - u2);
    const double cg_tol = std::clamp(0.05 * prev_rel, 1e-12, 1e-3);
    cg_regularized_normal(e, rhs, x, cg_tol, 500 + static_cast<int>(q));

    Vector ax = forward(e, x);
    MatrixTuple xh = x;
    Vector axh = ax;
    if (alpha != 1.0) {
      xh *= alpha;
      xh += (1.0 - alpha) * z;
      axh = alpha * ax + (1.0 - alpha) * w;
    }

    MatrixTuple z_old = z;
    Vector w_old = w;
    MatrixTuple zin = xh;
    zin += u1;
    z = prox(program, zin, 1.0 / rho);
    w = constraint_project(axh + u2, y, sigma);
    u1 += xh;
    u1 -= z;
    u2 += axh - w;

    // Residuals on the unrelaxed iterates.
    MatrixTuple dxz = x;
    dxz -= z;
    const double r_norm = std::sqrt(std::pow(norm_frobenius(dxz), 2) + (ax - w).squaredNorm());
    MatrixTuple dz = z;
    dz -= z_old;
    dz += adjoint(e, w - w_old);
    const double s_norm = rho * norm_frobenius(dz);

    const double scale_p =
        std::max(std::sqrt(std::pow(norm_frobenius(x), 2) + ax.squaredNorm()),
                 std::sqrt(std::pow(norm_frobenius(z), 2) + w.squaredNorm()));
    MatrixTuple dual_combo = u1;
    dual_combo += adjoint(e, u2);
    const double scale_d = rho * norm_frobenius(dual_combo);

    report.iterations = it;
    report.primal_residual = r_norm / (sqrt_dim_p + scale_p);
    report.dual_residual = s_norm / (sqrt_dim_d + scale_d);
    prev_rel = std::max(report.primal_residual, report.dual_residual);

    const bool primal_ok = r_norm <= sqrt_dim_p * opts.abs_tol + opts.rel_tol * scale_p;
    const bool dual_ok = s_norm <= sqrt_dim_d * opts.abs_tol + opts.rel_tol * scale_d;
    if (primal_ok && dual_ok) {
      report.converged = true;
      break;
    }

    // Residual balancing: opts.penalty seeds rho, factor-2 updates keep the
    // two residuals within an order of magnitude (scaled duals rescale too).
    if (it % 25 == 0) {
      if (report.primal_residual > 10.0 * report.dual_residual &&
          rho < 1e6 * opts.penalty) {
        rho *= 2.0;
        u1 *= 0.5;
        u2 *= 0.5;
      } else if (report.dual_residual > 10.0 * report.primal_residual &&
                 rho > 1e-6 * opts.penalty) {
        rho *= 0.5;
        u1 *= 2.0;
        u2 *= 2.0;
      }
    }
  }

  // Return the prox-side iterate, moved onto the constraint set. The target
  // may be unreachable within range(A), so alternate projection and
  // correction a few times.
  MatrixTuple solution = z;
  for (int round = 0; round < 5; ++round) {
    Vector az = forward(e, solution);
    Vector target = constraint_project(az, y, sigma);
    if ((az - target).norm() <= 0.1 * opts.abs_tol * (1.0 + y.norm())) break;
    least_norm_correction(e, solution, target, 1e-13);
  }

  Vector final_ax = forward(e, solution);
  const double dist = (final_ax - y).norm();
  report.feasibility_gap = sigma > 0 ? std::max(0.0, dist - sigma) : dist;
  const double slack = sigma > 0 ? sigma : 0.0;
  if (dist > slack + opts.abs_tol * (1.0 + y.norm())) report.converged = false;
  report.objective = objective(program, solution);
  report.solution = std::move(solution);
  return report;
}

}  // namespace

SolveReport solve_l12_eq(const MeasurementEnsemble& e, const Vector& y, const SolveOptions& opts) {
  return admm_solve(e, y, 0.0, Program::L12, opts);
}

SolveReport solve_l12_noisy(const MeasurementEnsemble& e, const Vector& y, double sigma,
                            const SolveOptions& opts) {
  return admm_solve(e, y, sigma, Program::L12, opts);
}

SolveReport solve_l1_eq(const MeasurementEnsemble& e, const Vector& y, const SolveOptions& opts) {
  return admm_solve(e, y, 0.0, Program::L1, opts);
}

SolveReport solve_l1_noisy(const MeasurementEnsemble& e, const Vector& y, double sigma,
                           const SolveOptions& opts) {
  return admm_solve(e, y, sigma, Program::L1, opts);
}

SolveReport solve_nuclear_eq(const MeasurementEnsemble& e, const Vector& y,
                             const SolveOptions& opts) {
  return admm_solve(e, y, 0.0, Program::Nuclear, opts);
}

SolveReport solve_nuclear_noisy(const MeasurementEnsemble& e, const Vector& y, double sigma,
                                const SolveOptions& opts) {
  return admm_solve(e, y, sigma, Program::Nuclear, opts);
}

}  // namespace demix
