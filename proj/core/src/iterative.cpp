#include "demix/iterative.hpp"

#include <cmath>

namespace demix {

CgResult cg_solve(const LinearMap& apply, const Vector& b, Vector& x, double rel_tol,
                  int max_iters) {
  CgResult res;
  const double nb = b.norm();
  if (nb == 0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  if (x.size() != b.size()) x = Vector::Zero(b.size());
  Vector r = b - apply(x);
  Vector p = r;
  double rs = r.squaredNorm();
  const double target = rel_tol * nb;
  double best = std::sqrt(rs);
  int since_progress = 0;
  for (int it = 0; it < max_iters; ++it) {
    if (std::sqrt(rs) <= target) {
      res.converged = true;
      break;
    }
    Vector ap = apply(p);
    const double p_ap = p.dot(ap).real();
    if (!(p_ap > 0)) break;  // lost positivity, stop with what we have
    const double alpha = rs / p_ap;
    x += alpha * p;
    r -= alpha * ap;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
    ++res.iterations;
    const double rn = std::sqrt(rs);
    if (rn < 0.999 * best) {
      best = rn;
      since_progress = 0;
    } else if (++since_progress >= 50) {
      break;  // stagnation
    }
  }
  if (std::sqrt(rs) <= target) res.converged = true;
  res.relative_residual = std::sqrt(rs) / nb;
  return res;
}

PowerResult power_iteration(const LinearMap& apply, Index dim, Rng& rng, double tol,
                            int max_iters, int restarts) {
  PowerResult best;
  if (dim == 0) {
    best.converged = true;
    return best;
  }
  for (int attempt = 0; attempt < restarts; ++attempt) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
    v.normalize();
    double lambda = 0;
    bool ok = false;
    int used = 0;
    for (int it = 0; it < max_iters; ++it) {
      Vector av = apply(v);
      const double next = v.dot(av).real();
      const double resid = (av - next * v).norm();
      const double nav = av.norm();
      ++used;
      if (nav == 0) {  // v in the kernel: eigenvalue 0 for this start
        lambda = 0;
        ok = true;
        break;
      }
      v = av / nav;
      const double scale = std::max(std::abs(next), 1e-300);
      if (std::abs(next - lambda) <= tol * scale && resid <= tol * scale) {
        lambda = next;
        ok = true;
        break;
      }
      lambda = next;
    }
    best.iterations += used;
    if (ok) {
      best.converged = true;
      best.value = std::max(best.value, lambda);
    } else {
      best.value = std::max(best.value, lambda);
    }
  }
  return best;
}

}  // namespace demix
