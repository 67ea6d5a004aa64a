#include "demix/tuple_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace demix {

namespace {

void require_finite(const MatrixTuple& x, const char* who) {
  if (!x.all_finite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

void require_same_profile(const MatrixTuple& a, const MatrixTuple& b, const char* who) {
  if (!a.same_profile(b)) throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

}  // namespace

Complex inner(const MatrixTuple& x, const MatrixTuple& y) {
  require_same_profile(x, y, "inner");
  Complex acc(0, 0);
  for (int i = 0; i < x.components(); ++i)
    acc += (x.block(i).conjugate().cwiseProduct(y.block(i))).sum();
  return acc;
}

double norm_frobenius(const MatrixTuple& x) {
  double acc = 0;
  for (const auto& b : x.blocks()) acc += b.squaredNorm();
  return std::sqrt(acc);
}

double norm_l12(const MatrixTuple& x) {
  require_finite(x, "norm_l12");
  double acc = 0;
  for (const auto& b : x.blocks()) acc += b.colwise().norm().sum();
  return acc;
}

double norm_linf2(const MatrixTuple& x) {
  require_finite(x, "norm_linf2");
  double m = 0;
  for (const auto& b : x.blocks()) m = std::max(m, b.colwise().norm().maxCoeff());
  return m;
}

MatrixTuple project_support(const MatrixTuple& x, const SupportPattern& s) {
  if (!s.matches(x.profile())) throw std::invalid_argument("project_support: shape mismatch");
  MatrixTuple out = MatrixTuple::zero(x.profile());
  for (int i = 0; i < x.components(); ++i)
    for (Index j : s.set(i)) out.block(i).col(j) = x.block(i).col(j);
  return out;
}

MatrixTuple normalize_columns(const MatrixTuple& x) {
  MatrixTuple out = x;
  for (int i = 0; i < out.components(); ++i) {
    Matrix& b = out.block(i);
    for (Index j = 0; j < b.cols(); ++j) {
      const double n = b.col(j).norm();
      if (n > 0) {
        b.col(j) /= n;
      } else {
        b.col(j).setZero();
      }
    }
  }
  return out;
}

MatrixTuple block_soft_threshold(const MatrixTuple& x, double lam) {
  if (!(lam > 0)) throw std::invalid_argument("block_soft_threshold: lam must be positive");
  MatrixTuple out = MatrixTuple::zero(x.profile());
  for (int i = 0; i < x.components(); ++i) {
    const Matrix& b = x.block(i);
    Matrix& o = out.block(i);
    for (Index j = 0; j < b.cols(); ++j) {
      const double n = b.col(j).norm();
      if (n > lam) o.col(j) = b.col(j) * (1.0 - lam / n);
    }
  }
  return out;
}

bool subdiff_check(const MatrixTuple& z, const MatrixTuple& v, double tol) {
  require_same_profile(z, v, "subdiff_check");
  if (tol < 0) throw std::invalid_argument("subdiff_check: tol must be >= 0");
  for (int i = 0; i < z.components(); ++i) {
    const Matrix& zb = z.block(i);
    const Matrix& vb = v.block(i);
    for (Index j = 0; j < zb.cols(); ++j) {
      const double n = zb.col(j).norm();
      if (n > 0) {
        if ((vb.col(j) - zb.col(j) / n).norm() > tol) return false;
      } else {
        if (vb.col(j).norm() > 1.0 + tol) return false;
      }
    }
  }
  return true;
}

}  // namespace demix
