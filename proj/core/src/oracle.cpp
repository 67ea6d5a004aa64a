#include "demix/oracle.hpp"

#include "demix/rng.hpp"
#include "demix/tuple_ops.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace demix {

namespace {

// Columns of the dense measurement matrix belonging to one support pattern.
Matrix dense_columns(const Matrix& dense, const MeasurementEnsemble& e,
                     const SupportPattern& s) {
  Matrix out(dense.rows(), s.subspace_dim());
  Index off = 0;
  Index block_off = 0;
  for (int i = 0; i < e.components(); ++i) {
    const Index k = e.frames().k(i);
    for (Index j : s.set(i)) {
      out.middleCols(off, k) = dense.middleCols(block_off + j * k, k);
      off += k;
    }
    block_off += k * e.sketch(i).cols();
  }
  return out;
}

}  // namespace

double dense_delta(const MeasurementEnsemble& e, const SupportPattern& s, Index column_cap) {
  if (!s.matches(e.profile())) throw std::invalid_argument("dense_delta: support mismatch");
  const Index d = s.subspace_dim();
  if (d == 0) return 0.0;
  const Matrix dense = materialize_dense(e, column_cap);
  const Matrix ms = dense_columns(dense, e, s);
  Eigen::JacobiSVD<Matrix> svd(ms);
  double worst = 0.0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    const double lam = svd.singularValues()(i) * svd.singularValues()(i);
    worst = std::max(worst, std::abs(lam - 1.0));
  }
  // Rank deficiency contributes eigenvalue 0 of the Gram.
  if (svd.singularValues().size() < d) worst = std::max(worst, 1.0);
  return worst;
}

double dense_beta(const MeasurementEnsemble& e, const SupportPattern& s, Index column_cap) {
  if (!s.matches(e.profile())) throw std::invalid_argument("dense_beta: support mismatch");
  if (s.is_full() || s.subspace_dim() == 0) return 0.0;
  const Matrix dense = materialize_dense(e, column_cap);
  const Matrix ms = dense_columns(dense, e, s);
  double beta = 0.0;
  Index block_off = 0;
  for (int i = 0; i < e.components(); ++i) {
    const Index k = e.frames().k(i);
    for (Index j = 0; j < e.sketch(i).cols(); ++j) {
      if (s.contains(i, j)) continue;
      const Matrix t = ms.adjoint() * dense.middleCols(block_off + j * k, k);
      Eigen::JacobiSVD<Matrix> svd(t);
      beta = std::max(beta, svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0);
    }
    block_off += k * e.sketch(i).cols();
  }
  return beta;
}

MomentReport mc_gauss_moments(const std::vector<Index>& sparsities, Convention convention,
                              long long samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("mc_gauss_moments: samples must be >= 1");
  const int r = static_cast<int>(sparsities.size());
  if (r < 1) throw std::invalid_argument("mc_gauss_moments: empty sparsity list");
  for (Index s : sparsities)
    if (s < 1) throw std::invalid_argument("mc_gauss_moments: sparsities must be >= 1");

  struct Acc {
    Matrix sum;
    Eigen::MatrixXd sumsq_re, sumsq_im;
  };
  std::vector<Acc> acc;
  acc.reserve(static_cast<size_t>(r * r * r));
  for (int kap = 0; kap < r; ++kap)
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < r; ++i) {
        const Index rows = sparsities[static_cast<size_t>(kap)];
        const Index cols = sparsities[static_cast<size_t>(i)];
        acc.push_back({Matrix::Zero(rows, cols), Eigen::MatrixXd::Zero(rows, cols),
                       Eigen::MatrixXd::Zero(rows, cols)});
      }

  // Fixed-size batches keep the reduction order independent of threading
  // plans and bound accumulator drift.
  const long long batch_size = 16384;
  std::vector<Vector> alpha(static_cast<size_t>(r));
  long long done = 0;
  std::uint64_t batch_index = 0;
  while (done < samples) {
    const long long todo = std::min(batch_size, samples - done);
    Rng rng(derive_seed(seed, batch_index++, 0));
    std::vector<Acc> local = acc;  // same shapes, reset below
    for (auto& a : local) {
      a.sum.setZero();
      a.sumsq_re.setZero();
      a.sumsq_im.setZero();
    }
    for (long long t = 0; t < todo; ++t) {
      for (int m = 0; m < r; ++m) {
        Vector& v = alpha[static_cast<size_t>(m)];
        v.resize(sparsities[static_cast<size_t>(m)]);
        for (Index c = 0; c < v.size(); ++c)
          v(c) = convention == Convention::ComplexCircular ? rng.complex_normal()
                                                           : Complex(rng.normal(), 0.0);
      }
      size_t idx = 0;
      for (int kap = 0; kap < r; ++kap)
        for (int j = 0; j < r; ++j)
          for (int i = 0; i < r; ++i, ++idx) {
            const double w = alpha[static_cast<size_t>(j)].squaredNorm();
            Matrix outer = w * alpha[static_cast<size_t>(kap)] *
                           alpha[static_cast<size_t>(i)].adjoint();
            local[idx].sum += outer;
            local[idx].sumsq_re += outer.real().cwiseAbs2();
            local[idx].sumsq_im += outer.imag().cwiseAbs2();
          }
    }
    for (size_t idx = 0; idx < acc.size(); ++idx) {
      acc[idx].sum += local[idx].sum;
      acc[idx].sumsq_re += local[idx].sumsq_re;
      acc[idx].sumsq_im += local[idx].sumsq_im;
    }
    done += todo;
  }

  MomentReport report;
  report.sparsity = sparsities;
  report.convention = convention;
  report.samples = samples;
  const double n = static_cast<double>(samples);
  size_t idx = 0;
  for (int kap = 0; kap < r; ++kap)
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < r; ++i, ++idx) {
        MomentCase c;
        c.kappa = kap;
        c.j = j;
        c.i = i;
        c.empirical = acc[idx].sum / n;
        const Index rows = c.empirical.rows();
        const Index cols = c.empirical.cols();
        c.predicted = Matrix::Zero(rows, cols);
        if (kap == i) {
          double diag;
          if (j == i) {
            diag = convention == Convention::Real
                       ? static_cast<double>(sparsities[static_cast<size_t>(i)]) + 2.0
                       : static_cast<double>(sparsities[static_cast<size_t>(i)]) + 1.0;
          } else {
            diag = static_cast<double>(sparsities[static_cast<size_t>(j)]);
          }
          c.predicted.diagonal().setConstant(diag);
        }
        c.max_abs_deviation = 0.0;
        c.max_se_units = 0.0;
        for (Index a = 0; a < rows; ++a)
          for (Index b = 0; b < cols; ++b) {
            const Complex mean = c.empirical(a, b);
            const double dev = std::abs(mean - c.predicted(a, b));
            c.max_abs_deviation = std::max(c.max_abs_deviation, dev);
            const double var_re =
                std::max(acc[idx].sumsq_re(a, b) / n - mean.real() * mean.real(), 0.0);
            const double var_im =
                std::max(acc[idx].sumsq_im(a, b) / n - mean.imag() * mean.imag(), 0.0);
            const double se = std::sqrt((var_re + var_im) / n);
            if (se > 0) {
              c.max_se_units = std::max(c.max_se_units, dev / se);
            } else if (dev > 0) {
              c.max_se_units = std::numeric_limits<double>::infinity();
            }
          }
        report.cases.push_back(std::move(c));
      }
  return report;
}

namespace {

// Largest column norm of the off-support part of A^* p, with the grouping of
// the packed off-support coordinates precomputed by the caller.
double max_off_column(const Vector& off_part, const std::vector<Index>& col_sizes) {
  double worst = 0.0;
  Index off = 0;
  for (Index sz : col_sizes) {
    worst = std::max(worst, off_part.segment(off, sz).norm());
    off += sz;
  }
  return worst;
}

}  // namespace

bool verify_optimality(const MeasurementEnsemble& e, const Vector& y, const MatrixTuple& x,
                       double tol) {
  if (!(x.profile() == e.profile())) throw std::invalid_argument("verify_optimality: shape mismatch");
  if (y.size() != e.q()) throw std::invalid_argument("verify_optimality: length mismatch");
  const double max_col = norm_linf2(x);

  std::vector<std::vector<Index>> sets(static_cast<size_t>(x.components()));
  for (int i = 0; i < x.components(); ++i)
    for (Index j = 0; j < x.block(i).cols(); ++j)
      if (x.block(i).col(j).norm() > tol * max_col) sets[static_cast<size_t>(i)].push_back(j);
  SupportPattern supp(e.profile(), std::move(sets));
  if (supp.subspace_dim() == 0) return true;  // x = 0, trivial certificate

  const Matrix dense = materialize_dense(e);
  const Matrix ds_adj = dense_columns(dense, e, supp).adjoint();  // d x q
  const MatrixTuple g = project_support(normalize_columns(x), supp);
  const Vector rhs = RestrictedOperator(e, supp).pack(g);

  Eigen::JacobiSVD<Matrix> svd(ds_adj, Eigen::ComputeThinU | Eigen::ComputeFullV);
  Vector p = svd.solve(rhs);
  if ((ds_adj * p - rhs).norm() > tol) return false;

  const SupportPattern comp = supp.complement();
  const Matrix d_off = dense_columns(dense, e, comp);
  std::vector<Index> col_sizes;
  for (int i = 0; i < e.components(); ++i)
    for (size_t c = 0; c < comp.set(i).size(); ++c) col_sizes.push_back(e.frames().k(i));
  Vector off_part = d_off.adjoint() * p;
  if (max_off_column(off_part, col_sizes) <= 1.0 + tol) return true;

  // The on-support fit rarely pins p down; search the solution family
  // p + N xi for a certificate, approximating the min-max column norm by
  // iteratively reweighted least squares.
  const double sv_tol = std::max(tol, 1e-12) * std::max(svd.singularValues()(0), 1.0);
  Index rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()(rank) > sv_tol) ++rank;
  const Index family = e.q() - rank;
  if (family == 0) return false;
  const Matrix n_basis = svd.matrixV().rightCols(family);
  const Matrix b = d_off.adjoint() * n_basis;  // off-part response to xi

  Eigen::VectorXd w = Eigen::VectorXd::Ones(off_part.size());
  Vector xi = Vector::Zero(family);
  double best = max_off_column(off_part, col_sizes);
  Vector best_off = off_part;
  for (int round = 0; round < 25; ++round) {
    Matrix bw = b;
    bw.array().colwise() *= w.array().sqrt().cast<Complex>().array();
    Vector cw = off_part;  // recompute from p0 each round
    cw = d_off.adjoint() * p;
    cw.array() *= w.array().sqrt().cast<Complex>().array();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(bw);
    xi = cod.solve(-cw);
    Vector trial = d_off.adjoint() * p + b * xi;
    const double m = max_off_column(trial, col_sizes);
    if (m < best) {
      best = m;
      best_off = trial;
    }
    if (best <= 1.0 + tol) return true;
    // raise the weights of the currently-largest columns (high-order norm)
    Index off = 0;
    Eigen::VectorXd col_norm(trial.size());
    for (Index sz : col_sizes) {
      const double cn = trial.segment(off, sz).norm();
      for (Index t = 0; t < sz; ++t) col_norm(off + t) = cn;
      off += sz;
    }
    const double scale = col_norm.maxCoeff() + 1e-30;
    w = ((col_norm.array() / scale).pow(6.0) + 1e-12).matrix();
  }
  return best <= 1.0 + tol;
}

MatrixTuple exhaustive_min_l12(const MeasurementEnsemble& e, const Vector& y, Index max_cols) {
  if (y.size() != e.q()) throw std::invalid_argument("exhaustive_min_l12: length mismatch");
  const Profile profile = e.profile();
  const int r = static_cast<int>(profile.size());

  // Count the enumeration before running it.
  auto choose = [](Index n, Index c) {
    double v = 1;
    for (Index t = 0; t < c; ++t) v = v * static_cast<double>(n - t) / static_cast<double>(t + 1);
    return v;
  };
  std::vector<double> count_by_total(static_cast<size_t>(max_cols) + 1, 0.0);
  count_by_total[0] = 1.0;
  for (int i = 0; i < r; ++i) {
    std::vector<double> next(count_by_total.size(), 0.0);
    for (size_t used = 0; used < count_by_total.size(); ++used) {
      if (count_by_total[used] == 0) continue;
      for (Index c = 0; c + static_cast<Index>(used) <= max_cols && c <= profile[static_cast<size_t>(i)].cols; ++c)
        next[used + static_cast<size_t>(c)] += count_by_total[used] * choose(profile[static_cast<size_t>(i)].cols, c);
    }
    count_by_total = std::move(next);
  }
  double total_patterns = 0;
  for (double v : count_by_total) total_patterns += v;
  if (total_patterns > 1e5)
    throw std::invalid_argument("exhaustive_min_l12: enumeration budget exceeded");

  const Matrix dense = materialize_dense(e);
  const double feas_tol = 1e-8 * (1.0 + y.norm());

  double best_norm = std::numeric_limits<double>::infinity();
  MatrixTuple best;
  bool found = false;

  std::vector<std::vector<Index>> sets(static_cast<size_t>(r));
  std::function<void(int, Index)> recurse = [&](int i, Index used) {
    if (i == r) {
      SupportPattern s(profile, sets);
      MatrixTuple candidate = MatrixTuple::zero(profile);
      double l12 = 0.0;
      if (s.subspace_dim() > 0) {
        const Matrix ds = dense_columns(dense, e, s);
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(ds);
        const Vector coef = cod.solve(y);
        if ((ds * coef - y).norm() > feas_tol) return;
        RestrictedOperator packer(e, s);
        candidate = packer.unpack(coef);
        l12 = norm_l12(candidate);
      } else if (y.norm() > feas_tol) {
        return;
      }
      if (l12 < best_norm) {
        best_norm = l12;
        best = std::move(candidate);
        found = true;
      }
      return;
    }
    const Index n = profile[static_cast<size_t>(i)].cols;
    std::function<void(Index, Index)> pick = [&](Index start, Index remaining) {
      recurse(i + 1, used + static_cast<Index>(sets[static_cast<size_t>(i)].size()));
      if (remaining == 0) return;
      for (Index j = start; j < n; ++j) {
        sets[static_cast<size_t>(i)].push_back(j);
        pick(j + 1, remaining - 1);
        sets[static_cast<size_t>(i)].pop_back();
      }
    };
    pick(0, max_cols - used);
    return;
  };
  recurse(0, 0);

  if (!found) throw std::runtime_error("exhaustive_min_l12: no feasible support found");
  return best;
}

std::string oracle_comparison_csv_header() { return "quantity,fast_value,oracle_value,abs_diff"; }

std::string oracle_comparison_csv_row(const OracleComparison& c) {
  std::ostringstream os;
  os.precision(17);
  os << c.quantity << ',' << c.fast_value << ',' << c.oracle_value << ','
     << std::abs(c.fast_value - c.oracle_value);
  return os.str();
}

}  // namespace demix
