#pragma once

#include "demix/types.hpp"

namespace demix {

/// Frobenius inner product sum_i trace(X_i^* Y_i), conjugate-linear in X.
Complex inner(const MatrixTuple& x, const MatrixTuple& y);

double norm_frobenius(const MatrixTuple& x);

/// Sum over all blocks and columns of the Euclidean column norms.
double norm_l12(const MatrixTuple& x);

/// Maximum Euclidean column norm over all blocks; the dual norm of norm_l12.
double norm_linf2(const MatrixTuple& x);

/// Keeps the columns indexed by the pattern, zeroes the rest. Idempotent and
/// self-adjoint for the Frobenius inner product.
MatrixTuple project_support(const MatrixTuple& x, const SupportPattern& s);

/// Scales every nonzero column to unit Euclidean norm; zero columns stay zero.
MatrixTuple normalize_columns(const MatrixTuple& x);

/// Proximal map of lam * norm_l12: each column c maps to
/// max(0, 1 - lam/|c|_2) * c.
MatrixTuple block_soft_threshold(const MatrixTuple& x, double lam);

/// Membership test for the subdifferential of norm_l12 at z: on nonzero
/// columns v must equal the normalized column (within tol, entrywise in the
/// column 2-norm sense); on zero columns |v(j)|_2 <= 1 + tol.
bool subdiff_check(const MatrixTuple& z, const MatrixTuple& v, double tol = 1e-8);

}  // namespace demix
