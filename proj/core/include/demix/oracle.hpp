#pragma once

#include "demix/ensemble.hpp"
#include "demix/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace demix {

/// Reference values for delta and beta from dense SVDs of the materialized
/// operators. Subject to the materialization column cap.
double dense_delta(const MeasurementEnsemble& e, const SupportPattern& s,
                   Index column_cap = 20000);
double dense_beta(const MeasurementEnsemble& e, const SupportPattern& s,
                  Index column_cap = 20000);

/// Empirical E[alpha^kappa |alpha^j|^2 (alpha^i)^*] for one index triple,
/// with the closed-form prediction and deviation diagnostics.
struct MomentCase {
  int kappa = 0;
  int j = 0;
  int i = 0;
  Matrix empirical;   // s_kappa x s_i
  Matrix predicted;
  double max_abs_deviation = 0.0;
  /// Worst entry deviation measured in standard errors of that entry.
  double max_se_units = 0.0;
};

struct MomentReport {
  std::vector<Index> sparsity;
  Convention convention = Convention::Real;
  long long samples = 0;
  std::vector<MomentCase> cases;  // all r^3 triples, lexicographic (kappa, j, i)
};

/// Monte-Carlo check of the fourth-moment identities. Predictions:
/// real convention (s_i+2) I / s_j I / 0, complex-circular (s_i+1) I / s_j I / 0
/// for the cases i=j=kappa, i=kappa!=j, i!=kappa.
MomentReport mc_gauss_moments(const std::vector<Index>& sparsities, Convention convention,
                              long long samples, std::uint64_t seed);

/// Subdifferential (KKT) check for a candidate minimizer: least-squares dual
/// vector p with A^* p matching normalize_columns(x) on supp(x), then
/// on-support residual <= tol and off-support column norms <= 1 + tol.
/// Dense computation; supp(x) is the set of columns with norm above
/// tol * max column norm.
bool verify_optimality(const MeasurementEnsemble& e, const Vector& y, const MatrixTuple& x,
                       double tol = 1e-5);

/// Brute-force minimizer over all support patterns with at most max_cols
/// total columns: minimum-norm least squares per support, smallest l12 norm
/// among the feasible candidates. Restricted oracle: only valid on instances
/// whose true minimizer is support-sparse. Throws when the enumeration
/// exceeds 1e5 patterns.
MatrixTuple exhaustive_min_l12(const MeasurementEnsemble& e, const Vector& y, Index max_cols);

/// CSV log rows for fast-path vs oracle comparisons.
struct OracleComparison {
  std::string quantity;
  double fast_value = 0.0;
  double oracle_value = 0.0;
};

std::string oracle_comparison_csv_header();
std::string oracle_comparison_csv_row(const OracleComparison& c);

}  // namespace demix
