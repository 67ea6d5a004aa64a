#pragma once

#include "demix/ensemble.hpp"
#include "demix/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace demix {

/// Everything the deterministic recovery condition measures on one instance.
/// Invariants (when delta < 1): rho = theta + eta*beta/(1-delta),
/// mu = sqrt(1+delta)/(1-delta), guarantee_holds = (delta < 1 && rho < 1).
/// When delta >= 1 the certificate is not built and the derived fields are
/// NaN with constants_defined = false.
struct CertificateReport {
  double delta = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double theta = 0.0;
  double tau = 0.0;  // stored as |upsilon|_2 / sqrt(s)
  double rho = 0.0;
  double mu = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double upsilon_norm = 0.0;
  bool guarantee_holds = false;
  bool constants_defined = false;
  int delta_iters = 0;
  int beta_iters = 0;
  int cert_cg_iters = 0;
};

/// Inputs of the measurement-count formula.
struct BudgetQuery {
  Profile profile;
  std::vector<Index> sparsity;
  double mu_minus = 1.0;
  double mu_plus = 1.0;
  double epsilon = 0.01;         // failure probability, in (0,1)
  double leading_constant = 1.0; // the formula's implicit constant

  void validate() const;
};

struct CertOptions {
  double power_tol = 1e-6;  // relative tolerance of the operator-norm estimates
  int power_max_iters = 200000;
  int power_restarts = 3;
  double cg_tol = 1e-10;
  int cg_max_factor = 10;  // max CG iterations = factor * subspace dim
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

/// |P_S A^* A P_S - P_S| on the support subspace, by shifted power iteration.
double estimate_delta(const MeasurementEnsemble& e, const SupportPattern& s,
                      const CertOptions& opts = {}, int* iters = nullptr);

/// max over off-support (i,j) of |P_S A^* A_j^i|_{2->F}, each by power
/// iteration on the k_i-dimensional Gram form. Empty complement gives 0.
double estimate_beta(const MeasurementEnsemble& e, const SupportPattern& s,
                     const CertOptions& opts = {}, int* iters = nullptr);

/// Exact dual certificate upsilon = A_S (A_S^* A_S)^{-1} Z0hat, Y = A^* upsilon,
/// with the inverse applied by conjugate gradients. Requires delta < 1;
/// CG stagnation throws std::runtime_error.
std::pair<Vector, MatrixTuple> build_certificate(const MeasurementEnsemble& e,
                                                 const SupportPattern& s,
                                                 const MatrixTuple& z0hat,
                                                 const CertOptions& opts = {},
                                                 int* cg_iters = nullptr);

/// Fills rho, mu, c1..c3 from delta, beta, eta, theta, tau; pure arithmetic.
void derive_constants(CertificateReport& report);

/// Runs the three estimators on z0 (supported on s) and assembles the report.
CertificateReport certificate_params(const MeasurementEnsemble& e, const SupportPattern& s,
                                     const MatrixTuple& z0, const CertOptions& opts = {});

/// c1 * offsupport + (c2 + c3 sqrt(s)) * sigma. Requires guarantee_holds.
double error_bound(const CertificateReport& report, double offsupport_l12, double sigma,
                   Index s);

/// ceil(C * mu_+^2 k* s log(1 + mu_+^4 k* sum(s_i k_i) / (mu_-^2 k_*))
///        * log(n k* / eps)); 0 when s = 0.
Index measurement_budget(const BudgetQuery& query);

}  // namespace demix
