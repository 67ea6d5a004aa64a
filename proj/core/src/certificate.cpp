#include "demix/certificate.hpp"

#include "demix/iterative.hpp"
#include "demix/rng.hpp"
#include "demix/tuple_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace demix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_support(const MeasurementEnsemble& e, const SupportPattern& s, const char* who) {
  if (!s.matches(e.profile())) throw std::invalid_argument(std::string(who) + ": support mismatch");
}

}  // namespace

void BudgetQuery::validate() const {
  if (profile.empty() || sparsity.size() != profile.size())
    throw std::invalid_argument("BudgetQuery: profile/sparsity mismatch");
  for (size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].rows < 1 || profile[i].cols < 1)
      throw std::invalid_argument("BudgetQuery: counts must be >= 1");
    if (sparsity[i] < 0 || sparsity[i] > profile[i].cols)
      throw std::invalid_argument("BudgetQuery: bad sparsity");
  }
  if (!(epsilon > 0) || !(epsilon < 1))
    throw std::invalid_argument("BudgetQuery: epsilon must be in (0,1)");
  if (!(mu_minus > 0) || mu_plus < mu_minus)
    throw std::invalid_argument("BudgetQuery: bad conditioning bounds");
  if (!(leading_constant > 0))
    throw std::invalid_argument("BudgetQuery: leading constant must be positive");
}

double estimate_delta(const MeasurementEnsemble& e, const SupportPattern& s,
                      const CertOptions& opts, int* iters) {
  check_support(e, s, "estimate_delta");
  if (iters) *iters = 0;
  const RestrictedOperator op(e, s);
  const Index dim = op.dim();
  if (dim == 0) return 0.0;

  Rng rng(opts.seed);
  auto normal = [&op](const Vector& v) { return op.normal_packed(v); };
  PowerResult top = power_iteration(normal, dim, rng, opts.power_tol, opts.power_max_iters,
                                    opts.power_restarts);
  if (!top.converged)
    throw std::runtime_error("estimate_delta: power iteration did not converge");

  // Both edges of the spectrum: lambda_max(N) and, via the shift
  // c I - N with c = lambda_max + 1, lambda_min(N).
  const double c = top.value + 1.0;
  auto shifted = [&op, c](const Vector& v) { return Vector(c * v - op.normal_packed(v)); };
  PowerResult bottom = power_iteration(shifted, dim, rng, opts.power_tol, opts.power_max_iters,
                                       opts.power_restarts);
  if (!bottom.converged)
    throw std::runtime_error("estimate_delta: power iteration did not converge");
  if (iters) *iters = top.iterations + bottom.iterations;

  const double upper = top.value - 1.0;          // lambda_max(N) - 1
  const double lower = bottom.value - top.value; // 1 - lambda_min(N)
  return std::max({upper, lower, 0.0});
}

double estimate_beta(const MeasurementEnsemble& e, const SupportPattern& s,
                     const CertOptions& opts, int* iters) {
  check_support(e, s, "estimate_beta");
  if (iters) *iters = 0;
  if (s.is_full()) return 0.0;
  const RestrictedOperator op(e, s);
  const Index dim = op.dim();
  if (dim == 0) return 0.0;
  Rng rng(opts.seed + 1);
  double beta_sq = 0.0;
  for (int i = 0; i < e.components(); ++i) {
    const Index k = e.frames().k(i);
    const Index n = e.sketch(i).cols();
    Matrix t(dim, k);
    for (Index j = 0; j < n; ++j) {
      if (s.contains(i, j)) continue;
      for (Index kap = 0; kap < k; ++kap) {
        Vector nu = Vector::Zero(k);
        nu(kap) = 1.0;
        t.col(kap) = op.adjoint_packed(column_op(e, i, j, nu));
      }
      Matrix gram = t.adjoint() * t;
      auto apply = [&gram](const Vector& v) { return Vector(gram * v); };
      PowerResult top = power_iteration(apply, k, rng, opts.power_tol, opts.power_max_iters,
                                        opts.power_restarts);
      if (!top.converged)
        throw std::runtime_error("estimate_beta: power iteration did not converge");
      if (iters) *iters += top.iterations;
      beta_sq = std::max(beta_sq, top.value);
    }
  }
  return std::sqrt(std::max(beta_sq, 0.0));
}

std::pair<Vector, MatrixTuple> build_certificate(const MeasurementEnsemble& e,
                                                 const SupportPattern& s,
                                                 const MatrixTuple& z0hat,
                                                 const CertOptions& opts, int* cg_iters) {
  check_support(e, s, "build_certificate");
  if (!(z0hat.profile() == e.profile()))
    throw std::invalid_argument("build_certificate: tuple shape mismatch");
  if (cg_iters) *cg_iters = 0;
  const RestrictedOperator op(e, s);
  if (op.dim() == 0)
    return {Vector::Zero(e.q()), MatrixTuple::zero(e.profile())};

  const Vector rhs = op.pack(z0hat);
  Vector x = Vector::Zero(op.dim());
  auto normal = [&op](const Vector& v) { return op.normal_packed(v); };
  const int max_iters = opts.cg_max_factor * static_cast<int>(op.dim()) + 50;
  CgResult cg = cg_solve(normal, rhs, x, opts.cg_tol, max_iters);
  if (cg_iters) *cg_iters = cg.iterations;
  if (!cg.converged)
    throw std::runtime_error(
        "build_certificate: CG stagnated (restricted operator numerically singular)");
  Vector upsilon = op.forward_packed(x);
  return {upsilon, adjoint(e, upsilon)};
}

void derive_constants(CertificateReport& r) {
  if (!(r.delta < 1.0)) {
    r.rho = r.mu = r.c1 = r.c2 = r.c3 = kNaN;
    r.constants_defined = false;
    r.guarantee_holds = false;
    return;
  }
  r.rho = r.theta + r.eta * r.beta / (1.0 - r.delta);
  r.mu = std::sqrt(1.0 + r.delta) / (1.0 - r.delta);
  const double amplification = 1.0 + r.beta / (1.0 - r.delta);
  const double lever = 2.0 * amplification / (1.0 - r.rho);
  r.c1 = lever;
  r.c2 = r.mu * r.eta * lever + 2.0 * r.mu;
  r.c3 = r.tau * lever;
  r.constants_defined = true;
  r.guarantee_holds = r.rho < 1.0;
}

CertificateReport certificate_params(const MeasurementEnsemble& e, const SupportPattern& s,
                                     const MatrixTuple& z0, const CertOptions& opts) {
  CertificateReport report;
  report.delta = estimate_delta(e, s, opts, &report.delta_iters);
  report.beta = estimate_beta(e, s, opts, &report.beta_iters);
  if (!(report.delta < 1.0 - 1e-9)) {
    report.eta = report.theta = report.tau = report.upsilon_norm = kNaN;
    report.delta = std::max(report.delta, 1.0);
    derive_constants(report);
    return report;
  }

  const MatrixTuple z0hat = normalize_columns(project_support(z0, s));
  Vector upsilon;
  MatrixTuple y;
  try {
    std::tie(upsilon, y) = build_certificate(e, s, z0hat, opts, &report.cert_cg_iters);
  } catch (const std::runtime_error&) {
    // CG stagnation: the restricted operator is singular at working precision
    report.eta = report.theta = report.tau = report.upsilon_norm = kNaN;
    report.delta = 1.0;
    derive_constants(report);
    return report;
  }
  MatrixTuple on_support = project_support(y, s);
  on_support -= z0hat;
  report.eta = norm_frobenius(on_support);
  report.theta = norm_linf2(project_support(y, s.complement()));
  report.upsilon_norm = upsilon.norm();
  const Index total = s.total_sparsity();
  report.tau = total > 0 ? report.upsilon_norm / std::sqrt(static_cast<double>(total)) : 0.0;
  derive_constants(report);
  return report;
}

double error_bound(const CertificateReport& report, double offsupport_l12, double sigma,
                   Index s) {
  if (!report.guarantee_holds || !report.constants_defined)
    throw std::invalid_argument("error_bound: no guarantee available");
  return report.c1 * offsupport_l12 +
         (report.c2 + report.c3 * std::sqrt(static_cast<double>(s))) * sigma;
}

Index measurement_budget(const BudgetQuery& query) {
  query.validate();
  Index s = 0, n = 0, sk = 0;
  Index k_max = query.profile.front().rows;
  Index k_min = k_max;
  for (size_t i = 0; i < query.profile.size(); ++i) {
    s += query.sparsity[i];
    n += query.profile[i].cols;
    sk += query.sparsity[i] * query.profile[i].rows;
    k_max = std::max(k_max, query.profile[i].rows);
    k_min = std::min(k_min, query.profile[i].rows);
  }
  if (s == 0) return 0;
  const double mu_p2 = query.mu_plus * query.mu_plus;
  const double inner_log = std::log1p(mu_p2 * mu_p2 * static_cast<double>(k_max) *
                                      static_cast<double>(sk) /
                                      (query.mu_minus * query.mu_minus * static_cast<double>(k_min)));
  const double outer_log =
      std::log(static_cast<double>(n) * static_cast<double>(k_max) / query.epsilon);
  const double value = query.leading_constant * mu_p2 * static_cast<double>(k_max) *
                       static_cast<double>(s) * inner_log * outer_log;
  return static_cast<Index>(std::ceil(value));
}

}  // namespace demix
