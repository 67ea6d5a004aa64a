#include "demix/frame.hpp"

#include "demix/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace demix {

FrameFamily::FrameFamily(std::vector<Matrix> vectors) : vectors_(std::move(vectors)) {
  measure_bounds();
}

FrameFamily::FrameFamily(std::vector<Matrix> vectors, double mu_minus, double mu_plus)
    : vectors_(std::move(vectors)),
      mu_minus_(mu_minus),
      mu_plus_(mu_plus),
      mu_minus_sq_(mu_minus * mu_minus),
      mu_plus_sq_(mu_plus * mu_plus) {
  if (vectors_.empty()) throw std::invalid_argument("FrameFamily: needs at least one component");
  if (!(mu_minus > 0) || mu_plus < mu_minus)
    throw std::invalid_argument("FrameFamily: bad conditioning bounds");
}

void FrameFamily::measure_bounds() {
  if (vectors_.empty()) throw std::invalid_argument("FrameFamily: needs at least one component");
  const Index q = vectors_.front().rows();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0;
  for (const auto& b : vectors_) {
    if (b.rows() != q) throw std::invalid_argument("FrameFamily: inconsistent q");
    if (b.cols() < 1 || b.cols() > q) throw std::invalid_argument("FrameFamily: bad k");
    const double scale = static_cast<double>(q) / static_cast<double>(b.cols());
    for (Index l = 0; l < q; ++l) {
      const double v = scale * b.row(l).squaredNorm();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  mu_minus_sq_ = lo;
  mu_plus_sq_ = hi;
  mu_minus_ = std::sqrt(lo);
  mu_plus_ = std::sqrt(hi);
}

double FrameFamily::parseval_residual() const {
  double worst = 0;
  for (const auto& b : vectors_) {
    Matrix gram = b.adjoint() * b;
    gram.diagonal().array() -= 1.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return worst;
}

double FrameFamily::conditioning_residual() const {
  const double lo = mu_minus_sq_;
  const double hi = mu_plus_sq_;
  double worst = 0;
  for (const auto& b : vectors_) {
    const double scale = static_cast<double>(b.rows()) / static_cast<double>(b.cols());
    for (Index l = 0; l < b.rows(); ++l) {
      const double v = scale * b.row(l).squaredNorm();
      worst = std::max(worst, std::max(lo - v, v - hi));
    }
  }
  return worst;
}

void FrameFamily::validate(double parseval_tol, double conditioning_tol) const {
  const double pr = parseval_residual();
  if (!(pr <= parseval_tol))
    throw std::runtime_error("FrameFamily: Parseval residual " + std::to_string(pr));
  const double cr = conditioning_residual();
  if (!(cr <= conditioning_tol))
    throw std::runtime_error("FrameFamily: conditioning bounds violated by " + std::to_string(cr));
}

Matrix make_dft_frame(Index q, Index k) {
  if (k < 1 || k > q) throw std::invalid_argument("make_dft_frame: need 1 <= k <= q");
  // Twiddles indexed mod q keep l*kappa products exact for any size.
  std::vector<Complex> root(static_cast<size_t>(q));
  const double base = -2.0 * std::numbers::pi / static_cast<double>(q);
  for (Index t = 0; t < q; ++t)
    root[static_cast<size_t>(t)] = std::polar(1.0, base * static_cast<double>(t));
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));
  Matrix b(q, k);
  for (Index l = 0; l < q; ++l)
    for (Index kap = 0; kap < k; ++kap) b(l, kap) = scale * root[static_cast<size_t>((l * kap) % q)];
  return b;
}

Matrix make_random_frame(Index q, Index k, std::uint64_t seed) {
  if (k < 1 || k > q) throw std::invalid_argument("make_random_frame: need 1 <= k <= q");
  Rng rng(seed);
  Matrix g(q, k);
  for (Index l = 0; l < q; ++l)
    for (Index c = 0; c < k; ++c) g(l, c) = rng.complex_normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(q, k);
}

FrameFamily make_frame_family(const Profile& profile, Index q, const std::string& kind,
                              std::uint64_t seed) {
  std::vector<Matrix> blocks;
  blocks.reserve(profile.size());
  if (kind == "dft") {
    for (const auto& s : profile) blocks.push_back(make_dft_frame(q, s.rows));
    // Equal-norm rows by construction; bounds are analytic.
    return FrameFamily(std::move(blocks), 1.0, 1.0);
  }
  if (kind == "random") {
    for (size_t i = 0; i < profile.size(); ++i)
      blocks.push_back(make_random_frame(q, profile[i].rows, derive_seed(seed, i, 0)));
    return FrameFamily(std::move(blocks));
  }
  throw std::invalid_argument("make_frame_family: unknown kind '" + kind + "'");
}

}  // namespace demix
