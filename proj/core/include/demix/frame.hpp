#pragma once

#include "demix/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace demix {

/// Per-component Parseval frames (b_l^i)_{l in [q]} of C^{k_i}, stored as
/// q x k_i matrices with row l = b_l^i. Parseval is equivalent to the stored
/// matrix having orthonormal columns. The conditioning bounds satisfy
/// (q/k_i)|b_l^i|_2^2 in [mu_minus^2, mu_plus^2] for every i and l; for
/// measured bounds this holds bit-exactly, for analytic bounds (DFT kind,
/// where equal row norms are structural) to the validator's 1e-12 slack.
class FrameFamily {
 public:
  FrameFamily() = default;

  /// Bounds measured from the data (exact min/max over all rows).
  explicit FrameFamily(std::vector<Matrix> vectors);

  /// Analytic bounds, validated against the data by validate().
  FrameFamily(std::vector<Matrix> vectors, double mu_minus, double mu_plus);

  int components() const { return static_cast<int>(vectors_.size()); }
  Index q() const { return vectors_.empty() ? 0 : vectors_.front().rows(); }
  Index k(int i) const { return vectors_[static_cast<size_t>(i)].cols(); }
  const Matrix& vectors(int i) const { return vectors_[static_cast<size_t>(i)]; }

  double mu_minus() const { return mu_minus_; }
  double mu_plus() const { return mu_plus_; }
  /// Squared bounds are the stored primaries; measured families satisfy them
  /// bit-exactly.
  double mu_minus_sq() const { return mu_minus_sq_; }
  double mu_plus_sq() const { return mu_plus_sq_; }

  /// max_i | sum_l b_l^i (b_l^i)^* - I |_2.
  double parseval_residual() const;

  /// Largest violation of the recorded conditioning interval by any row.
  double conditioning_residual() const;

  /// Throws std::runtime_error if Parseval or conditioning fails.
  void validate(double parseval_tol = 1e-10, double conditioning_tol = 1e-12) const;

 private:
  void measure_bounds();

  std::vector<Matrix> vectors_;
  double mu_minus_ = 0.0;
  double mu_plus_ = 0.0;
  double mu_minus_sq_ = 0.0;
  double mu_plus_sq_ = 0.0;
};

/// Rows of the first k columns of the q x q unitary DFT matrix,
/// F(l, kappa) = exp(-2 pi i l kappa / q) / sqrt(q). Equal-norm rows, so the
/// family built from these has mu_minus = mu_plus = 1.
Matrix make_dft_frame(Index q, Index k);

/// Rows of a uniformly random q x k matrix with orthonormal columns
/// (QR of a seeded complex Gaussian matrix).
Matrix make_random_frame(Index q, Index k, std::uint64_t seed);

/// One frame per component of the profile. Seed is ignored for "dft".
FrameFamily make_frame_family(const Profile& profile, Index q, const std::string& kind,
                              std::uint64_t seed = 0);

}  // namespace demix
