#pragma once

#include "demix/ensemble.hpp"
#include "demix/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace demix {

/// Unitary DFT, (F v)_l = q^{-1/2} sum_m exp(-2 pi i l m / q) v_m.
Vector dft_unitary(const Vector& v);
Vector idft_unitary(const Vector& v);

/// Circular convolution of length q, (x * y)_l = sum_m x_m y_{(l-m) mod q}.
Vector circular_convolve(const Vector& x, const Vector& y);

/// A blind deconvolution and demixing instance: observed v = sum_i w_i * z_i
/// with w_i, z_i constrained to known subspaces given by Fourier-domain bases
/// B^i (q x k_i, orthonormal columns) and A^i (q x n_i). filter_coeffs
/// absorbs the sqrt(q) of the unitary convolution theorem so that the lifted
/// tuple satisfies Z_i = f^i (conj(g^i))^* exactly.
struct DeconvolutionInstance {
  Index q = 0;
  Convention convention = Convention::ComplexCircular;
  std::vector<Vector> filters;        // w_i, time domain
  std::vector<Vector> signals;        // z_i, time domain
  std::vector<Matrix> filter_bases;   // B^i
  std::vector<Matrix> signal_bases;   // A^i
  std::vector<Vector> filter_coeffs;  // f^i
  std::vector<Vector> signal_coeffs;  // g^i, s_i-sparse
  std::vector<std::vector<Index>> supports;
  Vector observed;      // v
  Vector observed_hat;  // DFT(v)
};

/// Random instance: f^i, the s_i-sparse g^i and the signal bases are drawn
/// from the seed; filter bases are DFT columns ("dft") or random orthonormal.
DeconvolutionInstance make_deconvolution_instance(const Profile& profile, Index q,
                                                  const std::vector<Index>& sparsity,
                                                  Convention convention,
                                                  const std::string& frame_kind,
                                                  std::uint64_t seed);

struct LiftedProblem {
  MeasurementEnsemble ensemble;
  MatrixTuple planted;      // Z_i = f^i (conj(g^i))^*
  SupportPattern support;   // supp g^i
  Vector observed_hat;      // right-hand side for the solvers
  double lifting_residual;  // |A(Z0) - DFT(sum w_i * z_i)| / |DFT(...)|
};

/// Rewrites the instance as linear measurements of the rank-one tuple:
/// frames b_l^i(kappa) = conj(B^i_kappa(l)), sketches a_l^i(j) = A^i_j(l).
/// Throws when the lifting identity fails beyond 1e-8 relative.
LiftedProblem lift_deconvolution(const DeconvolutionInstance& instance);

}  // namespace demix
