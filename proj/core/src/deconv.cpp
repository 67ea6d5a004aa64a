#include "demix/deconv.hpp"

#include "demix/rng.hpp"
#include "demix/tuple_ops.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace demix {

namespace {

std::vector<Complex> unit_roots(Index q, double sign) {
  std::vector<Complex> root(static_cast<size_t>(q));
  const double base = sign * 2.0 * std::numbers::pi / static_cast<double>(q);
  for (Index t = 0; t < q; ++t)
    root[static_cast<size_t>(t)] = std::polar(1.0, base * static_cast<double>(t));
  return root;
}

Vector dft_impl(const Vector& v, double sign) {
  const Index q = v.size();
  const auto root = unit_roots(q, sign);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));
  Vector out(q);
  for (Index l = 0; l < q; ++l) {
    Complex acc(0, 0);
    for (Index m = 0; m < q; ++m) acc += root[static_cast<size_t>((l * m) % q)] * v(m);
    out(l) = scale * acc;
  }
  return out;
}

}  // namespace

Vector dft_unitary(const Vector& v) { return dft_impl(v, -1.0); }
Vector idft_unitary(const Vector& v) { return dft_impl(v, +1.0); }

Vector circular_convolve(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("circular_convolve: length mismatch");
  const Index q = x.size();
  Vector out = Vector::Zero(q);
  for (Index l = 0; l < q; ++l) {
    Complex acc(0, 0);
    for (Index m = 0; m < q; ++m) acc += x(m) * y((l - m + q) % q);
    out(l) = acc;
  }
  return out;
}

DeconvolutionInstance make_deconvolution_instance(const Profile& profile, Index q,
                                                  const std::vector<Index>& sparsity,
                                                  Convention convention,
                                                  const std::string& frame_kind,
                                                  std::uint64_t seed) {
  if (sparsity.size() != profile.size())
    throw std::invalid_argument("make_deconvolution_instance: sparsity/profile mismatch");
  const int r = static_cast<int>(profile.size());
  DeconvolutionInstance inst;
  inst.q = q;
  inst.convention = convention;

  // Fourier-domain filter subspaces: orthonormal columns so the lifted frames
  // are Parseval.
  FrameFamily frames = make_frame_family(profile, q, frame_kind, derive_seed(seed, 0, 0));
  MeasurementEnsemble sketches =
      sample_ensemble(profile, frames, convention, derive_seed(seed, 1, 0));

  Rng rng(derive_seed(seed, 2, 0));
  const double sq = std::sqrt(static_cast<double>(q));
  inst.observed = Vector::Zero(q);
  for (int i = 0; i < r; ++i) {
    const Index k = profile[static_cast<size_t>(i)].rows;
    const Index n = profile[static_cast<size_t>(i)].cols;
    const Index s = sparsity[static_cast<size_t>(i)];
    if (s < 0 || s > n) throw std::invalid_argument("make_deconvolution_instance: bad sparsity");

    Matrix basis_b = frames.vectors(i).conjugate();  // B^i with b_l^i(kappa) = conj(B^i_kappa(l))
    Matrix basis_a = sketches.sketch(i);             // A^i with a_l^i(j) = A^i_j(l)

    Vector f0(k);
    for (Index t = 0; t < k; ++t) f0(t) = rng.complex_normal();

    // Partial Fisher-Yates for the support.
    std::vector<Index> pool(static_cast<size_t>(n));
    for (Index t = 0; t < n; ++t) pool[static_cast<size_t>(t)] = t;
    std::vector<Index> supp;
    for (Index t = 0; t < s; ++t) {
      const auto pick = static_cast<size_t>(t) + static_cast<size_t>(rng.below(static_cast<std::uint64_t>(n - t)));
      std::swap(pool[static_cast<size_t>(t)], pool[pick]);
      supp.push_back(pool[static_cast<size_t>(t)]);
    }
    std::sort(supp.begin(), supp.end());

    Vector g0 = Vector::Zero(n);
    for (Index j : supp) g0(j) = rng.complex_normal();

    Vector what = basis_b * f0;
    Vector zhat = basis_a * g0;
    Vector w = idft_unitary(what);
    Vector z = idft_unitary(zhat);
    inst.observed += circular_convolve(w, z);

    inst.filters.push_back(std::move(w));
    inst.signals.push_back(std::move(z));
    inst.filter_bases.push_back(std::move(basis_b));
    inst.signal_bases.push_back(std::move(basis_a));
    // sqrt(q) from the unitary convolution theorem lands in f.
    inst.filter_coeffs.push_back(sq * f0);
    inst.signal_coeffs.push_back(std::move(g0));
    inst.supports.push_back(std::move(supp));
  }
  inst.observed_hat = dft_unitary(inst.observed);
  return inst;
}

LiftedProblem lift_deconvolution(const DeconvolutionInstance& inst) {
  const int r = static_cast<int>(inst.filter_bases.size());
  if (r < 1) throw std::invalid_argument("lift_deconvolution: empty instance");

  std::vector<Matrix> frame_blocks;
  std::vector<Matrix> sketch_blocks;
  std::vector<Matrix> planted_blocks;
  frame_blocks.reserve(static_cast<size_t>(r));
  for (int i = 0; i < r; ++i) {
    frame_blocks.push_back(inst.filter_bases[static_cast<size_t>(i)].conjugate());
    sketch_blocks.push_back(inst.signal_bases[static_cast<size_t>(i)]);
    // Z_i = f^i (conj(g^i))^*, i.e. Z_i(kappa, j) = f^i(kappa) g^i(j).
    planted_blocks.push_back(inst.filter_coeffs[static_cast<size_t>(i)] *
                             inst.signal_coeffs[static_cast<size_t>(i)].transpose());
  }

  LiftedProblem lifted;
  FrameFamily frames{std::move(frame_blocks)};
  frames.validate();
  lifted.ensemble =
      MeasurementEnsemble(std::move(frames), std::move(sketch_blocks), inst.convention, 0);
  lifted.planted = MatrixTuple(std::move(planted_blocks));
  lifted.support = SupportPattern(lifted.planted.profile(), inst.supports);
  lifted.observed_hat = inst.observed_hat;

  const Vector predicted = forward(lifted.ensemble, lifted.planted);
  const double denom = std::max(lifted.observed_hat.norm(), 1e-300);
  lifted.lifting_residual = (predicted - lifted.observed_hat).norm() / denom;
  if (!(lifted.lifting_residual <= 1e-8))
    throw std::invalid_argument("lift_deconvolution: inconsistent bases/coefficients (residual " +
                                std::to_string(lifted.lifting_residual) + ")");
  return lifted;
}

}  // namespace demix
