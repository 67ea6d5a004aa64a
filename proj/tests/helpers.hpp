#pragma once

#include "demix/ensemble.hpp"
#include "demix/rng.hpp"
#include "demix/tuple_ops.hpp"
#include "demix/types.hpp"

#include <vector>

namespace demix::test {

inline MatrixTuple random_tuple(const Profile& profile, Rng& rng) {
  MatrixTuple t = MatrixTuple::zero(profile);
  for (int i = 0; i < t.components(); ++i)
    for (Index c = 0; c < t.block(i).cols(); ++c)
      for (Index r = 0; r < t.block(i).rows(); ++r) t.block(i)(r, c) = rng.complex_normal();
  return t;
}

inline Vector random_vector(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v;
}

inline SupportPattern random_support(const Profile& profile, const std::vector<Index>& sparsity,
                                     Rng& rng) {
  std::vector<std::vector<Index>> sets(profile.size());
  for (size_t i = 0; i < profile.size(); ++i) {
    const Index n = profile[i].cols;
    std::vector<Index> pool(static_cast<size_t>(n));
    for (Index t = 0; t < n; ++t) pool[static_cast<size_t>(t)] = t;
    for (Index t = 0; t < sparsity[i]; ++t) {
      const auto pick =
          static_cast<size_t>(t) + static_cast<size_t>(rng.below(static_cast<std::uint64_t>(n - t)));
      std::swap(pool[static_cast<size_t>(t)], pool[pick]);
      sets[i].push_back(pool[static_cast<size_t>(t)]);
    }
  }
  return SupportPattern(profile, std::move(sets));
}

/// Column-sparse planted signal with standard complex Gaussian entries on the
/// support.
inline MatrixTuple random_supported_tuple(const Profile& profile, const SupportPattern& s,
                                          Rng& rng) {
  MatrixTuple t = MatrixTuple::zero(profile);
  for (int i = 0; i < t.components(); ++i)
    for (Index j : s.set(i))
      for (Index r = 0; r < t.block(i).rows(); ++r) t.block(i)(r, j) = rng.complex_normal();
  return t;
}

inline MeasurementEnsemble dft_ensemble(const Profile& profile, Index q, std::uint64_t seed,
                                        Convention conv = Convention::ComplexCircular) {
  return sample_ensemble(profile, make_frame_family(profile, q, "dft"), conv, seed);
}

}  // namespace demix::test
