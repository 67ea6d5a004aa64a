#pragma once

#include "demix/frame.hpp"
#include "demix/types.hpp"

#include <cstdint>
#include <vector>

namespace demix {

/// Distribution of the sketch vectors a_l^i. ComplexCircular has independent
/// real/imaginary parts of variance 1/2 per entry (E[a a^*] = I); Real has
/// i.i.d. standard real normal entries.
enum class Convention { ComplexCircular, Real };

/// Frames plus sampled Gaussian sketches; realizes the measurement map, its
/// adjoint and the per-column maps. Immutable after sampling.
class MeasurementEnsemble {
 public:
  MeasurementEnsemble() = default;
  MeasurementEnsemble(FrameFamily frames, std::vector<Matrix> sketches,
                      Convention convention, std::uint64_t seed);

  const FrameFamily& frames() const { return frames_; }
  /// q x n_i, row l = a_l^i.
  const Matrix& sketch(int i) const { return sketches_[static_cast<size_t>(i)]; }
  int components() const { return static_cast<int>(sketches_.size()); }
  Index q() const { return frames_.q(); }
  Profile profile() const;
  Convention convention() const { return convention_; }
  std::uint64_t seed() const { return seed_; }

 private:
  FrameFamily frames_;
  std::vector<Matrix> sketches_;
  Convention convention_ = Convention::ComplexCircular;
  std::uint64_t seed_ = 0;
};

/// Draws the sketches in (component, row) lexicographic order, entries in
/// index order, so a fixed seed reproduces the ensemble bit-for-bit.
MeasurementEnsemble sample_ensemble(const Profile& dims, FrameFamily frames,
                                    Convention convention, std::uint64_t seed);

/// (A Z)_l = sum_i <b_l^i, Z_i a_l^i>, conjugate-linear in b.
Vector forward(const MeasurementEnsemble& e, const MatrixTuple& z);

/// (A^* p)_i = sum_l p_l b_l^i (a_l^i)^*.
MatrixTuple adjoint(const MeasurementEnsemble& e, const Vector& p);

/// A_j^i nu: forward of the tuple that is nu e_j^* in block i, zero elsewhere;
/// entry l equals <b_l^i, nu> a_l^i(j).
Vector column_op(const MeasurementEnsemble& e, int i, Index j, const Vector& nu);

/// P_S A^* A P_S x for x supported on s.
MatrixTuple normal_op_restricted(const MeasurementEnsemble& e, const SupportPattern& s,
                                 const MatrixTuple& x);

/// Dense q x sum(n_i k_i) matrix of the measurement map in the (component,
/// column, row) coordinate order of MatrixTuple::vec. Throws when the column
/// count exceeds the cap.
Matrix materialize_dense(const MeasurementEnsemble& e, Index column_cap = 20000);

/// Cached support restriction of an ensemble: packs tuples supported on S
/// into stacked per-block k_i x s_i coordinates and applies the forward map,
/// its adjoint and the restricted normal operator without touching
/// off-support columns.
class RestrictedOperator {
 public:
  RestrictedOperator(const MeasurementEnsemble& e, const SupportPattern& s);

  Index dim() const { return dim_; }
  const SupportPattern& support() const { return support_; }

  Vector pack(const MatrixTuple& x) const;
  MatrixTuple unpack(const Vector& packed) const;

  /// A P_S acting on packed coordinates.
  Vector forward_packed(const Vector& packed) const;
  /// pack(P_S A^* p).
  Vector adjoint_packed(const Vector& p) const;
  /// P_S A^* A P_S in packed coordinates.
  Vector normal_packed(const Vector& packed) const;

 private:
  const MeasurementEnsemble* ensemble_;
  SupportPattern support_;
  std::vector<Matrix> restricted_sketches_;  // q x s_i
  Index dim_ = 0;
};

}  // namespace demix
