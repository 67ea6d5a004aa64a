#include "demix/ensemble.hpp"

#include "demix/rng.hpp"
#include "demix/tuple_ops.hpp"

#include <stdexcept>

namespace demix {

MeasurementEnsemble::MeasurementEnsemble(FrameFamily frames, std::vector<Matrix> sketches,
                                         Convention convention, std::uint64_t seed)
    : frames_(std::move(frames)),
      sketches_(std::move(sketches)),
      convention_(convention),
      seed_(seed) {
  if (sketches_.size() != static_cast<size_t>(frames_.components()))
    throw std::invalid_argument("MeasurementEnsemble: component count mismatch");
  for (const auto& a : sketches_) {
    if (a.rows() != frames_.q())
      throw std::invalid_argument("MeasurementEnsemble: sketch row count != q");
    if (a.cols() < 1) throw std::invalid_argument("MeasurementEnsemble: empty sketch");
  }
}

Profile MeasurementEnsemble::profile() const {
  Profile p;
  p.reserve(sketches_.size());
  for (int i = 0; i < components(); ++i) p.push_back({frames_.k(i), sketches_[static_cast<size_t>(i)].cols()});
  return p;
}

MeasurementEnsemble sample_ensemble(const Profile& dims, FrameFamily frames,
                                    Convention convention, std::uint64_t seed) {
  if (dims.size() != static_cast<size_t>(frames.components()))
    throw std::invalid_argument("sample_ensemble: profile/frames mismatch");
  for (size_t i = 0; i < dims.size(); ++i)
    if (dims[i].rows != frames.k(static_cast<int>(i)))
      throw std::invalid_argument("sample_ensemble: k_i mismatch with frames");
  const Index q = frames.q();
  Rng rng(seed);
  std::vector<Matrix> sketches;
  sketches.reserve(dims.size());
  for (const auto& s : dims) {
    Matrix a(q, s.cols);
    for (Index l = 0; l < q; ++l)
      for (Index j = 0; j < s.cols; ++j)
        a(l, j) = convention == Convention::ComplexCircular ? rng.complex_normal()
                                                            : Complex(rng.normal(), 0.0);
    sketches.push_back(std::move(a));
  }
  return MeasurementEnsemble(std::move(frames), std::move(sketches), convention, seed);
}

Vector forward(const MeasurementEnsemble& e, const MatrixTuple& z) {
  if (!(z.profile() == e.profile())) throw std::invalid_argument("forward: shape mismatch");
  Vector out = Vector::Zero(e.q());
  for (int i = 0; i < e.components(); ++i) {
    // M(l, kappa) = (Z_i a_l)(kappa); contract against conj(b_l).
    Matrix m = e.sketch(i) * z.block(i).transpose();
    out += e.frames().vectors(i).conjugate().cwiseProduct(m).rowwise().sum();
  }
  return out;
}

MatrixTuple adjoint(const MeasurementEnsemble& e, const Vector& p) {
  if (p.size() != e.q()) throw std::invalid_argument("adjoint: length mismatch");
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<size_t>(e.components()));
  for (int i = 0; i < e.components(); ++i) {
    Matrix scaled = e.sketch(i).conjugate();
    scaled.array().colwise() *= p.array();
    blocks.push_back(e.frames().vectors(i).transpose() * scaled);
  }
  return MatrixTuple(std::move(blocks));
}

Vector column_op(const MeasurementEnsemble& e, int i, Index j, const Vector& nu) {
  if (i < 0 || i >= e.components()) throw std::invalid_argument("column_op: component out of range");
  if (j < 0 || j >= e.sketch(i).cols()) throw std::invalid_argument("column_op: column out of range");
  if (nu.size() != e.frames().k(i)) throw std::invalid_argument("column_op: vector length mismatch");
  return (e.frames().vectors(i).conjugate() * nu).cwiseProduct(e.sketch(i).col(j));
}

MatrixTuple normal_op_restricted(const MeasurementEnsemble& e, const SupportPattern& s,
                                 const MatrixTuple& x) {
  if (!(x.profile() == e.profile()) || !s.matches(e.profile()))
    throw std::invalid_argument("normal_op_restricted: shape mismatch");
  RestrictedOperator op(e, s);
  return op.unpack(op.normal_packed(op.pack(x)));
}

Matrix materialize_dense(const MeasurementEnsemble& e, Index column_cap) {
  Index cols = 0;
  for (int i = 0; i < e.components(); ++i)
    cols += e.frames().k(i) * e.sketch(i).cols();
  if (cols > column_cap) throw std::invalid_argument("materialize_dense: column cap exceeded");
  Matrix d(e.q(), cols);
  Index off = 0;
  for (int i = 0; i < e.components(); ++i) {
    const Matrix& b = e.frames().vectors(i);
    const Matrix& a = e.sketch(i);
    for (Index j = 0; j < a.cols(); ++j)
      for (Index kap = 0; kap < b.cols(); ++kap)
        d.col(off++) = b.col(kap).conjugate().cwiseProduct(a.col(j));
  }
  return d;
}

RestrictedOperator::RestrictedOperator(const MeasurementEnsemble& e, const SupportPattern& s)
    : ensemble_(&e), support_(s) {
  if (!s.matches(e.profile()))
    throw std::invalid_argument("RestrictedOperator: support/ensemble mismatch");
  restricted_sketches_.reserve(static_cast<size_t>(e.components()));
  for (int i = 0; i < e.components(); ++i) {
    const auto& set = s.set(i);
    Matrix a(e.q(), static_cast<Index>(set.size()));
    for (size_t c = 0; c < set.size(); ++c) a.col(static_cast<Index>(c)) = e.sketch(i).col(set[c]);
    restricted_sketches_.push_back(std::move(a));
    dim_ += static_cast<Index>(set.size()) * e.frames().k(i);
  }
}

Vector RestrictedOperator::pack(const MatrixTuple& x) const {
  Vector v(dim_);
  Index off = 0;
  for (int i = 0; i < ensemble_->components(); ++i) {
    const auto& set = support_.set(i);
    for (Index j : set) {
      v.segment(off, x.block(i).rows()) = x.block(i).col(j);
      off += x.block(i).rows();
    }
  }
  return v;
}

MatrixTuple RestrictedOperator::unpack(const Vector& packed) const {
  MatrixTuple x = MatrixTuple::zero(ensemble_->profile());
  Index off = 0;
  for (int i = 0; i < ensemble_->components(); ++i) {
    const Index k = x.block(i).rows();
    for (Index j : support_.set(i)) {
      x.block(i).col(j) = packed.segment(off, k);
      off += k;
    }
  }
  return x;
}

Vector RestrictedOperator::forward_packed(const Vector& packed) const {
  const auto& e = *ensemble_;
  Vector out = Vector::Zero(e.q());
  Index off = 0;
  for (int i = 0; i < e.components(); ++i) {
    const Index k = e.frames().k(i);
    const Index si = support_.sparsity(i);
    if (si == 0) continue;
    Eigen::Map<const Matrix> zs(packed.data() + off, k, si);
    Matrix m = restricted_sketches_[static_cast<size_t>(i)] * zs.transpose();
    out += e.frames().vectors(i).conjugate().cwiseProduct(m).rowwise().sum();
    off += k * si;
  }
  return out;
}

Vector RestrictedOperator::adjoint_packed(const Vector& p) const {
  const auto& e = *ensemble_;
  Vector out(dim_);
  Index off = 0;
  for (int i = 0; i < e.components(); ++i) {
    const Index k = e.frames().k(i);
    const Index si = support_.sparsity(i);
    if (si == 0) continue;
    Matrix scaled = restricted_sketches_[static_cast<size_t>(i)].conjugate();
    scaled.array().colwise() *= p.array();
    Matrix blk = e.frames().vectors(i).transpose() * scaled;
    out.segment(off, k * si) = Eigen::Map<const Vector>(blk.data(), blk.size());
    off += k * si;
  }
  return out;
}

Vector RestrictedOperator::normal_packed(const Vector& packed) const {
  return adjoint_packed(forward_packed(packed));
}

}  // namespace demix
