#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "demix/deconv.hpp"
#include "demix/ensemble.hpp"
#include "demix/frame.hpp"
#include "demix/tuple_ops.hpp"

#include "helpers.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace demix;
using test::dft_ensemble;
using test::random_support;
using test::random_supported_tuple;
using test::random_tuple;
using test::random_vector;

namespace {

MeasurementEnsemble scalar_ensemble(Complex b, Complex a) {
  Matrix bm(1, 1), am(1, 1);
  bm << b;
  am << a;
  return MeasurementEnsemble(FrameFamily({bm}, std::abs(b), std::abs(b)), {am},
                             Convention::ComplexCircular, 0);
}

// Independent slow path for the forward map, straight from the definition.
Vector forward_by_definition(const MeasurementEnsemble& e, const MatrixTuple& z) {
  Vector out = Vector::Zero(e.q());
  for (Index l = 0; l < e.q(); ++l) {
    Complex acc(0, 0);
    for (int i = 0; i < e.components(); ++i) {
      const Matrix& b = e.frames().vectors(i);
      const Matrix& a = e.sketch(i);
      for (Index kap = 0; kap < b.cols(); ++kap)
        for (Index j = 0; j < a.cols(); ++j)
          acc += std::conj(b(l, kap)) * z.block(i)(kap, j) * a(l, j);
    }
    out(l) = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("dft frame basics") {
  Matrix one = make_dft_frame(1, 1);
  CHECK(one.rows() == 1);
  CHECK(std::abs(one(0, 0) - Complex(1, 0)) <= 1e-15);

  Matrix f = make_dft_frame(8, 3);
  Matrix gram = f.adjoint() * f;
  CHECK((gram - Matrix::Identity(3, 3)).norm() <= 1e-12);
  for (Index l = 0; l < 8; ++l)
    CHECK(f.row(l).squaredNorm() == doctest::Approx(3.0 / 8.0).epsilon(1e-14));

  FrameFamily fam = make_frame_family({{4, 10}}, 128, "dft");
  CHECK(fam.mu_plus() == 1.0);
  CHECK(fam.mu_minus() == 1.0);
  CHECK(fam.parseval_residual() <= 1e-12);
  CHECK_NOTHROW(fam.validate());

  CHECK_THROWS_AS(make_dft_frame(4, 5), std::invalid_argument);
}

TEST_CASE("random frame basics") {
  Matrix f = make_random_frame(64, 4, 99);
  CHECK((f.adjoint() * f - Matrix::Identity(4, 4)).norm() <= 1e-10);
  Matrix again = make_random_frame(64, 4, 99);
  CHECK((f - again).norm() == 0.0);

  FrameFamily fam = make_frame_family({{4, 10}}, 64, "random", 123);
  CHECK(fam.mu_minus() <= 1.0);
  CHECK(fam.mu_plus() >= 1.0);
  CHECK(fam.conditioning_residual() <= 0.0);
  // trace identity: the mean of (q/k)|b_l|^2 over l is exactly 1
  double mean = 0;
  for (Index l = 0; l < 64; ++l)
    mean += (64.0 / 4.0) * fam.vectors(0).row(l).squaredNorm();
  mean /= 64.0;
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forward trivial cases") {
  MeasurementEnsemble e = scalar_ensemble(Complex(1, 0), Complex(1, 0));
  Matrix z(1, 1);
  z << Complex(0.3, -0.7);
  CHECK(std::abs(forward(e, MatrixTuple({z}))(0) - Complex(0.3, -0.7)) <= 1e-15);

  Rng rng(21);
  const Profile profile{{3, 5}, {2, 4}};
  MeasurementEnsemble e2 = dft_ensemble(profile, 16, 7);
  CHECK(forward(e2, MatrixTuple::zero(profile)).norm() == 0.0);
}

TEST_CASE("forward matches definition and dense materialization") {
  Rng rng(22);
  const Profile profile{{3, 5}, {2, 4}};
  MeasurementEnsemble e = dft_ensemble(profile, 16, 8);
  const Matrix dense = materialize_dense(e);
  for (int t = 0; t < 50; ++t) {
    MatrixTuple x = random_tuple(profile, rng);
    Vector fast = forward(e, x);
    Vector slow = forward_by_definition(e, x);
    Vector via_dense = dense * x.vec();
    CHECK((fast - slow).norm() <= 1e-12 * slow.norm());
    CHECK((fast - via_dense).norm() <= 1e-12 * via_dense.norm());
  }
}

TEST_CASE("adjoint identity") {
  const Profile profile{{3, 5}, {2, 4}};
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    MeasurementEnsemble e = dft_ensemble(profile, 24, seed);
    Rng rng(seed * 31 + 7);
    for (int t = 0; t < 100; ++t) {
      MatrixTuple x = random_tuple(profile, rng);
      Vector p = random_vector(24, rng);
      const Complex a = forward(e, x).dot(p);  // <Ax, p>, conjugate-linear first
      const Complex b = inner(x, adjoint(e, p));
      CHECK(std::abs(a - b) <= 1e-12 * norm_frobenius(x) * p.norm());
    }
  }
  MeasurementEnsemble e = scalar_ensemble(Complex(1, 0), Complex(1, 0));
  Vector p(1);
  p << Complex(1, 0);
  CHECK(std::abs(adjoint(e, p).block(0)(0, 0) - Complex(1, 0)) <= 1e-15);
  CHECK(norm_frobenius(adjoint(e, Vector::Zero(1))) == 0.0);
}

TEST_CASE("column_op agrees with forward and dense columns") {
  Rng rng(23);
  const Profile profile{{3, 5}, {2, 4}};
  MeasurementEnsemble e = dft_ensemble(profile, 12, 9);
  const Matrix dense = materialize_dense(e);
  CHECK(column_op(e, 0, 2, Vector::Zero(3)).norm() == 0.0);
  for (int t = 0; t < 20; ++t) {
    const int i = static_cast<int>(rng.below(2));
    const Index n = profile[static_cast<size_t>(i)].cols;
    const Index k = profile[static_cast<size_t>(i)].rows;
    const Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    Vector nu = random_vector(k, rng);
    // embedded single-column tuple
    MatrixTuple x = MatrixTuple::zero(profile);
    x.block(i).col(j) = nu;
    Vector direct = column_op(e, i, j, nu);
    CHECK((direct - forward(e, x)).norm() <= 1e-14 * direct.norm());
    // same thing through the k_i dense columns
    Index off = 0;
    for (int m = 0; m < i; ++m) off += profile[static_cast<size_t>(m)].rows * profile[static_cast<size_t>(m)].cols;
    Vector via_dense = dense.middleCols(off + j * k, k) * nu;
    CHECK((direct - via_dense).norm() <= 1e-13 * direct.norm());
  }
  CHECK_THROWS_AS(column_op(e, 0, 99, Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(column_op(e, 7, 0, Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("normal_op_restricted properties") {
  Rng rng(24);
  const Profile profile{{3, 8}, {2, 6}};
  MeasurementEnsemble e = dft_ensemble(profile, 48, 10);
  SupportPattern s = random_support(profile, {2, 1}, rng);

  CHECK(norm_frobenius(normal_op_restricted(e, SupportPattern::empty_pattern(profile),
                                            MatrixTuple::zero(profile))) == 0.0);

  for (int t = 0; t < 20; ++t) {
    MatrixTuple x = project_support(random_tuple(profile, rng), s);
    MatrixTuple y = project_support(random_tuple(profile, rng), s);
    const Complex lhs = inner(normal_op_restricted(e, s, x), y);
    const Complex rhs = inner(x, normal_op_restricted(e, s, y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
  }

  // spectrum sits inside [1 - delta, 1 + delta] for the dense-oracle delta
  const Matrix dense = materialize_dense(e);
  RestrictedOperator op(e, s);
  Matrix gram(op.dim(), op.dim());
  for (Index c = 0; c < op.dim(); ++c) {
    Vector unit = Vector::Zero(op.dim());
    unit(c) = 1.0;
    gram.col(c) = op.normal_packed(unit);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  double delta = std::max(hi - 1.0, 1.0 - lo);
  CHECK(hi <= 1.0 + delta + 1e-12);
  CHECK(lo >= 1.0 - delta - 1e-12);

  // dense Gram restricted to S reproduces the operator
  Index off = 0;
  std::vector<Index> cols;
  for (int i = 0; i < e.components(); ++i) {
    const Index k = profile[static_cast<size_t>(i)].rows;
    for (Index j : s.set(i))
      for (Index kap = 0; kap < k; ++kap) cols.push_back(off + j * k + kap);
    off += k * profile[static_cast<size_t>(i)].cols;
  }
  Matrix ms(dense.rows(), static_cast<Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) ms.col(static_cast<Index>(c)) = dense.col(cols[c]);
  CHECK((ms.adjoint() * ms - gram).norm() <= 1e-12 * gram.norm());
}

TEST_CASE("materialize_dense cap and trivial value") {
  MeasurementEnsemble e = scalar_ensemble(Complex(0, 1), Complex(0.5, 0));
  Matrix d = materialize_dense(e);
  // entry is conj(b) * a
  CHECK(std::abs(d(0, 0) - Complex(0, -1) * Complex(0.5, 0)) <= 1e-15);
  CHECK(std::abs(d(0, 0)) == doctest::Approx(std::abs(Complex(0, 1)) * 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(materialize_dense(e, 0), std::invalid_argument);
}

TEST_CASE("sample_ensemble determinism and statistics") {
  const Profile profile{{2, 4}};
  FrameFamily frames = make_frame_family(profile, 100000, "dft");
  MeasurementEnsemble a = sample_ensemble(profile, frames, Convention::ComplexCircular, 42);
  MeasurementEnsemble b = sample_ensemble(profile, frames, Convention::ComplexCircular, 42);
  CHECK((a.sketch(0) - b.sketch(0)).norm() == 0.0);

  // complex circular: E[a a^*] = I within 2% in spectral norm over 1e5 rows
  const Matrix& s = a.sketch(0);
  Matrix cov = (s.transpose() * s.conjugate()) / static_cast<double>(s.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov - Matrix::Identity(4, 4), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().cwiseAbs().maxCoeff() <= 0.02);

  // real convention: E[g^4] = 3 within 2%
  MeasurementEnsemble r = sample_ensemble(profile, frames, Convention::Real, 43);
  double fourth = 0;
  for (Index l = 0; l < r.sketch(0).rows(); ++l)
    for (Index j = 0; j < 4; ++j) fourth += std::pow(r.sketch(0)(l, j).real(), 4);
  fourth /= static_cast<double>(r.sketch(0).rows() * 4);
  CHECK(fourth == doctest::Approx(3.0).epsilon(0.02));
  for (Index l = 0; l < 16; ++l)
    CHECK(r.sketch(0)(l, 0).imag() == 0.0);
}

TEST_CASE("unitary dft and circular convolution") {
  Rng rng(25);
  const Index q = 24;
  Vector delta0 = Vector::Zero(q);
  delta0(0) = 1.0;
  Vector hat = dft_unitary(delta0);
  for (Index l = 0; l < q; ++l)
    CHECK(std::abs(hat(l) - Complex(1.0 / std::sqrt(static_cast<double>(q)), 0)) <= 1e-14);

  Vector v = random_vector(q, rng);
  CHECK(dft_unitary(v).norm() == doctest::Approx(v.norm()).epsilon(1e-12));
  CHECK((idft_unitary(dft_unitary(v)) - v).norm() <= 1e-12 * v.norm());

  // convolution theorem with the unitary scaling
  Vector x = random_vector(q, rng);
  Vector y = random_vector(q, rng);
  Vector lhs = dft_unitary(circular_convolve(x, y));
  Vector rhs = std::sqrt(static_cast<double>(q)) *
               dft_unitary(x).cwiseProduct(dft_unitary(y));
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("lifting: impulse filter, r=1") {
  const Index q = 16, k = 3, n = 8;
  DeconvolutionInstance inst;
  inst.q = q;
  Rng rng(26);
  Matrix basis_b = make_dft_frame(q, k).conjugate();
  MeasurementEnsemble sketch = dft_ensemble({{k, n}}, q, 27);
  Matrix basis_a = sketch.sketch(0);

  Vector f0 = Vector::Zero(k);
  f0(0) = 1.0;  // w = impulse: the first DFT column is the constant vector
  std::vector<Index> supp{1, 5};
  Vector g0 = Vector::Zero(n);
  for (Index j : supp) g0(j) = rng.complex_normal();

  Vector what = basis_b * f0;
  Vector zhat = basis_a * g0;
  Vector w = idft_unitary(what);
  Vector z = idft_unitary(zhat);
  inst.observed = circular_convolve(w, z);
  inst.observed_hat = dft_unitary(inst.observed);
  inst.filters.push_back(w);
  inst.signals.push_back(z);
  inst.filter_bases.push_back(basis_b);
  inst.signal_bases.push_back(basis_a);
  inst.filter_coeffs.push_back(std::sqrt(static_cast<double>(q)) * f0);
  inst.signal_coeffs.push_back(g0);
  inst.supports.push_back(supp);

  // convolving with a (scaled) impulse reproduces the signal
  const Complex w0 = w(0);
  for (Index l = 1; l < q; ++l) CHECK(std::abs(w(l)) <= 1e-12);
  CHECK((inst.observed - w0 * z).norm() <= 1e-12 * z.norm());

  LiftedProblem lifted = lift_deconvolution(inst);
  CHECK(lifted.lifting_residual <= 1e-12);
}

TEST_CASE("lifting equivalence on random instances") {
  // oracle side: explicit convolution sum plus the DFT matrix
  for (std::uint64_t seed : {100u, 101u, 102u}) {
    const Profile profile{{2, 8}};
    DeconvolutionInstance inst =
        make_deconvolution_instance(profile, 16, {2}, Convention::ComplexCircular, "dft", seed);
    Vector conv = Vector::Zero(16);
    for (Index l = 0; l < 16; ++l) {
      Complex acc(0, 0);
      for (Index m = 0; m < 16; ++m)
        acc += inst.filters[0](m) * inst.signals[0]((l - m + 16) % 16);
      conv(l) = acc;
    }
    LiftedProblem lifted = lift_deconvolution(inst);
    Vector lhs = forward(lifted.ensemble, lifted.planted);
    Vector rhs = dft_unitary(conv);
    CHECK((lhs - rhs).norm() <= 1e-8 * rhs.norm());
  }
  // r = 2 mixed case
  const Profile profile{{2, 8}, {3, 6}};
  DeconvolutionInstance inst =
      make_deconvolution_instance(profile, 32, {2, 1}, Convention::ComplexCircular, "dft", 200);
  LiftedProblem lifted = lift_deconvolution(inst);
  CHECK(lifted.lifting_residual <= 1e-8);
  // planted tuple really is column-sparse on the declared support
  CHECK(norm_frobenius(project_support(lifted.planted, lifted.support.complement())) == 0.0);

  // random-orthonormal filter subspaces lift just as exactly
  DeconvolutionInstance rnd =
      make_deconvolution_instance(profile, 32, {2, 1}, Convention::ComplexCircular, "random", 201);
  CHECK(lift_deconvolution(rnd).lifting_residual <= 1e-8);
}

TEST_CASE("frame family invariants on ensembles used in tests") {
  const Profile profile{{3, 8}, {2, 6}};
  MeasurementEnsemble e = dft_ensemble(profile, 48, 11);
  CHECK_NOTHROW(e.frames().validate());
  FrameFamily rf = make_frame_family(profile, 48, "random", 12);
  CHECK_NOTHROW(rf.validate());
}
