#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "demix/io.hpp"
#include "demix/tuple_ops.hpp"

#include <nlohmann/json.hpp>

#include "helpers.hpp"

#include <cmath>
#include <limits>

using namespace demix;
using test::random_support;
using test::random_supported_tuple;
using test::random_tuple;

namespace {

MatrixTuple single_block(const Matrix& m) { return MatrixTuple({m}); }

Matrix col34() {
  Matrix m(2, 2);
  m << Complex(3, 0), Complex(0, 0), Complex(4, 0), Complex(0, 0);
  return m;
}

}  // namespace

TEST_CASE("norm_l12 on simple blocks") {
  CHECK(norm_l12(single_block(col34())) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(norm_l12(single_block(Matrix::Identity(2, 2))) == doctest::Approx(2.0).epsilon(1e-14));
  MatrixTuple two({Matrix::Identity(2, 2), Matrix::Identity(2, 2)});
  CHECK(norm_l12(two) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("norm_linf2 on simple blocks") {
  CHECK(norm_linf2(single_block(col34())) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(norm_linf2(MatrixTuple::zero({{2, 3}, {1, 4}})) == 0.0);
}

TEST_CASE("norms reject non-finite input") {
  Matrix bad = Matrix::Zero(2, 2);
  MatrixTuple t = single_block(bad);
  t.block(0)(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_AS(norm_l12(t), std::invalid_argument);
  CHECK_THROWS_AS(norm_linf2(t), std::invalid_argument);
}

TEST_CASE("dual pairing between the two norms") {
  Rng rng(11);
  const Profile profile{{3, 5}, {2, 4}};
  for (int t = 0; t < 100; ++t) {
    MatrixTuple x = random_tuple(profile, rng);
    MatrixTuple y = random_tuple(profile, rng);
    CHECK(std::abs(inner(x, y)) <= norm_linf2(x) * norm_l12(y) * (1 + 1e-12));
    CHECK(std::abs(inner(x, y).real()) <= norm_l12(x) * norm_linf2(y) * (1 + 1e-12));
  }
}

TEST_CASE("norm axioms hold on random tuples") {
  Rng rng(12);
  const Profile profile{{3, 4}, {2, 6}};
  for (int t = 0; t < 50; ++t) {
    MatrixTuple x = random_tuple(profile, rng);
    MatrixTuple y = random_tuple(profile, rng);
    const double c = 2.0 * rng.uniform() - 1.0;
    CHECK(norm_l12(x + y) <= norm_l12(x) + norm_l12(y) + 1e-12);
    CHECK(norm_linf2(x + y) <= norm_linf2(x) + norm_linf2(y) + 1e-12);
    CHECK(norm_l12(c * x) == doctest::Approx(std::abs(c) * norm_l12(x)).epsilon(1e-12));
    CHECK(norm_linf2(c * x) == doctest::Approx(std::abs(c) * norm_linf2(x)).epsilon(1e-12));
  }
}

TEST_CASE("project_support identity, empty and adjointness") {
  Rng rng(13);
  const Profile profile{{3, 5}, {2, 4}};
  MatrixTuple x = random_tuple(profile, rng);
  CHECK(norm_frobenius(project_support(x, SupportPattern::full(profile)) - x) == 0.0);
  CHECK(norm_frobenius(project_support(x, SupportPattern::empty_pattern(profile))) == 0.0);

  for (int t = 0; t < 20; ++t) {
    SupportPattern s = random_support(profile, {2, 1}, rng);
    MatrixTuple a = random_tuple(profile, rng);
    MatrixTuple b = random_tuple(profile, rng);
    const Complex lhs = inner(project_support(a, s), b);
    const Complex rhs = inner(a, project_support(b, s));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(lhs)));
    // idempotent, and P_S + P_Sc = identity
    MatrixTuple ps = project_support(a, s);
    CHECK(norm_frobenius(project_support(ps, s) - ps) <= 1e-15);
    MatrixTuple sum = ps + project_support(a, s.complement());
    CHECK(norm_frobenius(sum - a) <= 1e-15);
  }
}

TEST_CASE("project_support shape mismatch") {
  const Profile profile{{2, 3}};
  SupportPattern s = SupportPattern::full({{2, 4}});
  CHECK_THROWS_AS(project_support(MatrixTuple::zero(profile), s), std::invalid_argument);
}

TEST_CASE("normalize_columns") {
  Matrix m(2, 1);
  m << Complex(3, 0), Complex(4, 0);
  MatrixTuple t = single_block(m);
  MatrixTuple n = normalize_columns(t);
  CHECK(n.block(0)(0, 0).real() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(n.block(0)(1, 0).real() == doctest::Approx(0.8).epsilon(1e-15));

  MatrixTuple z = MatrixTuple::zero({{2, 2}});
  CHECK(norm_frobenius(normalize_columns(z)) == 0.0);

  // s-column-sparse tuples normalize to Frobenius norm sqrt(s)
  Rng rng(14);
  const Profile profile{{3, 6}, {2, 5}};
  SupportPattern s = random_support(profile, {2, 3}, rng);
  MatrixTuple x = random_supported_tuple(profile, s, rng);
  CHECK(norm_frobenius(normalize_columns(x)) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("block_soft_threshold columns") {
  Matrix m(2, 1);
  m << Complex(3, 0), Complex(4, 0);
  MatrixTuple t = single_block(m);
  CHECK(norm_frobenius(block_soft_threshold(t, 5.0)) == 0.0);
  MatrixTuple half = block_soft_threshold(t, 2.5);
  CHECK(half.block(0)(0, 0).real() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(half.block(0)(1, 0).real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(block_soft_threshold(t, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(block_soft_threshold(t, -1.0), std::invalid_argument);
}

TEST_CASE("prox satisfies the subdifferential optimality condition") {
  Rng rng(15);
  const Profile profile{{3, 5}, {2, 4}};
  for (int t = 0; t < 50; ++t) {
    MatrixTuple x = random_tuple(profile, rng);
    const double lam = 0.3;
    MatrixTuple out = block_soft_threshold(x, lam);
    MatrixTuple v = (1.0 / lam) * (x - out);
    CHECK(subdiff_check(out, v, 1e-10));
  }
}

TEST_CASE("prox is the minimizer of the prox objective") {
  Rng rng(16);
  const Profile profile{{2, 4}};
  MatrixTuple x = random_tuple(profile, rng);
  const double lam = 0.7;
  MatrixTuple out = block_soft_threshold(x, lam);
  auto objective = [&](const MatrixTuple& u) {
    MatrixTuple d = u - x;
    return lam * norm_l12(u) + 0.5 * norm_frobenius(d) * norm_frobenius(d);
  };
  const double base = objective(out);
  for (int t = 0; t < 1000; ++t) {
    MatrixTuple dir = random_tuple(profile, rng);
    const double scale = std::pow(10.0, -3.0 * rng.uniform());  // 1e-3 .. 1
    MatrixTuple pert = out + (scale / norm_frobenius(dir)) * dir;
    CHECK(objective(pert) > base);
  }
}

TEST_CASE("subdiff_check cases") {
  Rng rng(17);
  const Profile profile{{3, 4}};
  SupportPattern s = random_support(profile, {2}, rng);
  MatrixTuple z = normalize_columns(random_supported_tuple(profile, s, rng));
  CHECK(subdiff_check(z, normalize_columns(z), 1e-12));

  MatrixTuple zero = MatrixTuple::zero(profile);
  MatrixTuple v = random_tuple(profile, rng);
  v = (0.99 / norm_linf2(v)) * v;
  CHECK(subdiff_check(zero, v, 1e-12));

  // an off-support column of norm 1.5 breaks membership
  MatrixTuple bad = normalize_columns(z);
  for (Index j = 0; j < profile[0].cols; ++j) {
    if (!s.contains(0, j)) {
      bad.block(0)(0, j) = Complex(1.5, 0);
      break;
    }
  }
  CHECK_FALSE(subdiff_check(z, bad, 1e-8));

  CHECK_THROWS_AS(subdiff_check(z, MatrixTuple::zero({{3, 5}}), 1e-8), std::invalid_argument);
}

TEST_CASE("subgradient inequality") {
  Rng rng(18);
  const Profile profile{{3, 5}, {2, 4}};
  for (int t = 0; t < 50; ++t) {
    SupportPattern s = random_support(profile, {2, 1}, rng);
    MatrixTuple z = random_supported_tuple(profile, s, rng);
    // v: normalized columns on the support, norm <= 1 columns off it
    MatrixTuple v = normalize_columns(z);
    MatrixTuple off = project_support(random_tuple(profile, rng), s.complement());
    const double m = norm_linf2(off);
    if (m > 0) v += (rng.uniform() / m) * off;
    REQUIRE(subdiff_check(z, v, 1e-10));
    MatrixTuple h = random_tuple(profile, rng);
    CHECK(norm_l12(z + h) >= norm_l12(z) + inner(h, v).real() - 1e-10);
  }
}

TEST_CASE("json container round trip") {
  Rng rng(19);
  const Profile profile{{3, 5}, {2, 4}};
  SupportPattern s = random_support(profile, {2, 1}, rng);
  MatrixTuple x = random_tuple(profile, rng);
  Json j = tuple_to_json(x, &s);
  // exact double round trip through the shortest-representation dump
  Json parsed = Json::parse(j.dump());
  MatrixTuple back = tuple_from_json(parsed);
  CHECK(norm_frobenius(back - x) == 0.0);
  auto s_back = support_from_json(parsed, profile);
  REQUIRE(s_back.has_value());
  for (int i = 0; i < s.components(); ++i) CHECK(s_back->set(i) == s.set(i));
}
