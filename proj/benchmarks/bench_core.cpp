#include <benchmark/benchmark.h>

#include "demix/certificate.hpp"
#include "demix/ensemble.hpp"
#include "demix/rng.hpp"
#include "demix/solvers.hpp"
#include "demix/tuple_ops.hpp"

using namespace demix;

namespace {

MatrixTuple random_tuple(const Profile& profile, Rng& rng) {
  MatrixTuple t = MatrixTuple::zero(profile);
  for (int i = 0; i < t.components(); ++i)
    for (Index c = 0; c < t.block(i).cols(); ++c)
      for (Index r = 0; r < t.block(i).rows(); ++r) t.block(i)(r, c) = rng.complex_normal();
  return t;
}

SupportPattern first_columns(const Profile& profile, const std::vector<Index>& sparsity) {
  std::vector<std::vector<Index>> sets(profile.size());
  for (size_t i = 0; i < profile.size(); ++i)
    for (Index j = 0; j < sparsity[i]; ++j) sets[i].push_back(j);
  return SupportPattern(profile, std::move(sets));
}

void bm_forward(benchmark::State& state) {
  const Index q = state.range(0);
  const Profile profile{{5, 64}};
  MeasurementEnsemble e =
      sample_ensemble(profile, make_frame_family(profile, q, "dft"), Convention::ComplexCircular, 1);
  Rng rng(2);
  MatrixTuple x = random_tuple(profile, rng);
  for (auto _ : state) {
    Vector y = forward(e, x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(bm_forward)->Arg(64)->Arg(256)->Arg(1024);

void bm_adjoint(benchmark::State& state) {
  const Index q = state.range(0);
  const Profile profile{{5, 64}};
  MeasurementEnsemble e =
      sample_ensemble(profile, make_frame_family(profile, q, "dft"), Convention::ComplexCircular, 1);
  Rng rng(3);
  Vector p(q);
  for (Index i = 0; i < q; ++i) p(i) = rng.complex_normal();
  for (auto _ : state) {
    MatrixTuple x = adjoint(e, p);
    benchmark::DoNotOptimize(x.block(0).data());
  }
}
BENCHMARK(bm_adjoint)->Arg(64)->Arg(256)->Arg(1024);

void bm_block_soft_threshold(benchmark::State& state) {
  const Profile profile{{5, 64}, {4, 48}};
  Rng rng(4);
  MatrixTuple x = random_tuple(profile, rng);
  for (auto _ : state) {
    MatrixTuple out = block_soft_threshold(x, 0.3);
    benchmark::DoNotOptimize(out.block(0).data());
  }
}
BENCHMARK(bm_block_soft_threshold);

void bm_restricted_normal(benchmark::State& state) {
  const Index q = state.range(0);
  const Profile profile{{4, 32}, {3, 24}};
  MeasurementEnsemble e =
      sample_ensemble(profile, make_frame_family(profile, q, "dft"), Convention::ComplexCircular, 5);
  RestrictedOperator op(e, first_columns(profile, {2, 1}));
  Rng rng(6);
  Vector v(op.dim());
  for (Index i = 0; i < op.dim(); ++i) v(i) = rng.complex_normal();
  for (auto _ : state) {
    Vector w = op.normal_packed(v);
    benchmark::DoNotOptimize(w.data());
  }
}
BENCHMARK(bm_restricted_normal)->Arg(192)->Arg(384);

void bm_estimate_delta(benchmark::State& state) {
  const Index q = state.range(0);
  const Profile profile{{4, 32}, {3, 24}};
  MeasurementEnsemble e =
      sample_ensemble(profile, make_frame_family(profile, q, "dft"), Convention::ComplexCircular, 7);
  SupportPattern s = first_columns(profile, {2, 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_delta(e, s));
  }
}
BENCHMARK(bm_estimate_delta)->Arg(192)->Unit(benchmark::kMillisecond);

void bm_solve_l12(benchmark::State& state) {
  const Index q = state.range(0);
  const Profile profile{{4, 24}};
  MeasurementEnsemble e =
      sample_ensemble(profile, make_frame_family(profile, q, "dft"), Convention::ComplexCircular, 8);
  Rng rng(9);
  MatrixTuple z0 = MatrixTuple::zero(profile);
  for (Index r = 0; r < 4; ++r) {
    z0.block(0)(r, 1) = rng.complex_normal();
    z0.block(0)(r, 7) = rng.complex_normal();
  }
  Vector y = forward(e, z0);
  SolveOptions opts;
  opts.abs_tol = 1e-6;
  opts.max_iters = 2000;
  for (auto _ : state) {
    SolveReport r = solve_l12_eq(e, y, opts);
    benchmark::DoNotOptimize(r.objective);
  }
}
BENCHMARK(bm_solve_l12)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
