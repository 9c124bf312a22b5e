#include <benchmark/benchmark.h>

#include <random>

#include "skcone/cone.hpp"
#include "skcone/homogeneous.hpp"
#include "skcone/jet.hpp"
#include "skcone/verify.hpp"

using namespace skcone;

namespace {

const PrepotentialAst& stu() {
  static const auto ast = parse_prepotential("z1*z2*z3/z0", 4);
  return ast;
}

CVec stu_point() {
  CVec z(4);
  z << cplx(1.05, 0.02), cplx(0.03, 0.97), cplx(-0.02, 1.04), cplx(0.01, 1.01);
  return z;
}

}  // namespace

static void BM_EvalJet(benchmark::State& state) {
  const auto z = stu_point();
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval_jet(stu(), z, order));
}
BENCHMARK(BM_EvalJet)->DenseRange(0, 4);

static void BM_DomainSample(benchmark::State& state) {
  const auto z = stu_point();
  for (auto _ : state) benchmark::DoNotOptimize(domain_sample(stu(), z));
}
BENCHMARK(BM_DomainSample);

static void BM_FlatHessian(benchmark::State& state) {
  const auto z = stu_point();
  for (auto _ : state) benchmark::DoNotOptimize(flat_hessian_of_k(stu(), z));
}
BENCHMARK(BM_FlatHessian);

static void BM_FlatHessianFd(benchmark::State& state) {
  const auto z = stu_point();
  for (auto _ : state) benchmark::DoNotOptimize(flat_hessian_of_k_fd(stu(), z));
}
BENCHMARK(BM_FlatHessianFd);

static void BM_InvertFlat(benchmark::State& state) {
  const auto z = stu_point();
  const RVec target = domain_sample(stu(), z).flat;
  CVec seed(4);
  seed << 1.0, cplx(0, 1), cplx(0, 1), cplx(0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(invert_flat_coords(stu(), target, seed));
}
BENCHMARK(BM_InvertFlat);

static void BM_SasakiResiduals(benchmark::State& state) {
  const auto sph = project_to_sphere(stu(), stu_point());
  const auto pairs = default_tangent_pairs(sph);
  for (auto _ : state) benchmark::DoNotOptimize(sasaki_residuals(stu(), sph.u, pairs));
}
BENCHMARK(BM_SasakiResiduals)->Unit(benchmark::kMicrosecond);

static void BM_QuarticE6(benchmark::State& state) {
  const auto qc = QuarticCase::make_E6();
  std::mt19937_64 rng(1);
  const CVec v = random_vector(qc, rng);
  for (auto _ : state) benchmark::DoNotOptimize(quartic_eval(qc, v));
}
BENCHMARK(BM_QuarticE6);

static void BM_LieInvarianceE6(benchmark::State& state) {
  const auto qc = QuarticCase::make_E6();
  std::mt19937_64 rng(2);
  const CVec v = random_vector(qc, rng);
  const auto gen = random_generator(qc, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lie_invariance_residual(qc, v, gen));
}
BENCHMARK(BM_LieInvarianceE6);

static void BM_RunSuiteStu(benchmark::State& state) {
  SuiteConfig cfg;
  cfg.prepotential = "z1*z2*z3/z0";
  cfg.n_vars = 4;
  cfg.sample_count = 8;
  cfg.base_point = stu_point();
  cfg.sample_radius = 0.1;
  cfg.checks = {"all"};
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_suite(cfg, threads));
}
BENCHMARK(BM_RunSuiteStu)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
