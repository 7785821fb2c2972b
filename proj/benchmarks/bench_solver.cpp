#include <benchmark/benchmark.h>

#include "sdarl/datagen.hpp"
#include "sdarl/linalg.hpp"
#include "sdarl/rng.hpp"
#include "sdarl/solver.hpp"
#include "sdarl/tuning.hpp"

namespace {

sdarl::Dataset linear_instance(sdarl::Index n, sdarl::Index p, sdarl::Index k) {
  sdarl::GenSpec gen;
  gen.n = n;
  gen.p = p;
  gen.k = k;
  gen.rho = 0.2;
  gen.signal_ratio = 100.0;
  gen.seed = 42;
  return sdarl::make_dataset(gen);
}

void BM_TopTSelect(benchmark::State& state) {
  const sdarl::Index p = state.range(0);
  sdarl::rng::Stream stream(11);
  Eigen::VectorXd u = stream.normal_vector(p);
  for (auto _ : state) {
    auto sel = sdarl::top_t_select(u, p / 50);
    benchmark::DoNotOptimize(sel.indices.data());
  }
}
BENCHMARK(BM_TopTSelect)->Arg(10000)->Arg(100000);

void BM_GradientLinear(benchmark::State& state) {
  sdarl::Dataset data = linear_instance(500, state.range(0), 20);
  sdarl::LinearLoss loss(data.design, data.response);
  for (auto _ : state) {
    Eigen::VectorXd g = loss.gradient(data.true_coef);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_GradientLinear)->Arg(1000)->Arg(5000);

void BM_FitSdarlLinear(benchmark::State& state) {
  sdarl::Dataset data = linear_instance(500, 1000, state.range(0));
  sdarl::LinearLoss loss(data.design, data.response);
  sdarl::SolverConfig cfg;
  cfg.target_size = state.range(0);
  for (auto _ : state) {
    sdarl::FitResult fit = sdarl::fit_sdarl(loss, cfg);
    benchmark::DoNotOptimize(fit.beta.values.data());
  }
}
BENCHMARK(BM_FitSdarlLinear)->Arg(10)->Arg(20)->Arg(40);

void BM_FitFixedStepLinear(benchmark::State& state) {
  sdarl::Dataset data = linear_instance(500, 1000, state.range(0));
  sdarl::LinearLoss loss(data.design, data.response);
  sdarl::SolverConfig cfg;
  cfg.target_size = state.range(0);
  for (auto _ : state) {
    sdarl::FitResult fit = sdarl::fit_fixed_step(loss, cfg);
    benchmark::DoNotOptimize(fit.beta.values.data());
  }
}
BENCHMARK(BM_FitFixedStepLinear)->Arg(10)->Arg(20)->Arg(40);

void BM_RestrictedNewtonLogistic(benchmark::State& state) {
  sdarl::GenSpec gen;
  gen.model = sdarl::Model::logistic;
  gen.n = 300;
  gen.p = 2000;
  gen.k = 10;
  gen.rho = 0.2;
  gen.signal_ratio = 100.0;
  gen.seed = 42;
  sdarl::Dataset data = sdarl::make_dataset(gen);
  sdarl::LogisticLoss loss(data.design, data.response);
  for (auto _ : state) {
    sdarl::RestrictedFit fit = loss.minimize_restricted(data.true_support);
    benchmark::DoNotOptimize(fit.beta.values.data());
  }
}
BENCHMARK(BM_RestrictedNewtonLogistic);

void BM_AsdarlSweep(benchmark::State& state) {
  sdarl::Dataset data = linear_instance(400, 800, 10);
  sdarl::LinearLoss loss(data.design, data.response);
  sdarl::TuningConfig tuning;
  tuning.alpha = 5;
  for (auto _ : state) {
    sdarl::SolutionPath path = sdarl::fit_asdarl(loss, tuning);
    benchmark::DoNotOptimize(path.selected);
  }
}
BENCHMARK(BM_AsdarlSweep);

}  // namespace

BENCHMARK_MAIN();
