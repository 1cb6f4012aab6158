#include <benchmark/benchmark.h>

#include <cmath>

#include "apure/divergence.hpp"
#include "apure/risk.hpp"
#include "apure/simulate.hpp"
#include "apure/solver.hpp"
#include "apure/tuner.hpp"

namespace {

struct Data {
  apure::SyntheticSetup setup;
  std::vector<double> y, psi, alpha;
};

const Data& data() {
  static const Data d = [] {
    Data d;
    const auto sim = apure::simulate(
        d.setup.path(), d.setup.kernel(), d.setup.y0,
        apure::NoiseSpec::constant(apure::NoiseFamily::ScaledPoisson, 1e3, d.setup.T), 1,
        {d.setup.pre_history});
    d.y = sim.history.values;
    d.psi = sim.memory;
    d.alpha.assign(d.setup.T, 1e3);
    return d;
  }();
  return d;
}

void BM_KlProx(benchmark::State& state) {
  double v = 0.3;
  for (auto _ : state) {
    v = apure::kl_prox(v + 1.0, 0.5, 3.0, 2.0, 1.5);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_KlProx);

void BM_MemoryVector(benchmark::State& state) {
  const auto& d = data();
  const auto k = d.setup.kernel();
  for (auto _ : state) benchmark::DoNotOptimize(apure::memory_vector(k, d.setup.y0, d.y));
}
BENCHMARK(BM_MemoryVector);

void BM_InteriorPoint(benchmark::State& state) {
  const auto& d = data();
  const double lambda = apure::sample_std(d.y) * std::pow(10.0, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(apure::estimate(d.y, d.psi, d.alpha, lambda));
}
BENCHMARK(BM_InteriorPoint)->DenseRange(-2, 4, 2)->Unit(benchmark::kMicrosecond);

void BM_ChambollePock(benchmark::State& state) {
  const auto& d = data();
  apure::SolverConfig cfg;
  cfg.method = apure::SolverMethod::ChambollePock;
  const double lambda = apure::sample_std(d.y);
  for (auto _ : state) benchmark::DoNotOptimize(apure::estimate(d.y, d.psi, d.alpha, lambda, cfg));
}
BENCHMARK(BM_ChambollePock)->Unit(benchmark::kMillisecond);

void BM_FdmcSamples(benchmark::State& state) {
  const auto& d = data();
  apure::VariationalEstimator est(
      apure::MemoryRule::linear(d.setup.kernel(), d.setup.y0, d.setup.pre_history), d.alpha);
  const double lambda = apure::sample_std(d.y);
  const auto base = est.evaluate(d.y, lambda);
  const double eps = apure::default_fd_epsilon(d.y);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apure::fdmc_samples(d.y, lambda, d.alpha, est,
                                                 static_cast<int>(state.range(0)), eps, 7, base));
  }
}
BENCHMARK(BM_FdmcSamples)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ExactApure(benchmark::State& state) {
  const auto& d = data();
  apure::VariationalEstimator est(
      apure::MemoryRule::linear(d.setup.kernel(), d.setup.y0, d.setup.pre_history), d.alpha);
  const double lambda = apure::sample_std(d.y);
  for (auto _ : state) benchmark::DoNotOptimize(apure::apure_pred_exact(d.y, lambda, d.alpha, est));
}
BENCHMARK(BM_ExactApure)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
