#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "apure/bench.hpp"
#include "apure/errors.hpp"
#include "apure/parallel.hpp"

using namespace apure;

TEST(Summary, PerfectEstimatesGiveZeros) {
  const std::vector<double> x_bar{1, 2, 3};
  const auto s = summarize_cell({x_bar, x_bar, x_bar}, x_bar);
  EXPECT_EQ(s.completed, 3);
  EXPECT_EQ(s.mmse, 0.0);
  EXPECT_EQ(s.bias, 0.0);
  EXPECT_EQ(s.variance, 0.0);
  EXPECT_EQ(s.ci, 0.0);
}

TEST(Summary, HandComputedScalarCase) {
  // Errors 1, 4, 9 around a zero truth.
  const auto s = summarize_cell({{1}, {2}, {3}}, {0});
  EXPECT_NEAR(s.mmse, 14.0 / 3.0, 1e-14);
  EXPECT_NEAR(s.ci, 1.96 * 7.0 / 3.0, 1e-13);
  EXPECT_NEAR(s.ci_paper_literal, 1.96 / std::sqrt(3.0) * 98.0 / 9.0, 1e-13);
  EXPECT_NEAR(s.bias, 4.0, 1e-14);
  EXPECT_NEAR(s.variance, 2.0 / 3.0, 1e-14);
}

TEST(Summary, BiasVarianceDecomposition) {
  const std::vector<double> x_bar{1.0, 0.5, 2.0, 1.5};
  const std::vector<std::vector<double>> est{
      {1.1, 0.4, 2.3, 1.2}, {0.7, 0.9, 1.8, 1.6}, {1.3, 0.2, 2.2, 1.1}, {0.9, 0.6, 2.5, 1.9}};
  const auto s = summarize_cell(est, x_bar);
  EXPECT_NEAR(s.mmse, s.bias + s.variance, 1e-14);
}

TEST(Summary, EmptyAndSingle) {
  const auto empty = summarize_cell({}, {1.0});
  EXPECT_TRUE(std::isnan(empty.mmse));
  const auto single = summarize_cell({{2.0}}, {1.0});
  EXPECT_EQ(single.mmse, 1.0);
  EXPECT_EQ(single.ci, 0.0);
}

TEST(Benchmark, Validation) {
  BenchConfig cfg;
  cfg.alphas = {100};
  cfg.Q = 1;
  EXPECT_THROW(run_benchmark(cfg), InvalidParameter);
  cfg.Q = 2;
  cfg.alphas = {};
  EXPECT_THROW(run_benchmark(cfg), InvalidParameter);
  cfg.alphas = {-1};
  EXPECT_THROW(run_benchmark(cfg), InvalidParameter);
  cfg.alphas = {100};
  cfg.oracles = {};
  EXPECT_THROW(run_benchmark(cfg), InvalidParameter);
}

TEST(Benchmark, SmallRunIsDeterministic) {
  BenchConfig cfg;
  cfg.alphas = {1e3, 1e2};
  cfg.Q = 2;
  cfg.n_points = 8;
  cfg.n_mc = 2;
  cfg.seed = 31;
  int progress_calls = 0;
  const auto a = run_benchmark(cfg, [&](const BenchRun&) { ++progress_calls; });
  const auto b = run_benchmark(cfg);
  EXPECT_EQ(progress_calls, 4);
  ASSERT_EQ(a.runs.size(), 4u);
  EXPECT_EQ(a.runs[1].alpha_index, 0u);
  EXPECT_EQ(a.runs[1].q, 1);
  std::ostringstream ca, cb, ta;
  write_bench_csv(ca, a);
  write_bench_csv(cb, b);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ca.str().substr(0, ca.str().find('\n')),
            "alpha,oracle,mmse,ci,ci_paper_literal,bias,variance,completed,failed");
  write_bench_table(ta, a);
  EXPECT_NE(ta.str().find("apure-pred"), std::string::npos);
  for (const auto& run : a.runs) EXPECT_TRUE(run.ok) << run.error;
  for (const auto& row : a.cells)
    for (const auto& cell : row) {
      EXPECT_EQ(cell.completed, 2);
      EXPECT_NEAR(cell.mmse, cell.bias + cell.variance, 1e-10 * (1 + cell.mmse));
    }
}

TEST(Benchmark, ThreadCountDoesNotMatter) {
  BenchConfig cfg;
  cfg.alphas = {1e3};
  cfg.Q = 3;
  cfg.n_points = 6;
  cfg.n_mc = 2;
  cfg.seed = 8;
  cfg.oracles = {OracleKind::ApurePred};
  const unsigned before = max_threads();
  set_max_threads(1);
  const auto serial = run_benchmark(cfg);
  set_max_threads(4);
  const auto threaded = run_benchmark(cfg);
  set_max_threads(before);
  for (std::size_t i = 0; i < serial.runs.size(); ++i)
    EXPECT_EQ(serial.runs[i].x_hat, threaded.runs[i].x_hat);
}
