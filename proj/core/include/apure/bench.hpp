#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "apure/simulate.hpp"
#include "apure/solver.hpp"
#include "apure/tuner.hpp"

namespace apure {

struct BenchConfig {
  std::vector<double> alphas;
  int Q = 10;
  std::vector<OracleKind> oracles = {OracleKind::TrueEst, OracleKind::TruePred,
                                     OracleKind::ApurePred, OracleKind::ApureEst};
  std::uint64_t seed = 0;
  std::size_t n_points = 60;
  int n_mc = 10;
  std::optional<double> epsilon;
  SyntheticSetup setup;
  SolverConfig solver;
};

/// Error statistics of Q estimates of the same ground truth.
struct CellSummary {
  int completed = 0;
  int failed = 0;
  /// (1/Q) sum_q ||X_hat_q - X_bar||^2
  double mmse = 0.0;
  /// 1.96 * sample std of the errors / sqrt(Q)
  double ci = 0.0;
  /// 1.96 / sqrt(Q) * (1/Q) sum_q (e_q - mmse)^2
  double ci_paper_literal = 0.0;
  /// ||mean_q X_hat_q - X_bar||^2
  double bias = 0.0;
  /// (1/Q) sum_q ||X_hat_q - mean X_hat||^2
  double variance = 0.0;
};

/// Statistics over the given estimates; NaN fields when `estimates` is empty.
CellSummary summarize_cell(const std::vector<std::vector<double>>& estimates,
                           const std::vector<double>& x_bar);

struct BenchRun {
  std::size_t alpha_index = 0;
  int q = 0;
  bool ok = false;
  std::string error;
  /// Per oracle, in config order; NaN when that oracle failed.
  std::vector<double> lambda_star;
  std::vector<double> squared_error;
  std::vector<std::vector<double>> x_hat;
};

struct BenchReport {
  BenchConfig config;
  std::vector<double> x_bar;
  /// cells[a][o]: alpha index a, oracle index o.
  std::vector<std::vector<CellSummary>> cells;
  /// Ordered by (alpha index, q).
  std::vector<BenchRun> runs;
};

/// Q synthetic datasets per alpha (one substream per (alpha, q)), one shared
/// sweep per dataset for all oracles, then per-cell summaries. Runs execute in
/// parallel; the result does not depend on the thread count.
BenchReport run_benchmark(const BenchConfig& config,
                          const std::function<void(const BenchRun&)>& progress = {});

/// alpha,oracle,mmse,ci,ci_paper_literal,bias,variance,completed,failed
void write_bench_csv(std::ostream& out, const BenchReport& report);

/// Aligned text table with one row per oracle and one column per alpha.
void write_bench_table(std::ostream& out, const BenchReport& report);

}  // namespace apure
