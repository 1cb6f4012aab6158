#include "apure/bench.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

#include "apure/csv.hpp"
#include "apure/errors.hpp"
#include "apure/parallel.hpp"
#include "apure/random.hpp"
#include "apure/risk.hpp"

namespace apure {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) sum += (a[t] - b[t]) * (a[t] - b[t]);
  return sum;
}

BenchRun run_one(const BenchConfig& config, const Kernel& kernel,
                 const std::vector<double>& x_bar, std::size_t a, int q) {
  BenchRun run;
  run.alpha_index = a;
  run.q = q;
  const std::size_t n_oracles = config.oracles.size();
  run.lambda_star.assign(n_oracles, kNaN);
  run.squared_error.assign(n_oracles, kNaN);
  run.x_hat.assign(n_oracles, {});
  try {
    const double alpha = config.alphas[a];
    const std::size_t T = x_bar.size();
    Rng rng = substream(config.seed, {a, static_cast<std::uint64_t>(q)});
    const auto sim = simulate(ReproductionPath{x_bar}, kernel, config.setup.y0,
                              NoiseSpec::constant(NoiseFamily::ScaledPoisson, alpha, T), rng,
                              {config.setup.pre_history});
    const auto& y = sim.history.values;
    const std::vector<double> alpha_vec(T, alpha);
    VariationalEstimator estimator(
        MemoryRule::linear(kernel, config.setup.y0, config.setup.pre_history), alpha_vec,
        config.solver);
    TuneOptions options;
    options.n_points = config.n_points;
    options.n_mc = config.n_mc;
    options.seed = rng();
    options.epsilon = config.epsilon;
    options.x_bar = x_bar;
    const auto swept = sweep(y, estimator, alpha_vec, config.oracles, options);
    std::string errors;
    for (std::size_t o = 0; o < n_oracles; ++o) {
      try {
        auto tuned = select(swept, o);
        run.lambda_star[o] = tuned.lambda_star;
        run.squared_error[o] = squared_distance(tuned.x_hat_star, x_bar);
        run.x_hat[o] = std::move(tuned.x_hat_star);
      } catch (const std::exception& e) {
        errors += std::string(errors.empty() ? "" : "; ") + e.what();
      }
    }
    run.ok = errors.empty();
    run.error = errors;
  } catch (const std::exception& e) {
    run.ok = false;
    run.error = e.what();
  }
  return run;
}

}  // namespace

CellSummary summarize_cell(const std::vector<std::vector<double>>& estimates,
                           const std::vector<double>& x_bar) {
  CellSummary s;
  s.completed = static_cast<int>(estimates.size());
  if (estimates.empty()) {
    s.mmse = s.ci = s.ci_paper_literal = s.bias = s.variance = kNaN;
    return s;
  }
  const double Q = static_cast<double>(estimates.size());
  std::vector<double> errors;
  std::vector<double> mean(x_bar.size(), 0.0);
  for (const auto& x : estimates) {
    if (x.size() != x_bar.size()) throw InvalidParameter("estimate length does not match truth");
    errors.push_back(squared_distance(x, x_bar));
    for (std::size_t t = 0; t < x.size(); ++t) mean[t] += x[t] / Q;
  }
  for (double e : errors) s.mmse += e / Q;
  double spread = 0.0;
  for (double e : errors) spread += (e - s.mmse) * (e - s.mmse);
  s.ci = errors.size() > 1 ? 1.96 * std::sqrt(spread / (Q - 1.0)) / std::sqrt(Q) : 0.0;
  s.ci_paper_literal = 1.96 / std::sqrt(Q) * spread / Q;
  s.bias = squared_distance(mean, x_bar);
  for (const auto& x : estimates) s.variance += squared_distance(x, mean) / Q;
  return s;
}

BenchReport run_benchmark(const BenchConfig& config,
                          const std::function<void(const BenchRun&)>& progress) {
  if (config.alphas.empty()) throw InvalidParameter("no alpha values");
  for (double a : config.alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidParameter("alpha values must be positive");
  }
  if (config.Q < 2) throw InvalidParameter("Q must be at least 2");
  if (config.oracles.empty()) throw InvalidParameter("no oracle requested");

  BenchReport report;
  report.config = config;
  report.x_bar = config.setup.path().values;
  const Kernel kernel = config.setup.kernel();
  const std::size_t n_alpha = config.alphas.size();
  const auto Q = static_cast<std::size_t>(config.Q);

  report.runs.resize(n_alpha * Q);
  std::mutex progress_mutex;
  parallel_for(n_alpha * Q, [&](std::size_t i) {
    report.runs[i] = run_one(config, kernel, report.x_bar, i / Q, static_cast<int>(i % Q));
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(report.runs[i]);
    }
  });

  report.cells.assign(n_alpha, std::vector<CellSummary>(config.oracles.size()));
  for (std::size_t a = 0; a < n_alpha; ++a) {
    for (std::size_t o = 0; o < config.oracles.size(); ++o) {
      std::vector<std::vector<double>> estimates;
      int failed = 0;
      for (std::size_t q = 0; q < Q; ++q) {
        const auto& run = report.runs[a * Q + q];
        if (run.x_hat[o].empty()) {
          ++failed;
        } else {
          estimates.push_back(run.x_hat[o]);
        }
      }
      report.cells[a][o] = summarize_cell(estimates, report.x_bar);
      report.cells[a][o].failed = failed;
    }
  }
  return report;
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
  out << "alpha,oracle,mmse,ci,ci_paper_literal,bias,variance,completed,failed\n";
  for (std::size_t a = 0; a < report.cells.size(); ++a) {
    for (std::size_t o = 0; o < report.cells[a].size(); ++o) {
      const auto& c = report.cells[a][o];
      out << csv::format_double(report.config.alphas[a]) << ','
          << oracle_name(report.config.oracles[o]) << ',' << csv::format_double(c.mmse) << ','
          << csv::format_double(c.ci) << ',' << csv::format_double(c.ci_paper_literal) << ','
          << csv::format_double(c.bias) << ',' << csv::format_double(c.variance) << ','
          << c.completed << ',' << c.failed << '\n';
    }
  }
}

void write_bench_table(std::ostream& out, const BenchReport& report) {
  constexpr int kWidth = 18;
  out << std::left << std::setw(12) << "oracle";
  for (double alpha : report.config.alphas) {
    std::ostringstream head;
    head << "log10a=" << std::setprecision(3) << std::log10(alpha);
    out << std::setw(kWidth) << head.str();
  }
  out << '\n';
  for (std::size_t o = 0; o < report.config.oracles.size(); ++o) {
    out << std::setw(12) << oracle_name(report.config.oracles[o]);
    for (std::size_t a = 0; a < report.cells.size(); ++a) {
      const auto& c = report.cells[a][o];
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << c.mmse << " +- " << c.ci;
      if (c.failed > 0) cell << " (" << c.failed << "x)";
      out << std::setw(kWidth) << cell.str();
    }
    out << '\n';
  }
}

}  // namespace apure
