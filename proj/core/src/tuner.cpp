#include "apure/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "apure/csv.hpp"
#include "apure/errors.hpp"

namespace apure {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool needs_truth(OracleKind kind) {
  return kind == OracleKind::TruePred || kind == OracleKind::TrueEst;
}

bool needs_probes(OracleKind kind) {
  return kind == OracleKind::ApurePred || kind == OracleKind::ApureEst;
}

}  // namespace

std::string_view oracle_name(OracleKind kind) {
  switch (kind) {
    case OracleKind::TruePred: return "true-pred";
    case OracleKind::TrueEst: return "true-est";
    case OracleKind::ApurePred: return "apure-pred";
    case OracleKind::ApureEst: return "apure-est";
  }
  return "unknown";
}

OracleKind parse_oracle(std::string_view name) {
  for (auto kind : {OracleKind::TruePred, OracleKind::TrueEst, OracleKind::ApurePred,
                    OracleKind::ApureEst}) {
    if (oracle_name(kind) == name) return kind;
  }
  throw InvalidParameter("unknown oracle '" + std::string(name) +
                         "' (expected true-pred, true-est, apure-pred or apure-est)");
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

std::vector<double> lambda_grid(std::span<const double> y, std::size_t n_points) {
  if (n_points < 2) throw InvalidParameter("lambda grid needs at least 2 points");
  const double sd = sample_std(y);
  if (!(sd > 0.0)) throw InvalidParameter("lambda grid needs data with positive standard deviation");
  constexpr double lo = -2.0;
  constexpr double hi = 4.0;
  std::vector<double> grid(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    grid[i] = sd * std::pow(10.0, e);
  }
  grid.front() = sd * 1e-2;
  grid.back() = sd * 1e4;
  return grid;
}

Sweep sweep(std::span<const double> y, const Estimator& estimator, std::span<const double> alpha,
            std::span<const OracleKind> oracles, const TuneOptions& options) {
  if (oracles.empty()) throw InvalidParameter("no oracle requested");
  if (alpha.size() != y.size()) throw InvalidParameter("alpha length does not match the data");
  const bool truth_needed = std::any_of(oracles.begin(), oracles.end(), needs_truth);
  const bool probes_needed = std::any_of(oracles.begin(), oracles.end(), needs_probes);
  if (truth_needed) {
    if (!options.x_bar) throw InvalidParameter("true-error oracles need the ground truth");
    if (options.x_bar->size() != y.size()) {
      throw InvalidParameter("ground truth length does not match the data");
    }
  }
  if (probes_needed && options.n_mc < 1) {
    throw InvalidParameter("number of Monte-Carlo probes must be at least 1");
  }

  Sweep result;
  result.lambdas = lambda_grid(y, options.n_points);
  const std::size_t n = result.lambdas.size();
  result.estimates.assign(n, {});
  for (auto kind : oracles) {
    RiskCurve curve;
    curve.oracle_kind = kind;
    curve.lambdas = result.lambdas;
    curve.values.assign(n, kNaN);
    curve.ci_halfwidths.assign(n, 0.0);
    result.curves.push_back(std::move(curve));
  }

  const auto psi = estimator.memory(y);
  const double epsilon = options.epsilon.value_or(default_fd_epsilon(y));
  std::optional<WarmStart> warm;
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = result.lambdas[i];
    std::vector<double> x;
    try {
      WarmStart state;
      x = estimator.evaluate(y, lambda, options.warm_start && warm ? &*warm : nullptr, &state);
      if (options.warm_start) warm = std::move(state);
    } catch (const std::exception& e) {
      result.failures.push_back("lambda=" + csv::format_double(lambda) + ": " + e.what());
      continue;
    }

    FdmcSamples samples;
    bool probes_ok = true;
    if (probes_needed) {
      try {
        samples = fdmc_samples(y, lambda, alpha, estimator, options.n_mc, epsilon, options.seed, x);
      } catch (const std::exception& e) {
        probes_ok = false;
        result.failures.push_back("lambda=" + csv::format_double(lambda) + ": " + e.what());
      }
    }

    for (auto& curve : result.curves) {
      switch (curve.oracle_kind) {
        case OracleKind::TruePred:
          curve.values[i] = true_prediction_error(x, *options.x_bar, psi);
          break;
        case OracleKind::TrueEst:
          curve.values[i] = true_estimation_error(x, *options.x_bar);
          break;
        case OracleKind::ApurePred:
        case OracleKind::ApureEst: {
          if (!probes_ok) break;
          const auto& draws = curve.oracle_kind == OracleKind::ApurePred ? samples.prediction
                                                                         : samples.estimation;
          if (draws.empty()) break;  // some Psi_t = 0: estimation risk undefined
          const auto value = summarize_draws(draws);
          if (std::isfinite(value.value)) {
            curve.values[i] = value.value;
            curve.ci_halfwidths[i] = value.ci_halfwidth;
          }
          break;
        }
      }
    }
    result.estimates[i] = std::move(x);
  }
  return result;
}

TuningResult select(const Sweep& sweep, std::size_t which) {
  if (which >= sweep.curves.size()) throw InvalidParameter("curve index out of range");
  const auto& curve = sweep.curves[which];
  std::size_t best = curve.values.size();
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    const double v = curve.values[i];
    if (std::isnan(v)) continue;
    if (best == curve.values.size() || v <= curve.values[best]) best = i;
  }
  if (best == curve.values.size()) {
    throw NumericalFailure("every grid point of the " + std::string(oracle_name(curve.oracle_kind)) +
                               " curve is invalid",
                           {});
  }
  TuningResult result;
  result.index = best;
  result.lambda_star = sweep.lambdas[best];
  result.x_hat_star = sweep.estimates[best];
  result.curve = curve;
  return result;
}

TuningResult tune(std::span<const double> y, const Estimator& estimator,
                  std::span<const double> alpha, OracleKind oracle, const TuneOptions& options) {
  const OracleKind kinds[] = {oracle};
  return select(sweep(y, estimator, alpha, kinds, options), 0);
}

void write_risk_curve_csv(std::ostream& out, const RiskCurve& curve) {
  out << "lambda,risk,ci_halfwidth\n";
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    out << csv::format_double(curve.lambdas[i]) << ',' << csv::format_double(curve.values[i])
        << ',' << csv::format_double(curve.ci_halfwidths[i]) << '\n';
  }
}

}  // namespace apure
