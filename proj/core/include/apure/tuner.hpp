#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apure/risk.hpp"

namespace apure {

enum class OracleKind { TruePred, TrueEst, ApurePred, ApureEst };

/// "true-pred", "true-est", "apure-pred", "apure-est".
std::string_view oracle_name(OracleKind kind);
OracleKind parse_oracle(std::string_view name);

/// Sample standard deviation (n - 1 denominator).
double sample_std(std::span<const double> values);

/// n_points log-spaced values from 1e-2 std(Y) to 1e4 std(Y), endpoints included.
std::vector<double> lambda_grid(std::span<const double> y, std::size_t n_points = 60);

struct RiskCurve {
  OracleKind oracle_kind = OracleKind::ApurePred;
  std::vector<double> lambdas;
  /// NaN marks a grid point whose evaluation failed.
  std::vector<double> values;
  std::vector<double> ci_halfwidths;
};

struct TuningResult {
  double lambda_star = 0.0;
  std::size_t index = 0;
  std::vector<double> x_hat_star;
  RiskCurve curve;
};

struct TuneOptions {
  std::size_t n_points = 60;
  /// Monte-Carlo probes per grid point for the APURE oracles.
  int n_mc = 10;
  std::uint64_t seed = 0;
  /// Finite-difference step; default_fd_epsilon(Y) when unset.
  std::optional<double> epsilon;
  /// Ground truth, required by the true-error oracles.
  std::optional<std::vector<double>> x_bar;
  /// Seed each solve with the previous grid point's state (ascending lambda).
  bool warm_start = true;
};

/// Every requested curve from one pass over the grid. Estimates and probes are
/// shared between oracles.
struct Sweep {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> estimates;  // empty where the solve failed
  std::vector<RiskCurve> curves;               // in the order requested
  std::vector<std::string> failures;           // one message per failed evaluation
};

Sweep sweep(std::span<const double> y, const Estimator& estimator, std::span<const double> alpha,
            std::span<const OracleKind> oracles, const TuneOptions& options = {});

/// Grid minimizer of curve `which`, ties broken toward the larger lambda.
/// Throws NumericalFailure if every point is invalid.
TuningResult select(const Sweep& sweep, std::size_t which);

TuningResult tune(std::span<const double> y, const Estimator& estimator,
                  std::span<const double> alpha, OracleKind oracle,
                  const TuneOptions& options = {});

/// `lambda,risk,ci_halfwidth` rows with round-trip float formatting.
void write_risk_curve_csv(std::ostream& out, const RiskCurve& curve);

}  // namespace apure
