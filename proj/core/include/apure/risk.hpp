#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "apure/kernels.hpp"
#include "apure/solver.hpp"

namespace apure {

/// How Psi(Y) is computed from the observations.
class MemoryRule {
 public:
  /// Psi does not depend on Y.
  static MemoryRule fixed(std::vector<double> psi);
  /// Linear memory with a known initial state.
  static MemoryRule linear(Kernel kernel, double y0, PreHistory rule);
  /// Linear memory whose pre-history is padded with the first observation.
  static MemoryRule linear_padded_with_first(Kernel kernel);

  std::vector<double> operator()(std::span<const double> y) const;
  bool data_dependent() const noexcept { return kind_ != Kind::Fixed; }

  /// max over t, s of |dPsi_s/dY_t * alpha_t| / |Psi_s|. Small values mean the
  /// memory barely reacts to a single observation.
  double sensitivity_ratio(std::span<const double> y, std::span<const double> alpha) const;

 private:
  enum class Kind { Fixed, Linear, PaddedWithFirst };
  Kind kind_ = Kind::Fixed;
  std::vector<double> psi_;
  std::optional<Kernel> kernel_;
  double y0_ = 0.0;
  PreHistory pre_history_ = PreHistory::Truncate;
};

/// A deterministic map (Y, lambda) -> X_hat together with its memory rule.
/// Implementations must be safe to call concurrently.
class Estimator {
 public:
  explicit Estimator(MemoryRule memory) : memory_(std::move(memory)) {}
  virtual ~Estimator() = default;

  std::vector<double> memory(std::span<const double> y) const { return memory_(y); }
  const MemoryRule& memory_rule() const noexcept { return memory_; }

  /// `warm` may seed iterative solvers; `state` receives their final state.
  virtual std::vector<double> evaluate(std::span<const double> y, double lambda,
                                       const WarmStart* warm = nullptr,
                                       WarmStart* state = nullptr) const = 0;

 private:
  MemoryRule memory_;
};

/// Penalized KL estimator solved by apure::estimate with Psi = memory(Y).
class VariationalEstimator final : public Estimator {
 public:
  VariationalEstimator(MemoryRule memory, std::vector<double> alpha, SolverConfig config = {});
  std::vector<double> evaluate(std::span<const double> y, double lambda,
                               const WarmStart* warm = nullptr,
                               WarmStart* state = nullptr) const override;
  const SolverConfig& config() const noexcept { return config_; }

 private:
  std::vector<double> alpha_;
  SolverConfig config_;
};

/// X_hat = c, ignoring Y and lambda.
class ConstantEstimator final : public Estimator {
 public:
  ConstantEstimator(MemoryRule memory, std::vector<double> value);
  std::vector<double> evaluate(std::span<const double> y, double lambda,
                               const WarmStart* = nullptr,
                               WarmStart* = nullptr) const override;

 private:
  std::vector<double> value_;
};

/// X_hat = c .* Y.
class DiagonalLinearEstimator final : public Estimator {
 public:
  DiagonalLinearEstimator(MemoryRule memory, std::vector<double> coefficients);
  std::vector<double> evaluate(std::span<const double> y, double lambda,
                               const WarmStart* = nullptr,
                               WarmStart* = nullptr) const override;

 private:
  std::vector<double> c_;
};

/// X_hat = A Y with A stored row-major (T x T).
class LinearEstimator final : public Estimator {
 public:
  LinearEstimator(MemoryRule memory, std::vector<double> matrix, std::size_t size);
  std::vector<double> evaluate(std::span<const double> y, double lambda,
                               const WarmStart* = nullptr,
                               WarmStart* = nullptr) const override;

 private:
  std::vector<double> a_;
  std::size_t n_;
};

/// X_hat_t = mean of Y_s / Psi_s(Y) over s in [t - before, t + after] (clipped).
/// With after = 0 the estimate at t only uses observations up to t.
class MovingAverageEstimator final : public Estimator {
 public:
  MovingAverageEstimator(MemoryRule memory, std::size_t before, std::size_t after);
  std::vector<double> evaluate(std::span<const double> y, double lambda,
                               const WarmStart* = nullptr,
                               WarmStart* = nullptr) const override;

 private:
  std::size_t before_, after_;
};

/// Wraps an arbitrary deterministic function of (Y, lambda).
class FunctionEstimator final : public Estimator {
 public:
  using Function = std::function<std::vector<double>(std::span<const double>, double)>;
  FunctionEstimator(MemoryRule memory, Function f);
  std::vector<double> evaluate(std::span<const double> y, double lambda,
                               const WarmStart* = nullptr,
                               WarmStart* = nullptr) const override;

 private:
  Function f_;
};

enum class RiskKind { Prediction, Estimation };

struct RiskValue {
  double value = 0.0;
  /// 1.96 * sample std / sqrt(n_mc); 0 for a single draw or a non-random value.
  double ci_halfwidth = 0.0;
  int n_mc = 1;
};

/// ||x_hat .* psi - x_bar .* psi||^2
double true_prediction_error(std::span<const double> x_hat, std::span<const double> x_bar,
                             std::span<const double> psi);
/// ||x_hat - x_bar||^2
double true_estimation_error(std::span<const double> x_hat, std::span<const double> x_bar);

/// Counters filled by the exact estimators.
struct ExactDiagnostics {
  /// Shifted observations Y_t - alpha_t that were negative and set to 0.
  int clamped = 0;
};

/// Exact prediction risk estimate; T + 1 estimator evaluations.
double apure_pred_exact(std::span<const double> y, double lambda, std::span<const double> alpha,
                        const Estimator& estimator, ExactDiagnostics* diagnostics = nullptr);
/// Exact estimation risk estimate; requires Psi_t(Y) != 0.
double apure_est_exact(std::span<const double> y, double lambda, std::span<const double> alpha,
                       const Estimator& estimator, ExactDiagnostics* diagnostics = nullptr);

/// Default finite-difference step 1e-3 * max(1, mean(Y)).
double default_fd_epsilon(std::span<const double> y);

/// (X_hat(Y + eps zeta) - X_hat(Y)) / eps. Pass `base` = X_hat(Y) to save a solve.
/// Throws DomainError if Y + eps zeta has a negative entry.
std::vector<double> fdmc_directional_derivative(const Estimator& estimator,
                                                std::span<const double> y, double lambda,
                                                std::span<const double> zeta, double epsilon,
                                                const std::vector<double>* base = nullptr);

/// Finite-difference Monte-Carlo risk estimates for one probe zeta.
double apure_pred_fdmc(std::span<const double> y, double lambda, std::span<const double> alpha,
                       const Estimator& estimator, std::span<const double> zeta, double epsilon,
                       const std::vector<double>* base = nullptr);
double apure_est_fdmc(std::span<const double> y, double lambda, std::span<const double> alpha,
                      const Estimator& estimator, std::span<const double> zeta, double epsilon,
                      const std::vector<double>* base = nullptr);

/// Probe number n under a master seed. It does not depend on lambda, so a risk
/// curve uses the same probes at every grid point.
std::vector<double> probe_vector(std::uint64_t seed, std::size_t n, std::size_t length);

/// Prediction and estimation values for N probes sharing one base solve.
/// `estimation` is empty when some Psi_t(Y) is 0.
struct FdmcSamples {
  std::vector<double> prediction;
  std::vector<double> estimation;
};
FdmcSamples fdmc_samples(std::span<const double> y, double lambda, std::span<const double> alpha,
                         const Estimator& estimator, int n_mc, double epsilon, std::uint64_t seed,
                         const std::vector<double>& base);

/// Mean, 1.96 * sample std / sqrt(N) and N of a set of draws.
RiskValue summarize_draws(std::span<const double> draws);

/// Average of N finite-difference estimates (N + 1 estimator evaluations).
RiskValue robustified(RiskKind kind, std::span<const double> y, double lambda,
                      std::span<const double> alpha, const Estimator& estimator, int n_mc,
                      double epsilon, std::uint64_t seed);

}  // namespace apure
