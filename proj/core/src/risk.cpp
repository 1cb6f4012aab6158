#include "apure/risk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "apure/errors.hpp"
#include "apure/parallel.hpp"
#include "apure/random.hpp"

namespace apure {

namespace {

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) throw InvalidParameter(std::string(what) + " length does not match the data");
}

void require_nonzero_memory(std::span<const double> psi) {
  for (std::size_t t = 0; t < psi.size(); ++t) {
    if (psi[t] == 0.0) {
      throw DomainError("estimation risk needs Psi_t != 0 (t = " + std::to_string(t + 1) + ")");
    }
  }
}

double sum_y2_minus_alpha_y(std::span<const double> y, std::span<const double> alpha,
                            std::span<const double> weight_sq) {
  double total = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double term = y[t] * y[t] - alpha[t] * y[t];
    total += weight_sq.empty() ? term : term / weight_sq[t];
  }
  return total;
}

// Returns X_hat_t^{-t}(Y) for every t with Y_t > 0 (other entries are unused).
std::vector<double> shifted_components(std::span<const double> y, double lambda,
                                       std::span<const double> alpha, const Estimator& estimator,
                                       ExactDiagnostics* diagnostics) {
  const std::size_t T = y.size();
  std::vector<double> out(T, 0.0);
  std::atomic<int> clamped{0};
  parallel_for(T, [&](std::size_t t) {
    double shifted = y[t] - alpha[t];
    if (shifted < 0.0) {
      ++clamped;
      shifted = 0.0;
    }
    // The term is multiplied by Y_t, so a zero observation needs no solve.
    if (y[t] == 0.0) return;
    std::vector<double> y_shift(y.begin(), y.end());
    y_shift[t] = shifted;
    out[t] = estimator.evaluate(y_shift, lambda)[t];
  });
  if (diagnostics != nullptr) diagnostics->clamped += clamped.load();
  return out;
}

struct FdmcTerms {
  double pred = 0.0;
  double est = 0.0;
};

// Derivative terms <diag(alpha Psi) d, Y zeta> and <diag(alpha / Psi) d, Y zeta>.
FdmcTerms derivative_terms(std::span<const double> y, std::span<const double> alpha,
                           std::span<const double> psi, std::span<const double> d,
                           std::span<const double> zeta, bool with_estimation) {
  FdmcTerms terms;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double common = alpha[t] * d[t] * y[t] * zeta[t];
    terms.pred += common * psi[t];
    if (with_estimation) terms.est += common / psi[t];
  }
  return terms;
}

// Probe entries at zero observations only enter through off-diagonal terms of
// zero mean, so they are dropped; this keeps Y + eps zeta inside the domain.
std::vector<double> masked_probe(std::span<const double> y, std::vector<double> zeta) {
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t] == 0.0) zeta[t] = 0.0;
  }
  return zeta;
}

}  // namespace

// ---------------------------------------------------------------- MemoryRule

MemoryRule MemoryRule::fixed(std::vector<double> psi) {
  MemoryRule rule;
  rule.kind_ = Kind::Fixed;
  rule.psi_ = std::move(psi);
  return rule;
}

MemoryRule MemoryRule::linear(Kernel kernel, double y0, PreHistory pre_history) {
  MemoryRule rule;
  rule.kind_ = Kind::Linear;
  rule.kernel_ = std::move(kernel);
  rule.y0_ = y0;
  rule.pre_history_ = pre_history;
  return rule;
}

MemoryRule MemoryRule::linear_padded_with_first(Kernel kernel) {
  MemoryRule rule;
  rule.kind_ = Kind::PaddedWithFirst;
  rule.kernel_ = std::move(kernel);
  rule.pre_history_ = PreHistory::PadWithInitial;
  return rule;
}

std::vector<double> MemoryRule::operator()(std::span<const double> y) const {
  if (kind_ == Kind::Fixed) {
    require_length(psi_.size(), y.size(), "fixed memory");
    return psi_;
  }
  if (y.empty()) throw InvalidParameter("memory needs at least one observation");
  const double y0 = kind_ == Kind::PaddedWithFirst ? y[0] : y0_;
  return memory_vector(*kernel_, y0, y, pre_history_);
}

double MemoryRule::sensitivity_ratio(std::span<const double> y,
                                     std::span<const double> alpha) const {
  require_length(alpha.size(), y.size(), "alpha");
  if (kind_ == Kind::Fixed) return 0.0;
  const auto base = (*this)(y);
  double worst = 0.0;
  std::vector<double> bumped(y.begin(), y.end());
  // Psi is affine in Y, so a unit difference gives the exact partial derivatives.
  for (std::size_t t = 0; t < y.size(); ++t) {
    bumped[t] = y[t] + 1.0;
    const auto psi = (*this)(bumped);
    bumped[t] = y[t];
    for (std::size_t s = 0; s < y.size(); ++s) {
      const double change = std::abs((psi[s] - base[s]) * alpha[t]);
      if (change == 0.0) continue;
      if (base[s] == 0.0) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, change / std::abs(base[s]));
    }
  }
  return worst;
}

// ---------------------------------------------------------------- estimators

VariationalEstimator::VariationalEstimator(MemoryRule memory, std::vector<double> alpha,
                                           SolverConfig config)
    : Estimator(std::move(memory)), alpha_(std::move(alpha)), config_(std::move(config)) {}

std::vector<double> VariationalEstimator::evaluate(std::span<const double> y, double lambda,
                                                   const WarmStart* warm,
                                                   WarmStart* state) const {
  require_length(alpha_.size(), y.size(), "alpha");
  const auto psi = memory(y);
  auto result = estimate(y, psi, alpha_, lambda, config_, warm);
  if (state != nullptr) *state = result.warm_start();
  return std::move(result.x_hat);
}

ConstantEstimator::ConstantEstimator(MemoryRule memory, std::vector<double> value)
    : Estimator(std::move(memory)), value_(std::move(value)) {}

std::vector<double> ConstantEstimator::evaluate(std::span<const double> y, double,
                                                const WarmStart*, WarmStart*) const {
  require_length(value_.size(), y.size(), "constant estimate");
  return value_;
}

DiagonalLinearEstimator::DiagonalLinearEstimator(MemoryRule memory,
                                                 std::vector<double> coefficients)
    : Estimator(std::move(memory)), c_(std::move(coefficients)) {}

std::vector<double> DiagonalLinearEstimator::evaluate(std::span<const double> y, double,
                                                      const WarmStart*, WarmStart*) const {
  require_length(c_.size(), y.size(), "coefficient");
  std::vector<double> x(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) x[t] = c_[t] * y[t];
  return x;
}

LinearEstimator::LinearEstimator(MemoryRule memory, std::vector<double> matrix, std::size_t size)
    : Estimator(std::move(memory)), a_(std::move(matrix)), n_(size) {
  if (a_.size() != n_ * n_) throw InvalidParameter("linear estimator matrix must be square");
}

std::vector<double> LinearEstimator::evaluate(std::span<const double> y, double, const WarmStart*,
                                              WarmStart*) const {
  require_length(y.size(), n_, "matrix");
  std::vector<double> x(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) x[i] += a_[i * n_ + j] * y[j];
  }
  return x;
}

MovingAverageEstimator::MovingAverageEstimator(MemoryRule memory, std::size_t before,
                                               std::size_t after)
    : Estimator(std::move(memory)), before_(before), after_(after) {}

std::vector<double> MovingAverageEstimator::evaluate(std::span<const double> y, double,
                                                     const WarmStart*, WarmStart*) const {
  const auto psi = memory(y);
  const std::size_t T = y.size();
  std::vector<double> ratio(T);
  for (std::size_t t = 0; t < T; ++t) {
    if (!(psi[t] > 0.0)) throw DomainError("moving average needs Psi_t > 0");
    ratio[t] = y[t] / psi[t];
  }
  std::vector<double> x(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t lo = t >= before_ ? t - before_ : 0;
    const std::size_t hi = std::min(T - 1, t + after_);
    double sum = 0.0;
    for (std::size_t s = lo; s <= hi; ++s) sum += ratio[s];
    x[t] = sum / static_cast<double>(hi - lo + 1);
  }
  return x;
}

FunctionEstimator::FunctionEstimator(MemoryRule memory, Function f)
    : Estimator(std::move(memory)), f_(std::move(f)) {}

std::vector<double> FunctionEstimator::evaluate(std::span<const double> y, double lambda,
                                                const WarmStart*, WarmStart*) const {
  auto x = f_(y, lambda);
  require_length(x.size(), y.size(), "estimate");
  return x;
}

// ---------------------------------------------------------------- true errors

double true_prediction_error(std::span<const double> x_hat, std::span<const double> x_bar,
                             std::span<const double> psi) {
  require_length(x_bar.size(), x_hat.size(), "ground truth");
  require_length(psi.size(), x_hat.size(), "memory");
  double total = 0.0;
  for (std::size_t t = 0; t < x_hat.size(); ++t) {
    const double d = (x_hat[t] - x_bar[t]) * psi[t];
    total += d * d;
  }
  return total;
}

double true_estimation_error(std::span<const double> x_hat, std::span<const double> x_bar) {
  require_length(x_bar.size(), x_hat.size(), "ground truth");
  double total = 0.0;
  for (std::size_t t = 0; t < x_hat.size(); ++t) {
    const double d = x_hat[t] - x_bar[t];
    total += d * d;
  }
  return total;
}

// ---------------------------------------------------------------- exact APURE

double apure_pred_exact(std::span<const double> y, double lambda, std::span<const double> alpha,
                        const Estimator& estimator, ExactDiagnostics* diagnostics) {
  require_length(alpha.size(), y.size(), "alpha");
  const auto psi = estimator.memory(y);
  const auto x = estimator.evaluate(y, lambda);
  const auto x_shift = shifted_components(y, lambda, alpha, estimator, diagnostics);
  double fit = 0.0;
  double cross = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    fit += x[t] * psi[t] * x[t] * psi[t];
    cross += x_shift[t] * psi[t] * y[t];
  }
  return fit - 2.0 * cross + sum_y2_minus_alpha_y(y, alpha, {});
}

double apure_est_exact(std::span<const double> y, double lambda, std::span<const double> alpha,
                       const Estimator& estimator, ExactDiagnostics* diagnostics) {
  require_length(alpha.size(), y.size(), "alpha");
  const auto psi = estimator.memory(y);
  require_nonzero_memory(psi);
  const auto x = estimator.evaluate(y, lambda);
  const auto x_shift = shifted_components(y, lambda, alpha, estimator, diagnostics);
  std::vector<double> psi_sq(psi.size());
  double fit = 0.0;
  double cross = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    fit += x[t] * x[t];
    cross += x_shift[t] * y[t] / psi[t];
    psi_sq[t] = psi[t] * psi[t];
  }
  return fit - 2.0 * cross + sum_y2_minus_alpha_y(y, alpha, psi_sq);
}

// ---------------------------------------------------------------- FDMC

double default_fd_epsilon(std::span<const double> y) {
  if (y.empty()) throw InvalidParameter("finite-difference step needs data");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  return 1e-3 * std::max(1.0, mean);
}

std::vector<double> fdmc_directional_derivative(const Estimator& estimator,
                                                std::span<const double> y, double lambda,
                                                std::span<const double> zeta, double epsilon,
                                                const std::vector<double>* base) {
  if (!(epsilon > 0.0)) throw InvalidParameter("finite-difference step must be positive");
  require_length(zeta.size(), y.size(), "probe");
  std::vector<double> y_plus(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    y_plus[t] = y[t] + epsilon * zeta[t];
    if (y_plus[t] < 0.0) {
      throw DomainError("perturbed observation is negative (t = " + std::to_string(t + 1) +
                        "); reduce the finite-difference step");
    }
  }
  const auto x_plus = estimator.evaluate(y_plus, lambda);
  const auto x = base != nullptr ? *base : estimator.evaluate(y, lambda);
  require_length(x.size(), y.size(), "base estimate");
  std::vector<double> d(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) d[t] = (x_plus[t] - x[t]) / epsilon;
  return d;
}

double apure_pred_fdmc(std::span<const double> y, double lambda, std::span<const double> alpha,
                       const Estimator& estimator, std::span<const double> zeta, double epsilon,
                       const std::vector<double>* base) {
  require_length(alpha.size(), y.size(), "alpha");
  const auto psi = estimator.memory(y);
  const auto x = base != nullptr ? *base : estimator.evaluate(y, lambda);
  const auto probe = masked_probe(y, {zeta.begin(), zeta.end()});
  const auto d = fdmc_directional_derivative(estimator, y, lambda, probe, epsilon, &x);
  double fit = 0.0;
  double cross = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    fit += x[t] * psi[t] * x[t] * psi[t];
    cross += x[t] * psi[t] * y[t];
  }
  const auto terms = derivative_terms(y, alpha, psi, d, probe, false);
  return fit - 2.0 * cross + 2.0 * terms.pred + sum_y2_minus_alpha_y(y, alpha, {});
}

double apure_est_fdmc(std::span<const double> y, double lambda, std::span<const double> alpha,
                      const Estimator& estimator, std::span<const double> zeta, double epsilon,
                      const std::vector<double>* base) {
  require_length(alpha.size(), y.size(), "alpha");
  const auto psi = estimator.memory(y);
  require_nonzero_memory(psi);
  const auto x = base != nullptr ? *base : estimator.evaluate(y, lambda);
  const auto probe = masked_probe(y, {zeta.begin(), zeta.end()});
  const auto d = fdmc_directional_derivative(estimator, y, lambda, probe, epsilon, &x);
  std::vector<double> psi_sq(psi.size());
  double fit = 0.0;
  double cross = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    fit += x[t] * x[t];
    cross += x[t] * y[t] / psi[t];
    psi_sq[t] = psi[t] * psi[t];
  }
  const auto terms = derivative_terms(y, alpha, psi, d, probe, true);
  return fit - 2.0 * cross + 2.0 * terms.est + sum_y2_minus_alpha_y(y, alpha, psi_sq);
}

std::vector<double> probe_vector(std::uint64_t seed, std::size_t n, std::size_t length) {
  Rng rng = substream(seed, {0x7a657461ULL, n});
  return standard_normal_vector(rng, length);
}

FdmcSamples fdmc_samples(std::span<const double> y, double lambda, std::span<const double> alpha,
                         const Estimator& estimator, int n_mc, double epsilon, std::uint64_t seed,
                         const std::vector<double>& base) {
  if (n_mc < 1) throw InvalidParameter("number of Monte-Carlo probes must be at least 1");
  require_length(alpha.size(), y.size(), "alpha");
  require_length(base.size(), y.size(), "base estimate");
  const std::size_t T = y.size();
  const auto psi = estimator.memory(y);
  const bool with_estimation =
      std::none_of(psi.begin(), psi.end(), [](double p) { return p == 0.0; });

  double fit_pred = 0.0, cross_pred = 0.0, fit_est = 0.0, cross_est = 0.0;
  double const_pred = 0.0, const_est = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double x = base[t];
    fit_pred += x * psi[t] * x * psi[t];
    cross_pred += x * psi[t] * y[t];
    const double c = y[t] * y[t] - alpha[t] * y[t];
    const_pred += c;
    if (with_estimation) {
      fit_est += x * x;
      cross_est += x * y[t] / psi[t];
      const_est += c / (psi[t] * psi[t]);
    }
  }

  FdmcSamples samples;
  samples.prediction.resize(static_cast<std::size_t>(n_mc));
  if (with_estimation) samples.estimation.resize(static_cast<std::size_t>(n_mc));
  parallel_for(static_cast<std::size_t>(n_mc), [&](std::size_t n) {
    const auto probe = masked_probe(y, probe_vector(seed, n, T));
    const auto d = fdmc_directional_derivative(estimator, y, lambda, probe, epsilon, &base);
    const auto terms = derivative_terms(y, alpha, psi, d, probe, with_estimation);
    samples.prediction[n] = fit_pred - 2.0 * cross_pred + 2.0 * terms.pred + const_pred;
    if (with_estimation) {
      samples.estimation[n] = fit_est - 2.0 * cross_est + 2.0 * terms.est + const_est;
    }
  });
  return samples;
}

RiskValue summarize_draws(std::span<const double> draws) {
  if (draws.empty()) throw InvalidParameter("no Monte-Carlo draws to summarize");
  const double n = static_cast<double>(draws.size());
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  RiskValue value;
  value.value = mean;
  value.n_mc = static_cast<int>(draws.size());
  if (draws.size() > 1) {
    double ss = 0.0;
    for (double d : draws) ss += (d - mean) * (d - mean);
    value.ci_halfwidth = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return value;
}

RiskValue robustified(RiskKind kind, std::span<const double> y, double lambda,
                      std::span<const double> alpha, const Estimator& estimator, int n_mc,
                      double epsilon, std::uint64_t seed) {
  if (kind == RiskKind::Estimation) require_nonzero_memory(estimator.memory(y));
  const auto base = estimator.evaluate(y, lambda);
  const auto samples = fdmc_samples(y, lambda, alpha, estimator, n_mc, epsilon, seed, base);
  return summarize_draws(kind == RiskKind::Prediction ? samples.prediction : samples.estimation);
}

}  // namespace apure
