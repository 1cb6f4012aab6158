#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "apure/errors.hpp"
#include "apure/risk.hpp"
#include "oracles.hpp"

using namespace apure;

namespace {

const std::vector<double> kY{12, 30, 7, 0, 22, 15};
const std::vector<double> kPsi{10, 20, 9, 4, 18, 16};
const std::vector<double> kAlpha{2, 3, 1, 2, 4, 5};
const std::vector<double> kC{0.5, 1.2, 0.9, 2.0, 0.3, 1.1};

double sum_y2_ay(const std::vector<double>& w2) {
  double s = 0;
  for (std::size_t t = 0; t < kY.size(); ++t)
    s += (kY[t] * kY[t] - kAlpha[t] * kY[t]) / (w2.empty() ? 1.0 : w2[t]);
  return s;
}

std::vector<double> psi_sq() {
  std::vector<double> p(kPsi.size());
  for (std::size_t t = 0; t < p.size(); ++t) p[t] = kPsi[t] * kPsi[t];
  return p;
}

}  // namespace

TEST(TrueErrors, Examples) {
  const std::vector<double> x{1, 2, 3}, psi{3, 3, 3};
  EXPECT_EQ(true_prediction_error(x, x, psi), 0.0);
  EXPECT_EQ(true_estimation_error(x, x), 0.0);
  const std::vector<double> shifted{1, 3, 3};
  EXPECT_DOUBLE_EQ(true_prediction_error(shifted, x, psi), 9.0);
  EXPECT_DOUBLE_EQ(true_estimation_error(shifted, x), 1.0);
}

TEST(TrueErrors, MatchDirectSum) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> a(40), b(40), p(40);
  for (std::size_t t = 0; t < 40; ++t) a[t] = n(rng), b[t] = n(rng), p[t] = std::abs(n(rng));
  double pred = 0, est = 0;
  for (std::size_t t = 0; t < 40; ++t) {
    pred += std::pow((a[t] - b[t]) * p[t], 2);
    est += std::pow(a[t] - b[t], 2);
  }
  EXPECT_NEAR(true_prediction_error(a, b, p), pred, 1e-12 * pred);
  EXPECT_NEAR(true_estimation_error(a, b), est, 1e-12 * est);
}

TEST(ApureExact, ZeroEstimator) {
  ConstantEstimator zero(MemoryRule::fixed(kPsi), std::vector<double>(kY.size(), 0.0));
  EXPECT_NEAR(apure_pred_exact(kY, 1.0, kAlpha, zero), sum_y2_ay({}), 1e-10);
  EXPECT_NEAR(apure_est_exact(kY, 1.0, kAlpha, zero), sum_y2_ay(psi_sq()), 1e-12);
}

TEST(ApureExact, ConstantEstimator) {
  const double c = 1.3;
  ConstantEstimator est(MemoryRule::fixed(kPsi), std::vector<double>(kY.size(), c));
  double fit = 0, cross = 0, fit_e = 0, cross_e = 0;
  for (std::size_t t = 0; t < kY.size(); ++t) {
    fit += c * c * kPsi[t] * kPsi[t];
    cross += c * kPsi[t] * kY[t];
    fit_e += c * c;
    cross_e += c * kY[t] / kPsi[t];
  }
  EXPECT_NEAR(apure_pred_exact(kY, 0.0, kAlpha, est), fit - 2 * cross + sum_y2_ay({}), 1e-9);
  EXPECT_NEAR(apure_est_exact(kY, 0.0, kAlpha, est), fit_e - 2 * cross_e + sum_y2_ay(psi_sq()),
              1e-10);
}

TEST(ApureExact, DiagonalLinearEstimator) {
  DiagonalLinearEstimator est(MemoryRule::fixed(kPsi), kC);
  // Removing one count replaces Y_t by Y_t - alpha_t in the t-th component.
  double pred = 0, e = 0;
  for (std::size_t t = 0; t < kY.size(); ++t) {
    const double xt = kC[t] * kY[t], shifted = kC[t] * (kY[t] - kAlpha[t]);
    pred += xt * xt * kPsi[t] * kPsi[t] - 2 * shifted * kPsi[t] * kY[t];
    e += xt * xt - 2 * shifted * kY[t] / kPsi[t];
  }
  EXPECT_NEAR(apure_pred_exact(kY, 0.0, kAlpha, est), pred + sum_y2_ay({}), 1e-10);
  EXPECT_NEAR(apure_est_exact(kY, 0.0, kAlpha, est), e + sum_y2_ay(psi_sq()), 1e-10);
}

TEST(ApureExact, ClampsNegativeShifts) {
  DiagonalLinearEstimator est(MemoryRule::fixed({5, 5, 5}), {1, 1, 1});
  const std::vector<double> y{1, 10, 0.5}, a{2, 2, 2};
  ExactDiagnostics diag;
  const double v = apure_pred_exact(y, 0.0, a, est, &diag);
  EXPECT_EQ(diag.clamped, 2);
  // Shifted components: max(Y - alpha, 0) = [0, 8, 0].
  const double expected = 25 * (1 + 100 + 0.25) - 2 * (0 + 8 * 5 * 10 + 0) +
                          (1 - 2) + (100 - 20) + (0.25 - 1);
  EXPECT_NEAR(v, expected, 1e-10);
}

TEST(ApureExact, EstimationNeedsNonzeroMemory) {
  ConstantEstimator est(MemoryRule::fixed({1, 0, 1}), {1, 1, 1});
  const std::vector<double> y{1, 2, 3}, a{1, 1, 1};
  EXPECT_THROW(apure_est_exact(y, 0.0, a, est), DomainError);
  const std::vector<double> zeta{1, 1, 1};
  EXPECT_THROW(apure_est_fdmc(y, 0.0, a, est, zeta, 1e-3), DomainError);
}

TEST(Fdmc, LinearEstimatorDerivativeIsExact) {
  const std::size_t T = kY.size();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<double> A(T * T), zeta(T);
  for (auto& v : A) v = n(rng);
  for (auto& v : zeta) v = n(rng);
  LinearEstimator est(MemoryRule::fixed(kPsi), A, T);
  std::vector<double> az(T, 0.0);
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t j = 0; j < T; ++j) az[i] += A[i * T + j] * zeta[j];
  for (double eps : {1e-3, 1e-1}) {
    const auto d = fdmc_directional_derivative(est, kY, 0.0, zeta, eps);
    for (std::size_t t = 0; t < T; ++t) EXPECT_NEAR(d[t], az[t], 1e-10);
  }
}

TEST(Fdmc, ConstantEstimatorMatchesExact) {
  ConstantEstimator est(MemoryRule::fixed(kPsi), std::vector<double>(kY.size(), 0.7));
  auto zeta = probe_vector(3, 0, kY.size());
  zeta[3] = 0.0;  // Y_4 = 0 must not be pushed below zero
  EXPECT_EQ(fdmc_directional_derivative(est, kY, 0.0, zeta, 1e-3),
            std::vector<double>(kY.size(), 0.0));
  EXPECT_NEAR(apure_pred_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-3),
              apure_pred_exact(kY, 0.0, kAlpha, est), 1e-9);
  EXPECT_NEAR(apure_est_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-3),
              apure_est_exact(kY, 0.0, kAlpha, est), 1e-10);
}

TEST(Fdmc, ZeroEstimator) {
  ConstantEstimator est(MemoryRule::fixed(kPsi), std::vector<double>(kY.size(), 0.0));
  const auto zeta = probe_vector(3, 1, kY.size());
  EXPECT_NEAR(apure_pred_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-3), sum_y2_ay({}), 1e-10);
  EXPECT_NEAR(apure_est_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-3), sum_y2_ay(psi_sq()), 1e-12);
}

TEST(Fdmc, DiagonalLinearSingleProbeFormula) {
  DiagonalLinearEstimator est(MemoryRule::fixed(kPsi), kC);
  const auto zeta = probe_vector(5, 2, kY.size());
  double pred = 0, e = 0;
  for (std::size_t t = 0; t < kY.size(); ++t) {
    const double xt = kC[t] * kY[t];
    const double z = kY[t] == 0 ? 0.0 : zeta[t];
    const double deriv = 2 * kAlpha[t] * kC[t] * z * z * kY[t];
    pred += xt * xt * kPsi[t] * kPsi[t] - 2 * xt * kPsi[t] * kY[t] + deriv * kPsi[t];
    e += xt * xt - 2 * xt * kY[t] / kPsi[t] + deriv / kPsi[t];
  }
  EXPECT_NEAR(apure_pred_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-2), pred + sum_y2_ay({}), 1e-8);
  EXPECT_NEAR(apure_est_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-2), e + sum_y2_ay(psi_sq()), 1e-9);
}

TEST(Fdmc, DiagonalLinearMeanMatchesExact) {
  DiagonalLinearEstimator est(MemoryRule::fixed(kPsi), kC);
  const auto base = est.evaluate(kY, 0.0);
  const auto s = fdmc_samples(kY, 0.0, kAlpha, est, 4000, 1e-3, 17, base);
  const auto [mp, sep] = oracle::mean_and_se(s.prediction);
  const auto [me, see] = oracle::mean_and_se(s.estimation);
  EXPECT_NEAR(mp, apure_pred_exact(kY, 0.0, kAlpha, est), 3 * sep);
  EXPECT_NEAR(me, apure_est_exact(kY, 0.0, kAlpha, est), 3 * see);
}

TEST(Fdmc, StepHalvingIsConsistentForLinearMaps) {
  DiagonalLinearEstimator est(MemoryRule::fixed(kPsi), kC);
  const auto zeta = probe_vector(9, 0, kY.size());
  EXPECT_NEAR(apure_pred_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-2),
              apure_pred_fdmc(kY, 0.0, kAlpha, est, zeta, 5e-3), 1e-7);
}

TEST(Fdmc, SamplesAgreeWithSingleProbeCalls) {
  DiagonalLinearEstimator est(MemoryRule::fixed(kPsi), kC);
  const auto base = est.evaluate(kY, 0.0);
  const auto s = fdmc_samples(kY, 0.0, kAlpha, est, 3, 1e-3, 21, base);
  for (std::size_t n = 0; n < 3; ++n) {
    const auto zeta = probe_vector(21, n, kY.size());
    EXPECT_NEAR(s.prediction[n], apure_pred_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-3), 1e-8);
    EXPECT_NEAR(s.estimation[n], apure_est_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-3), 1e-9);
  }
}

TEST(Fdmc, NegativePerturbationIsDomainError) {
  DiagonalLinearEstimator est(MemoryRule::fixed({1, 1, 1}), {1, 1, 1});
  const std::vector<double> y{0.001, 1, 1}, zeta{-1, 0, 0};
  EXPECT_THROW(fdmc_directional_derivative(est, y, 0.0, zeta, 0.01), DomainError);
}

TEST(Fdmc, DefaultEpsilon) {
  const std::vector<double> small{0.1, 0.2}, big{1000, 3000};
  EXPECT_DOUBLE_EQ(default_fd_epsilon(small), 1e-3);
  EXPECT_DOUBLE_EQ(default_fd_epsilon(big), 2.0);
}

TEST(Robustified, SingleDrawHasNoInterval) {
  DiagonalLinearEstimator est(MemoryRule::fixed(kPsi), kC);
  const auto r = robustified(RiskKind::Prediction, kY, 0.0, kAlpha, est, 1, 1e-3, 4);
  EXPECT_EQ(r.n_mc, 1);
  EXPECT_EQ(r.ci_halfwidth, 0.0);
  const auto zeta = probe_vector(4, 0, kY.size());
  EXPECT_NEAR(r.value, apure_pred_fdmc(kY, 0.0, kAlpha, est, zeta, 1e-3), 1e-8);
}

TEST(Robustified, ConstantEstimatorHasNoSpread) {
  ConstantEstimator est(MemoryRule::fixed(kPsi), std::vector<double>(kY.size(), 0.4));
  const auto r = robustified(RiskKind::Estimation, kY, 0.0, kAlpha, est, 10, 1e-3, 4);
  EXPECT_EQ(r.n_mc, 10);
  EXPECT_NEAR(r.ci_halfwidth, 0.0, 1e-12);
}

TEST(Robustified, SummarizeDraws) {
  const std::vector<double> d{1, 2, 3, 4};
  const auto r = summarize_draws(d);
  EXPECT_DOUBLE_EQ(r.value, 2.5);
  EXPECT_NEAR(r.ci_halfwidth, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(Memory, RulesAndSensitivity) {
  const Kernel k({0.5, 0.5}, Resolution::Daily);
  const std::vector<double> y{2, 4, 6};
  EXPECT_EQ(MemoryRule::linear(k, 10, PreHistory::Truncate)(y), (std::vector<double>{10, 1, 3}));
  EXPECT_EQ(MemoryRule::linear_padded_with_first(k)(y), (std::vector<double>{2, 2, 3}));
  EXPECT_FALSE(MemoryRule::fixed({1, 1, 1}).data_dependent());
  EXPECT_TRUE(MemoryRule::linear_padded_with_first(k).data_dependent());
  const std::vector<double> a{1, 1, 1};
  // The padding repeats Y_1, so dPsi_1/dY_1 = dPsi_2/dY_1 = 1 against Psi = 2.
  EXPECT_NEAR(MemoryRule::linear_padded_with_first(k).sensitivity_ratio(y, a), 0.5, 1e-15);
  EXPECT_EQ(MemoryRule::fixed({1, 1, 1}).sensitivity_ratio(y, a), 0.0);
}

TEST(Estimators, MovingAverage) {
  MovingAverageEstimator est(MemoryRule::fixed({1, 2, 4, 1}), 1, 0);
  const std::vector<double> y{2, 4, 4, 3};
  const auto x = est.evaluate(y, 0.0);
  EXPECT_EQ(x, (std::vector<double>{2, 2, 1.5, 2}));
}
