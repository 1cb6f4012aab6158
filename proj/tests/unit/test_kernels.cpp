#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "apure/errors.hpp"
#include "apure/kernels.hpp"

using namespace apure;

namespace {

// Simpson rule for the Gamma density over [a, b].
double gamma_mass(double shape, double scale, double a, double b, int n = 2000) {
  auto pdf = [&](double x) {
    if (x <= 0) return 0.0;
    return std::exp((shape - 1) * std::log(x) - x / scale - std::lgamma(shape) -
                    shape * std::log(scale));
  };
  const double h = (b - a) / n;
  double s = pdf(a) + pdf(b);
  for (int i = 1; i < n; ++i) s += pdf(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

}  // namespace

TEST(Kernels, GammaParametersFromMoments) {
  const auto p = gamma_moments_to_parameters(6.6, 3.5);
  EXPECT_NEAR(p.shape, 3.5559, 1e-4);
  EXPECT_NEAR(p.scale, 1.8561, 1e-4);
}

TEST(Kernels, SerialIntervalIsNormalized) {
  const auto k = gamma_serial_interval(6.6, 3.5, 25);
  ASSERT_EQ(k.horizon(), 25u);
  double total = 0;
  for (double w : k.weights()) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Kernels, SerialIntervalMatchesQuadrature) {
  const auto k = gamma_serial_interval(6.6, 3.5, 25);
  const double shape = (6.6 / 3.5) * (6.6 / 3.5), scale = 3.5 * 3.5 / 6.6;
  std::vector<double> masses(25);
  double total = 0;
  for (int s = 1; s <= 25; ++s) total += masses[s - 1] = gamma_mass(shape, scale, s - 1, s);
  for (int s = 1; s <= 25; ++s) EXPECT_NEAR(k[s], masses[s - 1] / total, 1e-9) << "s=" << s;
  const auto kmax = std::max_element(k.weights().begin(), k.weights().end()) - k.weights().begin();
  const auto omax = std::max_element(masses.begin(), masses.end()) - masses.begin();
  EXPECT_EQ(kmax, omax);
  EXPECT_EQ(kmax + 1, 5);  // frozen: mode of the discretized weights
}

TEST(Kernels, SerialIntervalRejectsBadParameters) {
  EXPECT_THROW(gamma_serial_interval(0, 3.5, 25), InvalidParameter);
  EXPECT_THROW(gamma_serial_interval(6.6, -1, 25), InvalidParameter);
  EXPECT_THROW(gamma_serial_interval(6.6, 3.5, 0), InvalidParameter);
}

TEST(Kernels, ConstructorValidates) {
  EXPECT_THROW(Kernel({0.5, 0.4}, Resolution::Daily), InvalidParameter);
  EXPECT_THROW(Kernel({1.5, -0.5}, Resolution::Daily), InvalidParameter);
  EXPECT_THROW(Kernel({}, Resolution::Daily), InvalidParameter);
  EXPECT_NO_THROW(Kernel({0.25, 0.75}, Resolution::Daily));
}

TEST(Kernels, WeeklyCoarsenUniformWeek) {
  const auto w = weekly_coarsen(Kernel::normalized(std::vector<double>(7, 1.0), Resolution::Daily));
  ASSERT_EQ(w.horizon(), 1u);
  EXPECT_NEAR(w[1], 1.0, 1e-15);
  EXPECT_EQ(w.resolution(), Resolution::Weekly);
}

TEST(Kernels, WeeklyCoarsenDirac) {
  std::vector<double> d(25, 0.0);
  d[0] = 1.0;
  const auto w = weekly_coarsen(Kernel(d, Resolution::Daily));
  ASSERT_EQ(w.horizon(), 4u);
  EXPECT_EQ(w[1], 1.0);
  EXPECT_EQ(w[2], 0.0);
  EXPECT_EQ(w[3], 0.0);
  EXPECT_EQ(w[4], 0.0);
}

TEST(Kernels, WeeklyCoarsenMatchesBlockSums) {
  const auto daily = gamma_serial_interval(6.6, 3.5, 25);
  const auto w = weekly_coarsen(daily);
  ASSERT_EQ(w.horizon(), 4u);
  const int blocks[4][2] = {{1, 7}, {8, 14}, {15, 21}, {22, 25}};
  double total = 0;
  double sums[4];
  for (int b = 0; b < 4; ++b) {
    sums[b] = 0;
    for (int s = blocks[b][0]; s <= blocks[b][1]; ++s) sums[b] += daily[s];
    total += sums[b];
  }
  for (int b = 0; b < 4; ++b) EXPECT_NEAR(w[b + 1], sums[b] / total, 1e-14);
}

TEST(Kernels, WeeklyCoarsenRejectsWeeklyInput) {
  EXPECT_THROW(weekly_coarsen(Kernel({1.0}, Resolution::Weekly)), InvalidParameter);
}

TEST(Kernels, MemoryOneStep) {
  const std::vector<double> y{3, 4};
  const auto psi = memory_vector(Kernel({1.0}, Resolution::Daily), 5.0, y);
  EXPECT_EQ(psi, (std::vector<double>{5, 3}));
}

TEST(Kernels, MemoryTruncatedTwoStep) {
  const std::vector<double> y{2, 4, 6};
  const auto psi = memory_vector(Kernel({0.5, 0.5}, Resolution::Daily), 10.0, y);
  ASSERT_EQ(psi.size(), 3u);
  EXPECT_DOUBLE_EQ(psi[0], 10);
  EXPECT_DOUBLE_EQ(psi[1], 1);
  EXPECT_DOUBLE_EQ(psi[2], 3);
}

TEST(Kernels, MemoryPaddedTwoStep) {
  const std::vector<double> y{2, 4, 6};
  const auto psi =
      memory_vector(Kernel({0.5, 0.5}, Resolution::Daily), 10.0, y, PreHistory::PadWithInitial);
  EXPECT_DOUBLE_EQ(psi[0], 10);
  EXPECT_DOUBLE_EQ(psi[1], 6);  // 0.5 * 2 + 0.5 * 10
  EXPECT_DOUBLE_EQ(psi[2], 3);
}

TEST(Kernels, MemoryOfConstantSeriesIsConstant) {
  const auto k = gamma_serial_interval(6.6, 3.5, 25);
  const std::vector<double> y(60, 42.0);
  const auto psi = memory_vector(k, 1.0, y);
  for (std::size_t t = 26; t < y.size(); ++t) EXPECT_NEAR(psi[t], 42.0, 1e-10);
  const auto padded = memory_vector(k, 42.0, y, PreHistory::PadWithInitial);
  for (double p : padded) EXPECT_NEAR(p, 42.0, 1e-10);
}

TEST(Kernels, MemoryHistoryOverloadAgrees) {
  const auto k = Kernel({0.2, 0.3, 0.5}, Resolution::Daily);
  History h{7.0, {1, 2, 3, 4, 5}};
  EXPECT_EQ(memory_vector(k, h), memory_vector(k, 7.0, h.values));
}

TEST(Kernels, CsvRoundTrip) {
  const auto k = gamma_serial_interval(6.6, 3.5, 25);
  std::stringstream ss;
  write_kernel_csv(ss, k);
  const auto back = read_kernel_csv(ss, Resolution::Daily);
  ASSERT_EQ(back.horizon(), k.horizon());
  for (std::size_t s = 1; s <= k.horizon(); ++s) EXPECT_NEAR(back[s], k[s], 1e-16);
}
