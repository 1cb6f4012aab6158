#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's numerical code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline long double kl(long double y, long double u) {
  if (y == 0) return u >= 0 ? u : std::numeric_limits<long double>::infinity();
  if (u <= 0) return std::numeric_limits<long double>::infinity();
  return y * std::log(y / u) + u - y;
}

/// Golden-section search of a unimodal f on [lo, hi], in long double.
inline long double golden_section(const std::function<long double(long double)>& f, long double lo,
                                  long double hi, int iterations = 200) {
  const long double r = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double a = lo, b = hi;
  long double c = b - r * (b - a), d = a + r * (b - a);
  long double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && b - a > 0; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  const long double mid = (a + b) / 2;
  // The bracket may end at the boundary 0 when the minimizer is there.
  return lo == 0 && f(lo) <= f(mid) ? lo : mid;
}

/// argmin_{x >= 0} (x - v)^2 / (2 tau) + d_KL(y / alpha | x psi / alpha).
/// A first golden-section pass locates the minimizer roughly; the second pass
/// compares objective differences from that point, written without
/// cancellation, so the flat bottom does not limit the resolution.
inline double prox_by_golden_section(double v, double tau, double y, double psi, double alpha) {
  const long double Y = y, P = psi, A = alpha, V = v, Tau = tau;
  auto f = [&](long double x) {
    return (x - V) * (x - V) / (2 * Tau) + kl(Y / A, x * P / A);
  };
  long double hi = std::max(1.0L, std::abs(V)) + Tau * P / A + 1;
  while (f(hi * 2) < f(hi)) hi *= 2;
  const long double c = golden_section(f, 0.0L, 2 * hi, 400);
  auto g = [&](long double x) {
    long double d = (x - c) * (x + c - 2 * V) / (2 * Tau) + (x - c) * P / A;
    if (Y > 0) {
      if (x <= 0) return std::numeric_limits<long double>::infinity();
      d += Y / A * std::log1p((c - x) / x);
    }
    return d;
  };
  const long double width = std::max(1e-6L, 1e-6L * c);
  const long double lo = std::max(0.0L, c - width);
  return static_cast<double>(golden_section(g, lo, c + width, 400));
}

/// Dense (T-2) x T second-difference matrix, row-major.
inline std::vector<double> dense_second_difference(std::size_t T) {
  std::vector<double> D((T - 2) * T, 0.0);
  for (std::size_t j = 0; j + 2 < T; ++j) {
    D[j * T + j] = 1.0;
    D[j * T + j + 1] = -2.0;
    D[j * T + j + 2] = 1.0;
  }
  return D;
}

/// Unpenalized KL data term plus lambda ||D2 x||_1, computed directly.
inline double penalized_kl(const std::vector<double>& y, const std::vector<double>& psi,
                           double lambda, const std::vector<double>& x) {
  long double total = 0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (x[t] < 0) return std::numeric_limits<double>::infinity();
    total += kl(y[t], static_cast<long double>(x[t]) * psi[t]);
  }
  for (std::size_t t = 0; t + 2 < x.size(); ++t) {
    total += lambda * std::abs(static_cast<long double>(x[t + 2]) - 2.0L * x[t + 1] + x[t]);
  }
  return static_cast<double>(total);
}

/// Minimum of penalized_kl over [0, upper]^4: dense grid, then pattern search
/// with a shrinking step. Directions are all of {-1, 0, 1}^4 in two bases: the
/// canonical one and x = z1 (1,1,1,1) + z2 (0,1,2,3) + z3 e1 + z4 e4, in which
/// D2 x = (z3, z4) so the kinks of the penalty are coordinate hyperplanes.
inline std::pair<std::vector<double>, double> brute_force_t4(const std::vector<double>& y,
                                                              const std::vector<double>& psi,
                                                              double lambda, double upper,
                                                              int grid = 41) {
  std::vector<double> best(4, 0.0), x(4);
  double best_value = std::numeric_limits<double>::infinity();
  const double h = upper / (grid - 1);
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b)
      for (int c = 0; c < grid; ++c)
        for (int d = 0; d < grid; ++d) {
          x = {a * h, b * h, c * h, d * h};
          const double v = penalized_kl(y, psi, lambda, x);
          if (v < best_value) {
            best_value = v;
            best = x;
          }
        }
  std::vector<std::array<double, 4>> directions;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d) {
          if (!(a || b || c || d)) continue;
          directions.push_back({double(a), double(b), double(c), double(d)});
          directions.push_back({double(a + c), double(a + b), double(a + 2 * b),
                                double(a + 3 * b + d)});
        }
  double step = h;
  while (step > 1e-13 * std::max(1.0, upper)) {
    bool improved = false;
    for (const auto& dir : directions) {
      for (int k = 0; k < 4; ++k) x[k] = best[k] + step * dir[k];
      const double v = penalized_kl(y, psi, lambda, x);
      if (v < best_value) {
        best_value = v;
        best = x;
        improved = true;
      }
    }
    if (!improved) step /= 2;
  }
  return {best, best_value};
}

/// Sample mean and standard error.
inline std::pair<double, double> mean_and_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0;
  for (double x : v) mean += x / n;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

}  // namespace oracle
