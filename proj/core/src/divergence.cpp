#include "apure/divergence.hpp"

#include <cmath>
#include <limits>

#include "apure/errors.hpp"

namespace apure {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_length(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw InvalidParameter("vector lengths must match");
}

}  // namespace

double kl_divergence(double y, double u) {
  if (y > 0.0 && u > 0.0) return y * std::log(y / u) + u - y;
  if (y == 0.0 && u >= 0.0) return u;
  return kInf;
}

double kl_divergence(std::span<const double> y, std::span<const double> u,
                     std::span<const double> alpha) {
  require_same_length(y.size(), u.size(), alpha.size());
  double total = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double term = kl_divergence(y[t] / alpha[t], u[t] / alpha[t]);
    if (term == kInf) return kInf;
    total += term;
  }
  return total;
}

double gaussian_discrepancy(std::span<const double> y, std::span<const double> u,
                            std::span<const double> alpha) {
  require_same_length(y.size(), u.size(), alpha.size());
  double total = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double r = (y[t] - u[t]) / alpha[t];
    total += r * r;
  }
  return total;
}

double itakura_saito(double y, double alpha, double u) {
  if (!(y > 0.0) || !(u > 0.0)) return kInf;
  const double ratio = y / u;
  return ratio - alpha * std::log(ratio) + std::lgamma(alpha) + std::log(y);
}

double itakura_saito(std::span<const double> y, std::span<const double> alpha,
                     std::span<const double> u) {
  require_same_length(y.size(), u.size(), alpha.size());
  double total = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double term = itakura_saito(y[t], alpha[t], u[t] / alpha[t]);
    if (term == kInf) return kInf;
    total += term;
  }
  return total;
}

std::vector<double> ml_estimate(std::span<const double> y, std::span<const double> psi) {
  if (y.size() != psi.size()) throw InvalidParameter("vector lengths must match");
  std::vector<double> x(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (!(psi[t] > 0.0)) {
      throw DomainError("maximum likelihood estimate needs Psi_t > 0 (t = " +
                        std::to_string(t + 1) + ")");
    }
    x[t] = y[t] / psi[t];
  }
  return x;
}

double kl_prox(double v, double step, double y, double psi, double alpha) {
  if (!(step > 0.0) || !(psi > 0.0) || !(alpha > 0.0)) {
    throw InvalidParameter("kl_prox needs positive step, psi and alpha");
  }
  if (!(y >= 0.0)) throw InvalidParameter("kl_prox needs a nonnegative observation");
  // First-order condition: x^2 - (v - step psi / alpha) x - step y / alpha = 0.
  const double b = v - step * psi / alpha;
  if (y == 0.0) return b > 0.0 ? b : 0.0;
  const double c = step * y / alpha;
  const double disc = std::sqrt(b * b + 4.0 * c);
  // Cancellation-free form of the positive root when b < 0.
  return b >= 0.0 ? 0.5 * (b + disc) : 2.0 * c / (disc - b);
}

}  // namespace apure
