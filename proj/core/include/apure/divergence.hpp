#pragma once

#include <span>
#include <vector>

namespace apure {

/// Scalar Kullback-Leibler discrepancy d_KL(y | u): y ln(y/u) + u - y for
/// y, u > 0; u when y = 0 and u >= 0; +infinity otherwise.
double kl_divergence(double y, double u);

/// Sum over t of d_KL(Y_t / alpha_t | U_t / alpha_t) (scaled Poisson
/// negative log-likelihood up to constants). May return +infinity.
double kl_divergence(std::span<const double> y, std::span<const double> u,
                     std::span<const double> alpha);

/// Sum over t of (Y_t - U_t)^2 / alpha_t^2 (Gaussian noise of std alpha_t).
double gaussian_discrepancy(std::span<const double> y, std::span<const double> u,
                            std::span<const double> alpha);

/// Scalar Itakura-Saito discrepancy d_IS(y | alpha, u); +infinity unless y, u > 0.
double itakura_saito(double y, double alpha, double u);

/// Sum over t of d_IS(Y_t | alpha_t, U_t / alpha_t) (Gamma noise of shape alpha_t).
double itakura_saito(std::span<const double> y, std::span<const double> alpha,
                     std::span<const double> u);

/// Componentwise Y ./ Psi; throws DomainError if any Psi_t <= 0.
std::vector<double> ml_estimate(std::span<const double> y, std::span<const double> psi);

/// argmin_{x >= 0} (x - v)^2 / (2 step) + d_KL(y / alpha | x psi / alpha).
double kl_prox(double v, double step, double y, double psi, double alpha);

}  // namespace apure
