#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "apure/kernels.hpp"
#include "apure/random.hpp"

namespace apure {

enum class NoiseFamily { Gaussian, ScaledPoisson, Gamma };

/// Noise law B_alpha(U) with mean U. alpha is the standard deviation for Gaussian
/// noise, the scale for scaled Poisson noise and the shape for Gamma noise.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::ScaledPoisson;
  std::vector<double> alpha;

  static NoiseSpec constant(NoiseFamily family, double alpha, std::size_t length) {
    return {family, std::vector<double>(length, alpha)};
  }
};

/// Ground-truth reproduction coefficient X_bar_1..X_bar_T (nonnegative).
struct ReproductionPath {
  std::vector<double> values;
};

/// alpha * Poisson(intensity / alpha); exactly 0 when intensity <= 0.
double sample_scaled_poisson(double intensity, double alpha, Rng& rng);

/// One draw of Y_t given its conditional mean, for any family.
double sample_observation(NoiseFamily family, double mean, double alpha, Rng& rng);

struct SimulationOptions {
  PreHistory pre_history = PreHistory::Truncate;
};

struct Simulation {
  History history;
  std::vector<double> memory;  // Psi_t(Y) used for each draw
};

/// Sequentially draws Y_t ~ B_alpha_t(X_bar_t * Psi_t(Y)). Deterministic given seed.
Simulation simulate(const ReproductionPath& path, const Kernel& kernel, double y0,
                    const NoiseSpec& noise, std::uint64_t seed, SimulationOptions options = {});

/// Same as simulate() with an explicit generator.
Simulation simulate(const ReproductionPath& path, const Kernel& kernel, double y0,
                    const NoiseSpec& noise, Rng& rng, SimulationOptions options = {});

/// Linear interpolation through 1-based (t, value) breakpoints, constant
/// extrapolation outside them.
ReproductionPath piecewise_linear_path(const std::vector<std::pair<double, double>>& breakpoints,
                                       std::size_t T);

/// Synthetic benchmark defaults (T = 70, Y_0 = 3395, Gamma(6.6, 3.5) daily
/// kernel truncated at 25 days).
struct SyntheticSetup {
  std::size_t T = 70;
  double y0 = 3395.0;
  double serial_mean = 6.6;
  double serial_std = 3.5;
  std::size_t horizon = 25;
  PreHistory pre_history = PreHistory::PadWithInitial;
  std::vector<std::pair<double, double>> breakpoints = default_breakpoints();

  static std::vector<std::pair<double, double>> default_breakpoints();

  Kernel kernel() const;
  ReproductionPath path() const;
};

}  // namespace apure
