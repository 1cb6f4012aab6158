#include "apure/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "apure/errors.hpp"

namespace apure {

double sample_scaled_poisson(double intensity, double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw InvalidParameter("scale parameter alpha must be positive");
  if (!(intensity > 0.0)) return 0.0;
  // libstdc++ draws by inversion for small means and by exact rejection otherwise.
  std::poisson_distribution<long long> poisson(intensity / alpha);
  return alpha * static_cast<double>(poisson(rng));
}

double sample_observation(NoiseFamily family, double mean, double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw InvalidParameter("noise parameter alpha must be positive");
  switch (family) {
    case NoiseFamily::ScaledPoisson:
      return sample_scaled_poisson(mean, alpha, rng);
    case NoiseFamily::Gamma: {
      if (!(mean > 0.0)) return 0.0;
      std::gamma_distribution<double> gamma(alpha, mean / alpha);
      return gamma(rng);
    }
    case NoiseFamily::Gaussian: {
      std::normal_distribution<double> normal(mean, alpha);
      return std::max(0.0, normal(rng));
    }
  }
  return 0.0;
}

Simulation simulate(const ReproductionPath& path, const Kernel& kernel, double y0,
                    const NoiseSpec& noise, Rng& rng, SimulationOptions options) {
  const std::size_t T = path.values.size();
  if (T < 1) throw InvalidParameter("reproduction path must be nonempty");
  if (noise.alpha.size() != T) {
    throw InvalidParameter("noise alpha length must match the reproduction path length");
  }
  if (!(y0 > 0.0)) throw InvalidParameter("initial state y0 must be positive");
  for (double x : path.values) {
    if (!(x >= 0.0)) throw InvalidParameter("reproduction path must be nonnegative");
  }

  Simulation sim;
  sim.history.y0 = y0;
  sim.history.values.assign(T, 0.0);
  sim.memory.assign(T, 0.0);
  const auto psi = kernel.weights();
  for (std::size_t t = 1; t <= T; ++t) {
    double memory = 0.0;
    if (t == 1 && options.pre_history == PreHistory::Truncate) {
      memory = y0;
    } else {
      for (std::size_t s = 1; s <= psi.size(); ++s) {
        if (s <= t - 1) {
          memory += psi[s - 1] * sim.history.values[t - 1 - s];
        } else if (options.pre_history == PreHistory::PadWithInitial) {
          memory += psi[s - 1] * y0;
        } else {
          break;
        }
      }
    }
    sim.memory[t - 1] = memory;
    sim.history.values[t - 1] =
        sample_observation(noise.family, path.values[t - 1] * memory, noise.alpha[t - 1], rng);
  }
  return sim;
}

Simulation simulate(const ReproductionPath& path, const Kernel& kernel, double y0,
                    const NoiseSpec& noise, std::uint64_t seed, SimulationOptions options) {
  Rng rng = substream(seed, {});
  return simulate(path, kernel, y0, noise, rng, options);
}

ReproductionPath piecewise_linear_path(const std::vector<std::pair<double, double>>& breakpoints,
                                       std::size_t T) {
  if (breakpoints.empty()) throw InvalidParameter("at least one breakpoint is required");
  if (T < 1) throw InvalidParameter("T must be at least 1");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const auto [t, v] = breakpoints[i];
    if (t < 1.0 || t > static_cast<double>(T)) {
      throw InvalidParameter("breakpoint time outside [1, T]");
    }
    if (!(v >= 0.0)) throw InvalidParameter("breakpoint values must be nonnegative");
    if (i > 0 && !(t > breakpoints[i - 1].first)) {
      throw InvalidParameter("breakpoints must be strictly increasing in time");
    }
  }
  ReproductionPath path;
  path.values.resize(T);
  std::size_t segment = 0;
  for (std::size_t t = 1; t <= T; ++t) {
    const double time = static_cast<double>(t);
    if (time <= breakpoints.front().first) {
      path.values[t - 1] = breakpoints.front().second;
      continue;
    }
    if (time >= breakpoints.back().first) {
      path.values[t - 1] = breakpoints.back().second;
      continue;
    }
    while (breakpoints[segment + 1].first < time) ++segment;
    const auto [t0, v0] = breakpoints[segment];
    const auto [t1, v1] = breakpoints[segment + 1];
    const double w = (time - t0) / (t1 - t0);
    path.values[t - 1] = (1.0 - w) * v0 + w * v1;
  }
  return path;
}

std::vector<std::pair<double, double>> SyntheticSetup::default_breakpoints() {
  return {{1, 1.3},  {5, 1.3},  {9, 0.7},  {14, 0.7}, {18, 1.9}, {30, 1.7},
          {34, 0.9}, {42, 0.8}, {46, 1.4}, {54, 1.3}, {58, 0.7}, {70, 0.8}};
}

Kernel SyntheticSetup::kernel() const { return gamma_serial_interval(serial_mean, serial_std, horizon); }

ReproductionPath SyntheticSetup::path() const { return piecewise_linear_path(breakpoints, T); }

}  // namespace apure
