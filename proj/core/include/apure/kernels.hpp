#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace apure {

enum class Resolution { Daily, Weekly };

/// Normalized memory kernel {psi_s}, s = 1..horizon (serial-interval weights).
class Kernel {
 public:
  /// Validates nonnegativity and normalization (sum within 1e-12 of 1).
  Kernel(std::vector<double> weights, Resolution resolution);

  /// Builds a kernel from arbitrary nonnegative weights by dividing by their sum.
  static Kernel normalized(std::vector<double> weights, Resolution resolution);

  std::size_t horizon() const noexcept { return weights_.size(); }
  Resolution resolution() const noexcept { return resolution_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// psi_s for 1-based lag s; zero beyond the horizon.
  double operator[](std::size_t lag) const noexcept {
    return (lag >= 1 && lag <= weights_.size()) ? weights_[lag - 1] : 0.0;
  }

 private:
  std::vector<double> weights_;
  Resolution resolution_;
};

inline constexpr double kNormalizationTolerance = 1e-12;

/// Observations Y_1..Y_T together with the initial state Y_0.
struct History {
  double y0 = 1.0;
  std::vector<double> values;
};

/// How lags reaching before t = 1 are treated when evaluating the memory.
enum class PreHistory {
  /// Literal truncated sum over s <= t-1, with Psi_1 = Y_0.
  Truncate,
  /// Y_t = Y_0 for all t <= 0, i.e. the full kernel is always used.
  PadWithInitial,
};

/// Daily discretization of a Gamma serial interval with the given mean and
/// standard deviation: psi_s = [F(s) - F(s-1)] / F(horizon).
Kernel gamma_serial_interval(double mean, double std_dev, std::size_t horizon);

/// Shape and scale of the Gamma law with the given mean and standard deviation.
struct GammaParameters {
  double shape;
  double scale;
};
GammaParameters gamma_moments_to_parameters(double mean, double std_dev);

/// Sums consecutive 7-day blocks of a daily kernel and renormalizes.
Kernel weekly_coarsen(const Kernel& daily);

/// Psi_t(Y) for t = 1..T under the linear memory model.
std::vector<double> memory_vector(const Kernel& kernel, const History& history,
                                  PreHistory rule = PreHistory::Truncate);

/// Same as memory_vector for a raw observation span.
std::vector<double> memory_vector(const Kernel& kernel, double y0, std::span<const double> values,
                                  PreHistory rule = PreHistory::Truncate);

/// Writes `s,weight` rows (with header) using round-trip float formatting.
void write_kernel_csv(std::ostream& out, const Kernel& kernel);

/// Reads the format produced by write_kernel_csv; renormalizes on load.
Kernel read_kernel_csv(std::istream& in, Resolution resolution);

}  // namespace apure
