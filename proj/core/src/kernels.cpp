#include "apure/kernels.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "apure/csv.hpp"
#include "apure/errors.hpp"

namespace apure {

namespace {

double kahan_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

Kernel::Kernel(std::vector<double> weights, Resolution resolution)
    : weights_(std::move(weights)), resolution_(resolution) {
  if (weights_.empty()) throw InvalidParameter("kernel must have at least one weight");
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidParameter("kernel weights must be finite and nonnegative");
    }
  }
  const double total = kahan_sum(weights_);
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw InvalidParameter("kernel weights must sum to 1 (got " + csv::format_double(total) + ")");
  }
}

Kernel Kernel::normalized(std::vector<double> weights, Resolution resolution) {
  const double total = kahan_sum(weights);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InvalidParameter("kernel weights must have a positive finite sum");
  }
  for (double& w : weights) w /= total;
  // A second pass absorbs the rounding left by the division.
  const double residual = kahan_sum(weights);
  for (double& w : weights) w /= residual;
  return Kernel(std::move(weights), resolution);
}

GammaParameters gamma_moments_to_parameters(double mean, double std_dev) {
  if (!(mean > 0.0) || !(std_dev > 0.0)) {
    throw InvalidParameter("Gamma mean and standard deviation must be positive");
  }
  const double ratio = mean / std_dev;
  return {ratio * ratio, std_dev * std_dev / mean};
}

Kernel gamma_serial_interval(double mean, double std_dev, std::size_t horizon) {
  if (horizon < 1) throw InvalidParameter("horizon must be at least 1");
  const auto [shape, scale] = gamma_moments_to_parameters(mean, std_dev);
  std::vector<double> weights(horizon);
  double previous = 0.0;
  for (std::size_t s = 1; s <= horizon; ++s) {
    const double current = boost::math::gamma_p(shape, static_cast<double>(s) / scale);
    weights[s - 1] = current - previous;
    previous = current;
  }
  return Kernel::normalized(std::move(weights), Resolution::Daily);
}

Kernel weekly_coarsen(const Kernel& daily) {
  if (daily.resolution() != Resolution::Daily) {
    throw InvalidParameter("weekly_coarsen expects a daily kernel");
  }
  const auto w = daily.weights();
  const std::size_t weeks = (w.size() + 6) / 7;
  std::vector<double> weekly(weeks, 0.0);
  for (std::size_t d = 0; d < w.size(); ++d) weekly[d / 7] += w[d];
  return Kernel::normalized(std::move(weekly), Resolution::Weekly);
}

std::vector<double> memory_vector(const Kernel& kernel, double y0, std::span<const double> values,
                                  PreHistory rule) {
  const std::size_t T = values.size();
  if (T < 1) throw InvalidParameter("memory_vector needs at least one observation");
  const auto psi = kernel.weights();
  const std::size_t tau = psi.size();
  std::vector<double> memory(T, 0.0);
  for (std::size_t t = 1; t <= T; ++t) {
    if (t == 1 && rule == PreHistory::Truncate) {
      memory[0] = y0;
      continue;
    }
    double acc = 0.0;
    for (std::size_t s = 1; s <= tau; ++s) {
      if (s <= t - 1) {
        acc += psi[s - 1] * values[t - 1 - s];
      } else if (rule == PreHistory::PadWithInitial) {
        acc += psi[s - 1] * y0;
      } else {
        break;
      }
    }
    memory[t - 1] = acc;
  }
  return memory;
}

std::vector<double> memory_vector(const Kernel& kernel, const History& history, PreHistory rule) {
  return memory_vector(kernel, history.y0, history.values, rule);
}

void write_kernel_csv(std::ostream& out, const Kernel& kernel) {
  out << "s,weight\n";
  const auto w = kernel.weights();
  for (std::size_t s = 0; s < w.size(); ++s) {
    out << (s + 1) << ',' << csv::format_double(w[s]) << '\n';
  }
}

Kernel read_kernel_csv(std::istream& in, Resolution resolution) {
  const auto table = csv::read_table(in);
  const auto weight_col = table.column("weight");
  if (weight_col == std::string::npos) throw LoadError("kernel CSV lacks a 'weight' column");
  std::vector<double> weights;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    try {
      weights.push_back(csv::parse_double(table.rows[r].at(weight_col)));
    } catch (const std::exception&) {
      throw LoadError("bad kernel weight at line " + std::to_string(table.line_numbers[r]));
    }
  }
  return Kernel::normalized(std::move(weights), resolution);
}

}  // namespace apure
