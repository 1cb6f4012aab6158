#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apure/kernels.hpp"
#include "apure/solver.hpp"
#include "apure/tuner.hpp"

namespace apure {

using Date = std::chrono::sys_days;

/// YYYY-MM-DD.
std::string format_date(Date date);
/// Accepts YYYY-MM-DD and the m/d/yy form of JHU column headers.
Date parse_date(std::string_view text);

struct CountSeries {
  std::vector<Date> dates;
  std::vector<double> counts;
  Resolution resolution = Resolution::Daily;

  std::size_t size() const noexcept { return counts.size(); }
};

enum class CountFormat {
  /// Header `date,count`, one row per day of new counts.
  Long,
  /// One row per region, one column per day of cumulative counts.
  JHUWide,
};

struct LoadOptions {
  CountFormat format = CountFormat::Long;
  /// JHUWide: country name. Provinces are summed unless a row with an empty
  /// province exists for that country.
  std::string region;
  /// Inclusive date window applied after differencing.
  std::optional<Date> from;
  std::optional<Date> to;
};

/// Daily new counts. JHU cumulative rows are differenced (the first column
/// counts from 0) and negative differences are set to 0.
/// Throws LoadError listing the offending lines.
CountSeries load_counts(const std::filesystem::path& path, const LoadOptions& options = {});

/// Non-overlapping 7-day sums labelled by their first day. Leading days are
/// dropped so the remaining length is a multiple of 7.
CountSeries weekly_aggregate(const CountSeries& daily);

struct EpiConfig {
  double serial_mean = 6.6;
  double serial_std = 3.5;
  std::size_t daily_horizon = 25;
  /// Unset: 0.1 * std(Z).
  std::optional<double> alpha;
  std::size_t n_points = 60;
  int n_mc = 10;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;
  SolverConfig solver;
  /// Sensitivity ratio above which the report carries a warning.
  double sensitivity_warning = 0.1;
};

/// Weekly-coarsened Gamma serial interval.
Kernel weekly_kernel(const EpiConfig& config = {});

/// Phi_t(Z), with every week before the first padded with Z_1.
std::vector<double> infectiousness(const Kernel& weekly, std::span<const double> z);

/// 0.1 * sample std of the weekly counts.
double scale_heuristic(std::span<const double> z);

struct EpiReport {
  std::vector<Date> week_start;
  std::vector<double> z;
  std::vector<double> phi;
  std::vector<double> r_ml;
  std::vector<double> r_hat;
  double lambda_star = 0.0;
  double alpha = 0.0;
  RiskCurve curve;
  Kernel kernel{std::vector<double>{1.0}, Resolution::Weekly};
  /// max |dPhi/dZ * alpha| / Phi over the series.
  double sensitivity_ratio = 0.0;
  std::vector<std::string> warnings;
};

/// Weekly kernel, Phi(Z), alpha, lambda tuned on the averaged finite-difference
/// prediction risk, and the resulting R_hat. Requires at least 10 weeks.
EpiReport estimate_reproduction(const CountSeries& weekly, const EpiConfig& config = {});

}  // namespace apure
