#include "apure/epi.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <map>
#include <sstream>

#include "apure/csv.hpp"
#include "apure/errors.hpp"
#include "apure/risk.hpp"

namespace apure {

namespace {

using namespace std::chrono;

bool parse_int(std::string_view text, int& value) {
  if (text.empty()) return false;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  return result.ec == std::errc{} && result.ptr == text.data() + text.size();
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string join_problems(const std::filesystem::path& path,
                          const std::vector<std::string>& problems) {
  std::ostringstream msg;
  msg << path.string() << ": " << problems.size() << " problem(s)";
  constexpr std::size_t kShown = 20;
  for (std::size_t i = 0; i < std::min(problems.size(), kShown); ++i) msg << "\n  " << problems[i];
  if (problems.size() > kShown) msg << "\n  ...";
  return msg.str();
}

CountSeries load_long(const std::filesystem::path& path, const csv::Table& table) {
  const auto date_col = table.column("date");
  const auto count_col = table.column("count");
  if (date_col == std::string::npos || count_col == std::string::npos) {
    throw LoadError(path.string() + ": expected header 'date,count'");
  }
  std::vector<std::string> problems;
  std::map<Date, std::pair<double, std::size_t>> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = "line " + std::to_string(table.line_numbers[r]) + ": ";
    if (row.size() <= std::max(date_col, count_col)) {
      problems.push_back(where + "too few fields");
      continue;
    }
    Date date;
    double count = 0.0;
    try {
      date = parse_date(row[date_col]);
    } catch (const std::exception&) {
      problems.push_back(where + "bad date '" + row[date_col] + "'");
      continue;
    }
    try {
      count = csv::parse_double(row[count_col]);
    } catch (const std::exception&) {
      problems.push_back(where + "bad count '" + row[count_col] + "'");
      continue;
    }
    if (!std::isfinite(count)) {
      problems.push_back(where + "non-finite count");
      continue;
    }
    auto [it, inserted] = rows.emplace(date, std::pair{count, table.line_numbers[r]});
    if (!inserted) {
      problems.push_back(where + "duplicate date " + format_date(date) + " (first on line " +
                         std::to_string(it->second.second) + ")");
    }
  }
  CountSeries series;
  for (const auto& [date, entry] : rows) {
    if (!series.dates.empty() && date != series.dates.back() + days{1}) {
      problems.push_back("line " + std::to_string(entry.second) + ": missing dates between " +
                         format_date(series.dates.back()) + " and " + format_date(date));
    }
    series.dates.push_back(date);
    series.counts.push_back(std::max(0.0, entry.first));
  }
  if (!problems.empty()) throw LoadError(join_problems(path, problems));
  return series;
}

CountSeries load_jhu_wide(const std::filesystem::path& path, const csv::Table& table,
                          const std::string& region) {
  if (region.empty()) throw InvalidParameter("JHU-wide input needs a region");
  const auto province_col = table.column("Province/State");
  const auto country_col = table.column("Country/Region");
  if (country_col == std::string::npos) {
    throw LoadError(path.string() + ": missing 'Country/Region' column");
  }
  std::vector<std::string> problems;
  std::vector<std::size_t> date_cols;
  CountSeries series;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    if (name.find('/') == std::string::npos || c == province_col || c == country_col) continue;
    try {
      const Date date = parse_date(name);
      if (!series.dates.empty() && date != series.dates.back() + days{1}) {
        problems.push_back("header: date column " + name + " does not follow " +
                           format_date(series.dates.back()));
      }
      series.dates.push_back(date);
      date_cols.push_back(c);
    } catch (const std::exception&) {
      problems.push_back("header: bad date column '" + name + "'");
    }
  }
  if (date_cols.empty()) problems.push_back("header: no date columns");

  std::vector<std::size_t> whole_country, provinces;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() <= country_col || trim(row[country_col]) != region) continue;
    const bool has_province = province_col != std::string::npos && province_col < row.size() &&
                              !trim(row[province_col]).empty();
    (has_province ? provinces : whole_country).push_back(r);
  }
  if (whole_country.size() > 1) problems.push_back("region '" + region + "' appears more than once");
  const auto& selected = whole_country.empty() ? provinces : whole_country;
  if (selected.empty()) problems.push_back("region '" + region + "' not found");

  std::vector<double> cumulative(date_cols.size(), 0.0);
  for (auto r : selected) {
    const auto& row = table.rows[r];
    const std::string where = "line " + std::to_string(table.line_numbers[r]) + ": ";
    for (std::size_t k = 0; k < date_cols.size(); ++k) {
      if (date_cols[k] >= row.size()) {
        problems.push_back(where + "too few fields");
        break;
      }
      try {
        const double v = csv::parse_double(row[date_cols[k]]);
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
        cumulative[k] += v;
      } catch (const std::exception&) {
        problems.push_back(where + "bad value '" + row[date_cols[k]] + "' for " +
                           table.header[date_cols[k]]);
      }
    }
  }
  if (!problems.empty()) throw LoadError(join_problems(path, problems));

  series.counts.resize(cumulative.size());
  double previous = 0.0;
  for (std::size_t k = 0; k < cumulative.size(); ++k) {
    series.counts[k] = std::max(0.0, cumulative[k] - previous);
    previous = cumulative[k];
  }
  return series;
}

}  // namespace

std::string format_date(Date date) {
  const year_month_day ymd{date};
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buffer;
}

Date parse_date(std::string_view text) {
  text = trim(text);
  int y = 0, m = 0, d = 0;
  bool ok = false;
  if (auto parts = split(text, '-'); parts.size() == 3 && parts[0].size() == 4) {
    ok = parse_int(parts[0], y) && parse_int(parts[1], m) && parse_int(parts[2], d);
  } else if (auto slash = split(text, '/'); slash.size() == 3) {
    ok = parse_int(slash[0], m) && parse_int(slash[1], d) && parse_int(slash[2], y);
    if (ok && slash[2].size() <= 2) y += 2000;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ok || m < 1 || d < 1 || !ymd.ok()) {
    throw InvalidParameter("invalid date '" + std::string(text) + "'");
  }
  return sys_days{ymd};
}

CountSeries load_counts(const std::filesystem::path& path, const LoadOptions& options) {
  const auto table = csv::read_table(path);
  auto series = options.format == CountFormat::Long ? load_long(path, table)
                                                    : load_jhu_wide(path, table, options.region);
  if (options.from || options.to) {
    CountSeries window;
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (options.from && series.dates[i] < *options.from) continue;
      if (options.to && series.dates[i] > *options.to) continue;
      window.dates.push_back(series.dates[i]);
      window.counts.push_back(series.counts[i]);
    }
    series = std::move(window);
  }
  if (series.size() == 0) throw LoadError(path.string() + ": no observations");
  series.resolution = Resolution::Daily;
  return series;
}

CountSeries weekly_aggregate(const CountSeries& daily) {
  if (daily.resolution != Resolution::Daily) throw InvalidParameter("series is not daily");
  if (daily.dates.size() != daily.counts.size()) {
    throw InvalidParameter("dates and counts have different lengths");
  }
  if (daily.size() < 7) throw InvalidParameter("need at least 7 days to aggregate");
  const std::size_t skip = daily.size() % 7;
  CountSeries weekly;
  weekly.resolution = Resolution::Weekly;
  for (std::size_t start = skip; start < daily.size(); start += 7) {
    double sum = 0.0;
    for (std::size_t i = start; i < start + 7; ++i) sum += daily.counts[i];
    weekly.dates.push_back(daily.dates[start]);
    weekly.counts.push_back(sum);
  }
  return weekly;
}

Kernel weekly_kernel(const EpiConfig& config) {
  return weekly_coarsen(
      gamma_serial_interval(config.serial_mean, config.serial_std, config.daily_horizon));
}

std::vector<double> infectiousness(const Kernel& weekly, std::span<const double> z) {
  if (z.empty()) throw InvalidParameter("no weekly counts");
  return memory_vector(weekly, z[0], z, PreHistory::PadWithInitial);
}

double scale_heuristic(std::span<const double> z) {
  const double sd = sample_std(z);
  if (!(sd > 0.0)) throw InvalidParameter("weekly counts are constant; scale heuristic undefined");
  return 0.1 * sd;
}

EpiReport estimate_reproduction(const CountSeries& weekly, const EpiConfig& config) {
  if (weekly.resolution != Resolution::Weekly) throw InvalidParameter("series is not weekly");
  if (weekly.size() < 10) throw InvalidParameter("need at least 10 weeks of counts");
  if (config.alpha && !(*config.alpha > 0.0)) throw InvalidParameter("alpha must be positive");

  EpiReport report;
  report.week_start = weekly.dates;
  report.z = weekly.counts;
  report.kernel = weekly_kernel(config);
  report.phi = infectiousness(report.kernel, report.z);
  for (std::size_t t = 0; t < report.phi.size(); ++t) {
    if (!(report.phi[t] > 0.0)) {
      throw DomainError("infectiousness vanishes in week " + format_date(report.week_start[t]));
    }
  }
  report.r_ml.resize(report.z.size());
  for (std::size_t t = 0; t < report.z.size(); ++t) report.r_ml[t] = report.z[t] / report.phi[t];

  report.alpha = config.alpha.value_or(scale_heuristic(report.z));
  const std::vector<double> alpha(report.z.size(), report.alpha);
  auto rule = MemoryRule::linear_padded_with_first(report.kernel);
  report.sensitivity_ratio = rule.sensitivity_ratio(report.z, alpha);
  if (report.sensitivity_ratio > config.sensitivity_warning) {
    report.warnings.push_back("infectiousness reacts strongly to single counts (sensitivity ratio " +
                              csv::format_double(report.sensitivity_ratio) +
                              "); the risk estimate may be biased");
  }

  VariationalEstimator estimator(std::move(rule), alpha, config.solver);
  TuneOptions options;
  options.n_points = config.n_points;
  options.n_mc = config.n_mc;
  options.seed = config.seed;
  options.epsilon = config.epsilon;
  const OracleKind kinds[] = {OracleKind::ApurePred};
  const auto swept = sweep(report.z, estimator, alpha, kinds, options);
  for (const auto& failure : swept.failures) report.warnings.push_back(failure);
  auto tuned = select(swept, 0);
  report.lambda_star = tuned.lambda_star;
  report.r_hat = std::move(tuned.x_hat_star);
  report.curve = std::move(tuned.curve);
  return report;
}

}  // namespace apure
