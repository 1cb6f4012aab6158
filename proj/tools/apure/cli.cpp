#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "apure/bench.hpp"
#include "apure/csv.hpp"
#include "apure/epi.hpp"
#include "apure/errors.hpp"
#include "apure/parallel.hpp"
#include "apure/risk.hpp"
#include "apure/simulate.hpp"
#include "apure/solver.hpp"
#include "apure/tuner.hpp"

namespace apure::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Global {
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

/// Output paths given as a comma list, matched to roles by position.
std::vector<fs::path> output_paths(const std::string& list, std::size_t expected,
                                   const std::string& roles) {
  const auto parts = split_list(list);
  if (parts.size() != expected) {
    throw InvalidParameter("--out expects " + std::to_string(expected) + " comma-separated paths (" +
                           roles + ")");
  }
  return {parts.begin(), parts.end()};
}

std::string seed_header(std::uint64_t seed) { return "# seed=" + std::to_string(seed) + "\n"; }

void write_text(const fs::path& path, const std::string& content) {
  csv::write_file_atomic(path, content);
}

void write_json(const fs::path& path, const Json& json) { write_text(path, json.dump(2) + "\n"); }

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& v) {
  Json array = Json::array();
  for (double x : v) array.push_back(number(x));
  return array;
}

std::string fmt(double v) { return csv::format_double(v); }

// ------------------------------------------------------------------ input

struct Series {
  std::vector<double> y;
  std::optional<std::vector<double>> psi;
  std::optional<std::vector<double>> x_bar;
};

Series read_series(const fs::path& path) {
  const auto table = csv::read_table(path);
  auto y_col = table.column("Y");
  if (y_col == std::string::npos) y_col = table.column("count");
  if (y_col == std::string::npos) throw LoadError(path.string() + ": needs a 'Y' or 'count' column");
  const auto psi_col = table.column("Psi");
  const auto xbar_col = table.column("X_bar");
  Series s;
  std::vector<double> psi, x_bar;
  std::vector<std::string> problems;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto get = [&](std::size_t col, const char* name) {
      try {
        if (col >= row.size()) throw std::invalid_argument("missing");
        return csv::parse_double(row[col]);
      } catch (const std::exception&) {
        problems.push_back("line " + std::to_string(table.line_numbers[r]) + ": bad " + name);
        return 0.0;
      }
    };
    s.y.push_back(get(y_col, "Y"));
    if (psi_col != std::string::npos) psi.push_back(get(psi_col, "Psi"));
    if (xbar_col != std::string::npos) x_bar.push_back(get(xbar_col, "X_bar"));
  }
  if (!problems.empty()) {
    std::string msg = path.string() + ":";
    for (std::size_t i = 0; i < std::min<std::size_t>(problems.size(), 20); ++i) {
      msg += "\n  " + problems[i];
    }
    throw LoadError(msg);
  }
  if (s.y.empty()) throw LoadError(path.string() + ": no observations");
  if (psi_col != std::string::npos) s.psi = std::move(psi);
  if (xbar_col != std::string::npos) s.x_bar = std::move(x_bar);
  return s;
}

struct MemoryFlags {
  double serial_mean = 6.6;
  double serial_std = 3.5;
  std::size_t horizon = 25;
  bool weekly = false;
  std::optional<double> y0;

  void add(CLI::App* app) {
    app->add_option("--serial-mean", serial_mean, "Serial interval mean in days")->capture_default_str();
    app->add_option("--serial-std", serial_std, "Serial interval standard deviation in days")
        ->capture_default_str();
    app->add_option("--horizon", horizon, "Daily kernel horizon")->capture_default_str();
    app->add_flag("--weekly", weekly, "Coarsen the kernel to weeks");
    app->add_option("--y0", y0, "Initial state (default: pad with the first observation)");
  }

  /// A Psi column in the input wins; otherwise Psi follows the kernel.
  MemoryRule rule(const Series& s) const {
    if (s.psi) return MemoryRule::fixed(*s.psi);
    Kernel kernel = gamma_serial_interval(serial_mean, serial_std, horizon);
    if (weekly) kernel = weekly_coarsen(kernel);
    if (y0) return MemoryRule::linear(kernel, *y0, PreHistory::PadWithInitial);
    return MemoryRule::linear_padded_with_first(kernel);
  }
};

struct SolverFlags {
  std::string method = "ip";
  std::string scaling = "unit";

  void add(CLI::App* app) {
    app->add_option("--solver", method, "ip (interior point) or cp (Chambolle-Pock)")
        ->check(CLI::IsMember({"ip", "cp"}))
        ->capture_default_str();
    app->add_option("--scaling", scaling, "Data-term scaling: unit or per-alpha")
        ->check(CLI::IsMember({"unit", "per-alpha"}))
        ->capture_default_str();
  }

  SolverConfig config() const {
    SolverConfig c;
    c.method = method == "cp" ? SolverMethod::ChambollePock : SolverMethod::InteriorPoint;
    c.scaling = scaling == "per-alpha" ? DataFitScaling::PerAlpha : DataFitScaling::Unit;
    return c;
  }
};

double resolve_alpha(const std::string& text, std::span<const double> y) {
  if (text == "auto") return scale_heuristic(y);
  const double a = parse_scientific(text);
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidParameter("--alpha must be positive or 'auto'");
  return a;
}

// --------------------------------------------------------------- commands

struct SimulateCmd {
  std::size_t T = 70;
  double y0 = 3395.0;
  double alpha = 1e3;
  std::string noise = "poisson";
  std::string breakpoints;
  std::string pre_history = "pad";
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--T", T, "Number of time steps")->capture_default_str();
    app->add_option("--y0", y0, "Initial state")->capture_default_str();
    app->add_option("--alpha", alpha, "Noise scale")->capture_default_str();
    app->add_option("--noise", noise, "poisson, gaussian or gamma")
        ->check(CLI::IsMember({"poisson", "gaussian", "gamma"}))
        ->capture_default_str();
    app->add_option("--breakpoints", breakpoints,
                    "Ground truth as t:value,t:value,... (default: benchmark path)");
    app->add_option("--pre-history", pre_history, "pad or truncate")
        ->check(CLI::IsMember({"pad", "truncate"}))
        ->capture_default_str();
    app->add_option("--out", out, "Output CSV (t,X_bar,Psi,Y)")->required();
  }

  int run(const Global& g, std::ostream&) const {
    SyntheticSetup setup;
    setup.T = T;
    if (!breakpoints.empty()) {
      setup.breakpoints.clear();
      for (const auto& item : split_list(breakpoints)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw InvalidParameter("breakpoint '" + item + "' is not t:value");
        setup.breakpoints.emplace_back(csv::parse_double(item.substr(0, colon)),
                                       csv::parse_double(item.substr(colon + 1)));
      }
    }
    const auto path = setup.path();
    const NoiseFamily family = noise == "gaussian" ? NoiseFamily::Gaussian
                               : noise == "gamma"  ? NoiseFamily::Gamma
                                                   : NoiseFamily::ScaledPoisson;
    SimulationOptions options;
    options.pre_history = pre_history == "pad" ? PreHistory::PadWithInitial : PreHistory::Truncate;
    const auto sim =
        simulate(path, setup.kernel(), y0, NoiseSpec::constant(family, alpha, T), g.seed, options);
    std::string csv_text = seed_header(g.seed) + "t,X_bar,Psi,Y\n";
    for (std::size_t t = 0; t < T; ++t) {
      csv_text += std::to_string(t + 1) + ',' + fmt(path.values[t]) + ',' + fmt(sim.memory[t]) +
                  ',' + fmt(sim.history.values[t]) + '\n';
    }
    write_text(out, csv_text);
    return 0;
  }
};

struct EstimateCmd {
  std::string input;
  double lambda = 0.0;
  std::string alpha = "auto";
  std::string out;
  MemoryFlags memory;
  SolverFlags solver;

  void add(CLI::App* app) {
    app->add_option("--input", input, "CSV with a Y (or count) column and optional Psi")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--lambda", lambda, "Regularization weight")->required();
    app->add_option("--alpha", alpha, "Noise scale or 'auto' (0.1 std(Y))")->capture_default_str();
    app->add_option("--out", out, "Output CSV (t,Y,Psi,X_hat)")->required();
    memory.add(app);
    solver.add(app);
  }

  int run(const Global&, std::ostream& log) const {
    const auto s = read_series(input);
    const auto psi = memory.rule(s)(s.y);
    const std::vector<double> a(s.y.size(), resolve_alpha(alpha, s.y));
    const auto result = estimate(s.y, psi, a, lambda, solver.config());
    if (!result.converged) log << "warning: solver did not reach its tolerance\n";
    std::string csv_text = "t,Y,Psi,X_hat\n";
    for (std::size_t t = 0; t < s.y.size(); ++t) {
      csv_text += std::to_string(t + 1) + ',' + fmt(s.y[t]) + ',' + fmt(psi[t]) + ',' +
                  fmt(result.x_hat[t]) + '\n';
    }
    write_text(out, csv_text);
    return 0;
  }
};

struct TuneCmd {
  std::string input;
  std::string oracle = "apure-pred";
  std::size_t n_grid = 60;
  int n_mc = 10;
  std::string alpha = "auto";
  std::optional<double> epsilon;
  std::string out;
  MemoryFlags memory;
  SolverFlags solver;

  void add(CLI::App* app) {
    app->add_option("--input", input, "CSV with Y (or count), optional Psi and X_bar columns")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--oracle", oracle, "true-pred, true-est, apure-pred or apure-est")
        ->check(CLI::IsMember({"true-pred", "true-est", "apure-pred", "apure-est"}))
        ->capture_default_str();
    app->add_option("--n-grid", n_grid, "Grid points")->capture_default_str();
    app->add_option("--n-mc", n_mc, "Monte-Carlo probes per grid point")->capture_default_str();
    app->add_option("--alpha", alpha, "Noise scale or 'auto' (0.1 std(Y))")->capture_default_str();
    app->add_option("--epsilon", epsilon, "Finite-difference step (default 1e-3 max(1, mean Y))");
    app->add_option("--out", out, "curve.csv,result.json")->required();
    memory.add(app);
    solver.add(app);
  }

  int run(const Global& g, std::ostream&) const {
    const auto paths = output_paths(out, 2, "curve.csv,result.json");
    const auto s = read_series(input);
    const double a = resolve_alpha(alpha, s.y);
    const std::vector<double> alpha_vec(s.y.size(), a);
    VariationalEstimator estimator(memory.rule(s), alpha_vec, solver.config());
    TuneOptions options;
    options.n_points = n_grid;
    options.n_mc = n_mc;
    options.seed = g.seed;
    options.epsilon = epsilon;
    options.x_bar = s.x_bar;
    const OracleKind kinds[] = {parse_oracle(oracle)};
    const auto swept = sweep(s.y, estimator, alpha_vec, kinds, options);
    const auto result = select(swept, 0);

    std::ostringstream curve;
    curve << seed_header(g.seed);
    write_risk_curve_csv(curve, result.curve);
    write_text(paths[0], curve.str());

    Json json;
    json["schema_version"] = kSchemaVersion;
    json["seed"] = g.seed;
    json["oracle"] = oracle;
    json["alpha"] = a;
    json["n_grid"] = n_grid;
    json["n_mc"] = n_mc;
    json["lambda_star"] = result.lambda_star;
    json["grid_index"] = result.index;
    json["risk_at_lambda_star"] = number(result.curve.values[result.index]);
    json["x_hat"] = numbers(result.x_hat_star);
    json["failures"] = swept.failures;
    write_json(paths[1], json);
    return 0;
  }
};

struct BenchCmd {
  std::string alphas = "1e2,1e2.5,1e3,1e3.5";
  int Q = 10;
  std::string oracles = "true-est,true-pred,apure-pred,apure-est";
  std::size_t n_grid = 60;
  int n_mc = 10;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--alphas", alphas, "Noise scales, e.g. 1e2,1e2.5,1e3")->capture_default_str();
    app->add_option("--Q", Q, "Datasets per noise scale")->capture_default_str();
    app->add_option("--oracles", oracles, "Comma list of oracles")->capture_default_str();
    app->add_option("--n-grid", n_grid, "Grid points")->capture_default_str();
    app->add_option("--n-mc", n_mc, "Monte-Carlo probes per grid point")->capture_default_str();
    app->add_option("--out", out, "report.json,table.csv")->required();
  }

  int run(const Global& g, std::ostream& log) const {
    const auto paths = output_paths(out, 2, "report.json,table.csv");
    BenchConfig config;
    for (const auto& a : split_list(alphas)) config.alphas.push_back(parse_scientific(a));
    config.oracles.clear();
    for (const auto& o : split_list(oracles)) config.oracles.push_back(parse_oracle(o));
    config.Q = Q;
    config.seed = g.seed;
    config.n_points = n_grid;
    config.n_mc = n_mc;
    const auto report = run_benchmark(config);

    write_bench_table(log, report);
    std::ostringstream table;
    table << seed_header(g.seed);
    write_bench_csv(table, report);
    write_text(paths[1], table.str());

    Json json;
    json["schema_version"] = kSchemaVersion;
    json["seed"] = g.seed;
    json["config"] = {{"alphas", config.alphas},
                      {"Q", config.Q},
                      {"n_grid", config.n_points},
                      {"n_mc", config.n_mc},
                      {"T", config.setup.T},
                      {"y0", config.setup.y0}};
    Json oracle_names = Json::array();
    for (auto o : config.oracles) oracle_names.push_back(std::string(oracle_name(o)));
    json["config"]["oracles"] = oracle_names;
    json["x_bar"] = numbers(report.x_bar);
    Json cells = Json::array();
    for (std::size_t a = 0; a < report.cells.size(); ++a) {
      for (std::size_t o = 0; o < report.cells[a].size(); ++o) {
        const auto& c = report.cells[a][o];
        cells.push_back({{"alpha", config.alphas[a]},
                         {"oracle", std::string(oracle_name(config.oracles[o]))},
                         {"mmse", number(c.mmse)},
                         {"ci", number(c.ci)},
                         {"ci_paper_literal", number(c.ci_paper_literal)},
                         {"bias", number(c.bias)},
                         {"variance", number(c.variance)},
                         {"completed", c.completed},
                         {"failed", c.failed}});
      }
    }
    json["cells"] = cells;
    Json runs = Json::array();
    for (const auto& r : report.runs) {
      runs.push_back({{"alpha", config.alphas[r.alpha_index]},
                      {"q", r.q},
                      {"ok", r.ok},
                      {"error", r.error},
                      {"lambda_star", numbers(r.lambda_star)},
                      {"squared_error", numbers(r.squared_error)}});
    }
    json["runs"] = runs;
    write_json(paths[0], json);
    return 0;
  }
};

struct EpiCmd {
  std::string input;
  std::string format = "jhu-wide";
  std::string region;
  std::string from, to;
  int n_mc = 10;
  std::size_t n_grid = 60;
  std::string alpha = "auto";
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--input", input, "Daily counts CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--format", format, "long (date,count) or jhu-wide (cumulative)")
        ->check(CLI::IsMember({"long", "jhu-wide"}))
        ->capture_default_str();
    app->add_option("--region", region, "Country for jhu-wide input");
    app->add_option("--from", from, "First day kept (YYYY-MM-DD)");
    app->add_option("--to", to, "Last day kept (YYYY-MM-DD)");
    app->add_option("--n-mc", n_mc, "Monte-Carlo probes per grid point")->capture_default_str();
    app->add_option("--n-grid", n_grid, "Grid points")->capture_default_str();
    app->add_option("--alpha", alpha, "Noise scale or 'auto' (0.1 std(Z))")->capture_default_str();
    app->add_option("--out", out, "report.json,estimate.csv,curve.csv")->required();
  }

  int run(const Global& g, std::ostream& log) const {
    const auto paths = output_paths(out, 3, "report.json,estimate.csv,curve.csv");
    LoadOptions load;
    load.format = format == "long" ? CountFormat::Long : CountFormat::JHUWide;
    load.region = region;
    if (!from.empty()) load.from = parse_date(from);
    if (!to.empty()) load.to = parse_date(to);
    const auto daily = load_counts(input, load);
    const auto weekly = weekly_aggregate(daily);
    EpiConfig config;
    config.n_mc = n_mc;
    config.n_points = n_grid;
    config.seed = g.seed;
    if (alpha != "auto") config.alpha = resolve_alpha(alpha, weekly.counts);
    const auto report = estimate_reproduction(weekly, config);
    for (const auto& w : report.warnings) log << "warning: " << w << '\n';

    std::string est = seed_header(g.seed) + "week_start,Z,Phi,R_ml,R_hat\n";
    for (std::size_t t = 0; t < report.z.size(); ++t) {
      est += format_date(report.week_start[t]) + ',' + fmt(report.z[t]) + ',' + fmt(report.phi[t]) +
             ',' + fmt(report.r_ml[t]) + ',' + fmt(report.r_hat[t]) + '\n';
    }
    write_text(paths[1], est);
    std::ostringstream curve;
    curve << seed_header(g.seed);
    write_risk_curve_csv(curve, report.curve);
    write_text(paths[2], curve.str());

    Json json;
    json["schema_version"] = kSchemaVersion;
    json["seed"] = g.seed;
    json["input"] = fs::path(input).filename().string();
    json["region"] = region;
    json["days"] = daily.size();
    json["weeks"] = weekly.size();
    json["first_week"] = format_date(report.week_start.front());
    json["last_week"] = format_date(report.week_start.back());
    json["alpha"] = report.alpha;
    json["alpha_rule"] = alpha == "auto" ? "0.1*std(Z)" : "fixed";
    json["lambda_star"] = report.lambda_star;
    json["n_grid"] = n_grid;
    json["n_mc"] = n_mc;
    json["kernel"] = numbers({report.kernel.weights().begin(), report.kernel.weights().end()});
    json["sensitivity_ratio"] = number(report.sensitivity_ratio);
    json["warnings"] = report.warnings;
    json["r_hat"] = numbers(report.r_hat);
    json["r_ml"] = numbers(report.r_ml);
    write_json(paths[0], json);
    return 0;
  }
};

}  // namespace

double parse_scientific(const std::string& text) {
  const auto e = text.find_first_of("eE");
  if (e == std::string::npos) return csv::parse_double(text);
  const double mantissa = csv::parse_double(text.substr(0, e));
  const double exponent = csv::parse_double(text.substr(e + 1));
  return mantissa * std::pow(10.0, exponent);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poisson autoregressive estimation with data-driven regularization"};
  app.name("apure");
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker cap (0 = all cores; APURE_THREADS overrides)");

  SimulateCmd simulate_cmd;
  EstimateCmd estimate_cmd;
  TuneCmd tune_cmd;
  BenchCmd bench_cmd;
  EpiCmd epi_cmd;
  auto* sim = app.add_subcommand("simulate", "Draw a synthetic series");
  auto* est = app.add_subcommand("estimate", "Penalized estimate at a fixed lambda");
  auto* tune = app.add_subcommand("tune", "Select lambda on a grid with a risk oracle");
  auto* bench = app.add_subcommand("bench", "Monte-Carlo benchmark of the oracles");
  auto* epi = app.add_subcommand("epi", "Weekly reproduction number from daily counts");
  simulate_cmd.add(sim);
  estimate_cmd.add(est);
  tune_cmd.add(tune);
  bench_cmd.add(bench);
  epi_cmd.add(epi);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (g.threads > 0) set_max_threads(g.threads);
    if (sim->parsed()) return simulate_cmd.run(g, err);
    if (est->parsed()) return estimate_cmd.run(g, err);
    if (tune->parsed()) return tune_cmd.run(g, err);
    if (bench->parsed()) return bench_cmd.run(g, out);
    if (epi->parsed()) return epi_cmd.run(g, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace apure::cli
