#pragma once

#include <span>
#include <vector>

namespace apure {

/// (D2 x)_t = x_{t+2} - 2 x_{t+1} + x_t, t = 1..T-2. Requires T >= 3.
std::vector<double> second_difference(std::span<const double> x);

/// Transpose of second_difference: maps R^{T-2} to R^T.
std::vector<double> second_difference_adjoint(std::span<const double> u);

/// Upper bound of the operator norm of D2 (its squared norm is below 16).
inline constexpr double kSecondDifferenceNorm = 4.0;

/// How the scale parameter enters the Kullback-Leibler data term.
enum class DataFitScaling {
  /// sum_t d_KL(Y_t / alpha_t | X_t Psi_t / alpha_t)
  PerAlpha,
  /// sum_t d_KL(Y_t | X_t Psi_t); alpha does not enter the estimator
  Unit,
};

enum class InitKind { ML, Ones, Custom };

enum class SolverMethod {
  /// Log-barrier Newton method on the box-constrained dual (banded systems).
  InteriorPoint,
  /// First-order primal-dual proximal splitting.
  ChambollePock,
};

struct SolverConfig {
  SolverMethod method = SolverMethod::InteriorPoint;

  // Chambolle-Pock settings.
  int max_iters = 20000;
  /// Relative objective change tolerated over one check window.
  double tol = 1e-7;
  int check_window = 10;
  double primal_step = 0.25;
  double dual_step = 0.25;
  double theta = 1.0;
  InitKind init = InitKind::ML;
  std::vector<double> x_custom;
  DataFitScaling scaling = DataFitScaling::Unit;

  // Interior-point settings: stop once the duality gap falls below
  // gap_tol * (1 + sum_t Y_t / w_t), w_t the data-term scale. The stage count
  // then depends only on gap_tol, so the solution map is smooth in Y.
  double gap_tol = 1e-13;
  int max_newton_steps = 2000;

  /// Chambolle-Pock steps tau = gamma / ||D2||, sigma = 1 / (gamma ||D2||).
  static SolverConfig with_step_ratio(double gamma);
};

/// Primal and dual iterates from a previous solve, reused as starting point.
struct WarmStart {
  std::vector<double> x;
  std::vector<double> dual;
};

struct EstimateResult {
  std::vector<double> x_hat;
  /// Objective at the initial point, then at every check window.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  /// Final dual variable (length T-2).
  std::vector<double> dual;

  WarmStart warm_start() const { return {x_hat, dual}; }
};

/// Penalized negative log-likelihood: KL data term + lambda ||D2 x||_1.
/// +infinity outside the domain (x < 0 or infeasible data term).
double objective(std::span<const double> y, std::span<const double> psi,
                 std::span<const double> alpha, double lambda, std::span<const double> x,
                 DataFitScaling scaling = DataFitScaling::Unit);

/// Minimizes objective() over x >= 0 with the configured method.
///
/// Chambolle-Pock returns the best checked iterate and records the objective
/// every check window. The interior-point method records the primal objective
/// after each centering stage; `iterations` then counts Newton steps and the
/// warm start is ignored.
EstimateResult estimate(std::span<const double> y, std::span<const double> psi,
                        std::span<const double> alpha, double lambda,
                        const SolverConfig& config = {}, const WarmStart* warm = nullptr);

}  // namespace apure
