#include "apure/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "apure/divergence.hpp"
#include "apure/errors.hpp"

namespace apure {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void apply_d2(std::span<const double> x, std::span<double> out) {
  for (std::size_t t = 0; t + 2 < x.size(); ++t) out[t] = x[t + 2] - 2.0 * x[t + 1] + x[t];
}

void apply_d2_adjoint(std::span<const double> u, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    out[j] += u[j];
    out[j + 1] -= 2.0 * u[j];
    out[j + 2] += u[j];
  }
}

double data_weight(DataFitScaling scaling, double alpha) {
  return scaling == DataFitScaling::PerAlpha ? alpha : 1.0;
}

}  // namespace

SolverConfig SolverConfig::with_step_ratio(double gamma) {
  SolverConfig config;
  config.primal_step = gamma / kSecondDifferenceNorm;
  config.dual_step = 1.0 / (gamma * kSecondDifferenceNorm);
  return config;
}

std::vector<double> second_difference(std::span<const double> x) {
  if (x.size() < 3) throw InvalidParameter("second difference needs at least 3 samples");
  std::vector<double> out(x.size() - 2);
  apply_d2(x, out);
  return out;
}

std::vector<double> second_difference_adjoint(std::span<const double> u) {
  if (u.empty()) throw InvalidParameter("adjoint second difference needs a nonempty input");
  std::vector<double> out(u.size() + 2);
  apply_d2_adjoint(u, out);
  return out;
}

double objective(std::span<const double> y, std::span<const double> psi,
                 std::span<const double> alpha, double lambda, std::span<const double> x,
                 DataFitScaling scaling) {
  const std::size_t T = y.size();
  if (psi.size() != T || alpha.size() != T || x.size() != T) {
    throw InvalidParameter("vector lengths must match");
  }
  if (!(lambda >= 0.0)) throw InvalidParameter("lambda must be nonnegative");
  double data = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (x[t] < 0.0) return kInf;
    const double a = data_weight(scaling, alpha[t]);
    const double term = kl_divergence(y[t] / a, x[t] * psi[t] / a);
    if (term == kInf) return kInf;
    data += term;
  }
  double penalty = 0.0;
  for (std::size_t t = 0; t + 2 < T; ++t) penalty += std::abs(x[t + 2] - 2.0 * x[t + 1] + x[t]);
  return data + lambda * penalty;
}

namespace {

void validate_inputs(std::span<const double> y, std::span<const double> psi,
                     std::span<const double> alpha, double lambda) {
  const std::size_t T = y.size();
  if (psi.size() != T || alpha.size() != T) throw InvalidParameter("vector lengths must match");
  if (T < 3) throw InvalidParameter("estimate needs at least 3 samples");
  if (!(lambda >= 0.0) || std::isinf(lambda)) throw InvalidParameter("lambda must be finite and nonnegative");
  for (std::size_t t = 0; t < T; ++t) {
    if (!(psi[t] > 0.0) || std::isinf(psi[t])) {
      throw DomainError("estimate needs finite Psi_t > 0 (t = " + std::to_string(t + 1) + ")");
    }
    if (!(y[t] >= 0.0) || std::isinf(y[t])) throw DomainError("observations must be finite and nonnegative");
    if (!(alpha[t] > 0.0)) throw InvalidParameter("alpha must be positive");
  }
}

EstimateResult estimate_chambolle_pock(std::span<const double> y, std::span<const double> psi,
                                       std::span<const double> alpha, double lambda,
                                       const SolverConfig& config, const WarmStart* warm) {
  const std::size_t T = y.size();
  const double tau = config.primal_step;
  const double sigma = config.dual_step;
  if (!(tau > 0.0) || !(sigma > 0.0)) throw InvalidParameter("solver steps must be positive");
  if (tau * sigma * kSecondDifferenceNorm * kSecondDifferenceNorm > 1.0 + 1e-12) {
    throw InvalidParameter("solver steps violate tau * sigma * ||D2||^2 <= 1");
  }
  if (config.theta < 0.0 || config.theta > 1.0) throw InvalidParameter("theta must lie in [0, 1]");
  if (config.max_iters < 1 || config.check_window < 1) {
    throw InvalidParameter("max_iters and check_window must be positive");
  }

  std::vector<double> weight(T);
  for (std::size_t t = 0; t < T; ++t) weight[t] = data_weight(config.scaling, alpha[t]);

  std::vector<double> x(T);
  std::vector<double> u(T - 2, 0.0);
  if (warm != nullptr && warm->x.size() == T) {
    x = warm->x;
    if (warm->dual.size() == T - 2) u = warm->dual;
  } else {
    switch (config.init) {
      case InitKind::ML:
        for (std::size_t t = 0; t < T; ++t) x[t] = y[t] / psi[t];
        break;
      case InitKind::Ones:
        std::fill(x.begin(), x.end(), 1.0);
        break;
      case InitKind::Custom:
        if (config.x_custom.size() != T) throw InvalidParameter("custom init has wrong length");
        x = config.x_custom;
        break;
    }
  }
  for (double& v : x) v = std::max(v, 0.0);
  for (double& v : u) v = std::clamp(v, -lambda, lambda);

  std::vector<double> x_bar = x;
  std::vector<double> x_prev(T);
  std::vector<double> d2(T - 2);
  std::vector<double> adj(T);

  EstimateResult result;
  double f = objective(y, psi, alpha, lambda, x, config.scaling);
  result.objective_trace.push_back(f);
  std::vector<double> best_x = x;
  std::vector<double> best_u = u;
  double best_f = f;
  double last_check = f;

  int it = 0;
  for (it = 1; it <= config.max_iters; ++it) {
    apply_d2(x_bar, d2);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::clamp(u[j] + sigma * d2[j], -lambda, lambda);
    apply_d2_adjoint(u, adj);
    x_prev = x;
    for (std::size_t t = 0; t < T; ++t) {
      x[t] = kl_prox(x[t] - tau * adj[t], tau, y[t], psi[t], weight[t]);
    }
    for (std::size_t t = 0; t < T; ++t) x_bar[t] = x[t] + config.theta * (x[t] - x_prev[t]);

    if (it % config.check_window == 0) {
      f = objective(y, psi, alpha, lambda, x, config.scaling);
      if (std::isnan(f)) {
        result.objective_trace.push_back(f);
        throw NumericalFailure("solver produced NaN iterates", result.objective_trace);
      }
      result.objective_trace.push_back(f);
      if (f <= best_f) {
        best_f = f;
        best_x = x;
        best_u = u;
      }
      const double scale = std::max(std::abs(f), std::numeric_limits<double>::min());
      if (std::abs(f - last_check) <= config.tol * scale) {
        result.converged = true;
        break;
      }
      last_check = f;
    }
  }
  for (double v : x) {
    if (std::isnan(v)) throw NumericalFailure("solver produced NaN iterates", result.objective_trace);
  }
  result.iterations = std::min(it, config.max_iters);
  result.x_hat = std::move(best_x);
  result.dual = std::move(best_u);
  return result;
}

// Symmetric banded LDL^T without pivoting. band[i * (bw + 1) + k] holds A(i, i - k).
// Quasi-definite matrices factor stably in any order, so negative pivots are allowed.
using Wide = long double;

bool solve_banded_ldlt(std::vector<Wide>& band, std::size_t n, std::size_t bw,
                       std::vector<Wide>& rhs) {
  const std::size_t w = bw + 1;
  auto at = [&](std::size_t i, std::size_t j) -> Wide& { return band[i * w + (i - j)]; };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > bw ? i - bw : 0;
    for (std::size_t j = lo; j < i; ++j) {
      Wide v = at(i, j);
      const std::size_t plo = std::max(lo, j > bw ? j - bw : 0);
      for (std::size_t p = plo; p < j; ++p) v -= at(i, p) * at(j, p) * at(p, p);
      at(i, j) = v / at(j, j);
    }
    Wide d = at(i, i);
    for (std::size_t p = lo; p < i; ++p) d -= at(i, p) * at(i, p) * at(p, p);
    if (!(std::abs(d) > 0.0L) || !std::isfinite(d)) return false;
    at(i, i) = d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > bw ? i - bw : 0;
    for (std::size_t p = lo; p < i; ++p) rhs[i] -= at(i, p) * rhs[p];
  }
  for (std::size_t i = 0; i < n; ++i) rhs[i] /= at(i, i);
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < std::min(n, i + bw + 1); ++k) rhs[i] -= at(k, i) * rhs[k];
  }
  return true;
}

// Newton step for  H du = -g  with H = D2 diag(weight) D2^T + diag(box), solved in
// the augmented form [box D2; D2^T -1/weight] [du; z] = [-g; 0]. The normal form
// loses all precision once a zero observation pins its dual constraint (weight
// grows like the barrier parameter squared). Unknowns are interleaved as
// r0, r1, r2, u0, r3, u1, ... which gives bandwidth 5.
class NewtonSystem {
 public:
  explicit NewtonSystem(std::size_t T) : T_(T), m_(T - 2), n_(2 * T - 2), band_(n_ * 6), rhs_(n_) {}

  bool solve(std::span<const Wide> inv_weight, std::span<const Wide> box,
             std::span<const Wide> grad, std::span<double> step) {
    std::fill(band_.begin(), band_.end(), 0.0L);
    std::fill(rhs_.begin(), rhs_.end(), 0.0L);
    for (std::size_t t = 0; t < T_; ++t) set(pos_r(t), pos_r(t), -inv_weight[t]);
    for (std::size_t j = 0; j < m_; ++j) {
      const std::size_t pu = pos_u(j);
      set(pu, pu, box[j]);
      set(pu, pos_r(j), 1.0L);
      set(pu, pos_r(j + 1), -2.0L);
      set(pu, pos_r(j + 2), 1.0L);
      rhs_[pu] = -grad[j];
    }
    if (!solve_banded_ldlt(band_, n_, 5, rhs_)) return false;
    for (std::size_t j = 0; j < m_; ++j) step[j] = static_cast<double>(rhs_[pos_u(j)]);
    return true;
  }

 private:
  static std::size_t pos_r(std::size_t t) { return t < 2 ? t : 2 * t - 2; }
  static std::size_t pos_u(std::size_t j) { return 2 * j + 3; }
  void set(std::size_t i, std::size_t j, Wide v) {
    if (i < j) std::swap(i, j);
    band_[i * 6 + (i - j)] = v;
  }

  std::size_t T_, m_, n_;
  std::vector<Wide> band_, rhs_;
};

// Barrier method on the dual
//   min_u  -sum_t c_t Y_t ln b_t(u)   s.t. |u_j| <= lambda, b_t(u) >= 0 where Y_t = 0,
// with b = c Psi + D2^T u and c_t the inverse data weight. The primal point is
// recovered as X_t = c_t Y_t / b_t (1 / (s b_t) on zero observations).
EstimateResult estimate_interior_point(std::span<const double> y, std::span<const double> psi,
                                       std::span<const double> alpha, double lambda,
                                       const SolverConfig& config) {
  const std::size_t T = y.size();
  const std::size_t m = T - 2;
  if (!(config.gap_tol > 0.0)) throw InvalidParameter("gap_tol must be positive");
  if (config.max_newton_steps < 1) throw InvalidParameter("max_newton_steps must be positive");

  EstimateResult result;
  if (lambda == 0.0) {
    result.x_hat.resize(T);
    for (std::size_t t = 0; t < T; ++t) result.x_hat[t] = y[t] / psi[t];
    result.objective_trace.push_back(objective(y, psi, alpha, lambda, result.x_hat, config.scaling));
    result.dual.assign(m, 0.0);
    result.converged = true;
    return result;
  }

  std::vector<double> c(T), cy(T);
  std::size_t zeros = 0;
  double mass = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    c[t] = 1.0 / data_weight(config.scaling, alpha[t]);
    cy[t] = c[t] * y[t];
    mass += cy[t];
    if (y[t] == 0.0) ++zeros;
  }
  const double n_constraints = static_cast<double>(2 * m + zeros);

  std::vector<double> u(m, 0.0), u_try(m), b(T), b_try(T), db(T), adj(T), omega(T);
  std::vector<double> grad(m), step(m);
  std::vector<Wide> wratio(T), wgrad(m), wdiag(m);
  NewtonSystem system(T);
  std::vector<double> x(T);

  auto slack = [&](std::span<const double> dual, std::vector<double>& out) {
    apply_d2_adjoint(dual, adj);
    for (std::size_t t = 0; t < T; ++t) out[t] = c[t] * psi[t] + adj[t];
  };
  auto feasible = [&](std::span<const double> dual, const std::vector<double>& slacks) {
    for (double v : dual) {
      if (!(lambda - v > 0.0) || !(lambda + v > 0.0)) return false;
    }
    for (double v : slacks) {
      if (!(v > 0.0)) return false;
    }
    return true;
  };
  // Change of the centering function along u + length * step. Computed from
  // relative slack changes because the function itself grows with s and loses
  // the digits an Armijo test needs.
  auto barrier_change = [&](double length) {
    double total = 0.0;
    for (std::size_t t = 0; t < T; ++t) total -= omega[t] * std::log1p(length * db[t] / b[t]);
    for (std::size_t j = 0; j < m; ++j) {
      total -= std::log1p(-length * step[j] / (lambda - u[j])) +
               std::log1p(length * step[j] / (lambda + u[j]));
    }
    return total;
  };
  auto recover = [&](double s) {
    for (std::size_t t = 0; t < T; ++t) x[t] = (y[t] > 0.0 ? cy[t] : 1.0 / s) / b[t];
  };

  slack(u, b);
  double s = n_constraints / (1.0 + mass);
  // Barrier parameter growth per stage; intermediate stages are centered loosely,
  // only the last one to the precision floor.
  constexpr double kGrowth = 20.0;
  constexpr double kLooseCentering = 1.0;
  int newton = 0;
  bool done = false;
  while (!done) {
    for (std::size_t t = 0; t < T; ++t) omega[t] = y[t] > 0.0 ? s * cy[t] : 1.0;
    const bool last = n_constraints / s <= config.gap_tol * (1.0 + mass);
    const double centering_tol = last ? 1e-11 : kLooseCentering;
    bool centered = false;
    double previous_decrement = kInf;
    while (newton < config.max_newton_steps) {
      for (std::size_t t = 0; t < T; ++t) wratio[t] = static_cast<Wide>(omega[t]) / b[t];
      for (std::size_t j = 0; j < m; ++j) {
        const Wide lo = 1.0L / (static_cast<Wide>(lambda) + u[j]);
        const Wide hi = 1.0L / (static_cast<Wide>(lambda) - u[j]);
        wgrad[j] = -(wratio[j] - 2.0L * wratio[j + 1] + wratio[j + 2]) + hi - lo;
        wdiag[j] = hi * hi + lo * lo;
        grad[j] = static_cast<double>(wgrad[j]);
      }
      for (std::size_t t = 0; t < T; ++t) wratio[t] = static_cast<Wide>(b[t]) * b[t] / omega[t];
      if (!system.solve(wratio, wdiag, wgrad, step)) {
        throw NumericalFailure("interior-point Newton system is singular", result.objective_trace);
      }
      ++newton;
      double slope = 0.0;
      for (std::size_t j = 0; j < m; ++j) slope += grad[j] * step[j];
      if (std::isnan(slope)) throw NumericalFailure("solver produced NaN iterates", result.objective_trace);
      // Near the precision floor Newton stops contracting; treat that as centered.
      if (-slope <= centering_tol || (-slope <= 1e-3 && -slope > 0.25 * previous_decrement)) {
        centered = true;
        break;
      }
      previous_decrement = -slope;

      apply_d2_adjoint(step, db);
      double length = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, length *= 0.5) {
        for (std::size_t j = 0; j < m; ++j) u_try[j] = u[j] + length * step[j];
        for (std::size_t t = 0; t < T; ++t) b_try[t] = b[t] + length * db[t];
        if (!feasible(u_try, b_try)) continue;
        if (barrier_change(length) <= 0.01 * length * slope) {
          if (u_try == u) break;
          u.swap(u_try);
          b.swap(b_try);
          moved = true;
          break;
        }
      }
      if (!moved) {
        // No further progress is representable; accept the point as centered.
        centered = true;
        break;
      }
    }
    recover(s);
    const double f = objective(y, psi, alpha, lambda, x, config.scaling);
    if (std::isnan(f)) throw NumericalFailure("solver produced NaN iterates", result.objective_trace);
    result.objective_trace.push_back(f);
    if (last && centered) {
      result.converged = true;
      done = true;
    } else if (!centered) {
      done = true;
    } else {
      s *= kGrowth;
    }
  }

  result.iterations = newton;
  result.x_hat = x;
  result.dual = u;
  return result;
}

}  // namespace

EstimateResult estimate(std::span<const double> y, std::span<const double> psi,
                        std::span<const double> alpha, double lambda, const SolverConfig& config,
                        const WarmStart* warm) {
  validate_inputs(y, psi, alpha, lambda);
  if (config.method == SolverMethod::ChambollePock) {
    return estimate_chambolle_pock(y, psi, alpha, lambda, config, warm);
  }
  return estimate_interior_point(y, psi, alpha, lambda, config);
}

}  // namespace apure
