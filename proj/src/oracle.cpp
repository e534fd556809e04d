#include "nashopt/oracle.hpp"

#include "nashopt/bounds.hpp"
#include "nashopt/rng.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace nashopt {

JointPoint solve_quadratic_equilibrium(const QuadraticGame& game) {
  game.validate();
  const Matrix H = game.hessian();
  const Vector b = game.offset();
  if (!(min_singular_value(H) > 1e-12 * spectral_norm(H)))
    throw NumericalError("game Hessian is singular; equilibrium is not unique");
  const Vector w = Eigen::FullPivLU<Matrix>(H).solve(-b);
  const double residual = (H * w + b).norm();
  if (!(residual <= 1e-10 * (1.0 + b.norm())))
    throw NumericalError("equilibrium solve residual " + std::to_string(residual) + " exceeds bound");
  return JointPoint::from_stacked(w, game.dims().m);
}

std::vector<double> step_ratios(const RunTrace& trace, const VectorRef& w_star) {
  std::vector<double> out;
  for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
    const double prev = (trace.iterates[k - 1] - w_star).norm();
    const double next = (trace.iterates[k] - w_star).norm();
    out.push_back(prev > 0.0 ? next / prev : 0.0);
  }
  return out;
}

RateEstimate measure_linear_rate(const RunTrace& trace, const VectorRef& w_star, int burn_in) {
  if (burn_in < 0) throw DomainError("burn_in must be non-negative");
  const std::size_t count = trace.iterates.size();
  if (count < static_cast<std::size_t>(burn_in) + 5)
    throw DomainError("trace too short for rate measurement");
  RateEstimate est;
  double log_sum = 0.0;
  for (std::size_t k = static_cast<std::size_t>(burn_in); k + 1 < count; ++k) {
    const double prev = (trace.iterates[k] - w_star).norm();
    const double next = (trace.iterates[k + 1] - w_star).norm();
    if (prev == 0.0 || next == 0.0) {
      est.underflow = true;
      est.rate = 0.0;
      return est;
    }
    log_sum += std::log(next / prev);
    ++est.steps;
  }
  est.rate = std::exp(log_sum / est.steps);
  return est;
}

double FdCheckReport::max_deviation() const {
  double mx = 0.0;
  for (const auto& d : deviations) mx = std::max(mx, d.max_abs_deviation);
  return mx;
}

FdCheckReport fd_check(const SmoothGame& game, const VectorRef& center, int points, double h,
                       std::uint64_t seed, double radius) {
  if (points < 1) throw DomainError("fd_check needs at least one point");
  if (center.size() != game.dims().total()) throw DomainError("fd_check center has wrong length");
  const Dims d = game.dims();
  CounterRng rng = CounterRng(seed).split(0xfdc);
  FdCheckReport report;
  FdDeviation gx{"grad_x_f", 0.0}, gy{"grad_y_g", 0.0}, hess{"hessian", 0.0};
  const ScalarFn f = [&game](const VectorRef& w) { return game.loss_f(w); };
  const ScalarFn g = [&game](const VectorRef& w) { return game.loss_g(w); };
  const VectorFn grad_f = [&game](const VectorRef& w) { return game.grad_x_f(w); };
  const VectorFn F = [&game](const VectorRef& w) { return eval_gradient(game, w); };

  double num = 0.0, den = 0.0;
  for (int p = 0; p < points; ++p) {
    Vector w(d.total());
    for (Index i = 0; i < w.size(); ++i) w[i] = center[i] + rng.uniform(-radius, radius);
    if (game.has_analytic_gradient()) {
      const Vector fd_x = fd_partial_gradient(f, w, h, 0, d.m);
      const Vector fd_y = fd_partial_gradient(g, w, h, d.m, d.n);
      gx.max_abs_deviation = std::max(gx.max_abs_deviation, (fd_x - game.grad_x_f(w)).cwiseAbs().maxCoeff());
      gy.max_abs_deviation = std::max(gy.max_abs_deviation, (fd_y - game.grad_y_g(w)).cwiseAbs().maxCoeff());
    }
    if (game.has_analytic_hessian()) {
      const Matrix fd_h = fd_jacobian(F, w, h);
      hess.max_abs_deviation = std::max(hess.max_abs_deviation, (fd_h - game.hessian(w)).cwiseAbs().maxCoeff());
    }
    if (!game.quadratic() && game.has_analytic_gradient()) {
      const Matrix j1 = fd_jacobian(grad_f, w, h);
      const Matrix j2 = fd_jacobian(grad_f, w, h / 2);
      const Matrix j4 = fd_jacobian(grad_f, w, h / 4);
      num = std::max(num, (j1 - j2).cwiseAbs().maxCoeff());
      den = std::max(den, (j2 - j4).cwiseAbs().maxCoeff());
    }
  }
  if (game.has_analytic_gradient()) {
    report.deviations.push_back(gx);
    report.deviations.push_back(gy);
  }
  if (game.has_analytic_hessian()) report.deviations.push_back(hess);
  if (!game.quadratic() && game.has_analytic_gradient() && den > 0.0) {
    report.richardson_applicable = true;
    report.richardson_ratio = num / den;
  }
  return report;
}

}  // namespace nashopt
