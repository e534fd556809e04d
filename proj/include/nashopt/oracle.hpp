#pragma once

#include "nashopt/finite_difference.hpp"
#include "nashopt/game.hpp"
#include "nashopt/optimizers.hpp"

#include <string>
#include <vector>

namespace nashopt {

// w* = −H⁻¹b by pivoted LU. Throws NumericalError when H is singular
// (σ_min ≤ 1e−12·σ_max) or the residual bound ‖Hw* + b‖ ≤ 1e−10(1 + ‖b‖)
// is not met.
JointPoint solve_quadratic_equilibrium(const QuadraticGame& game);

struct RateEstimate {
  double rate = 0.0;
  bool underflow = false;  // some distance after burn-in was exactly zero
  int steps = 0;           // number of ratios in the window
};

// Geometric mean of ‖w_{k+1} − w*‖ / ‖w_k − w*‖ over iterations after
// burn_in. Needs at least burn_in + 5 iterates.
RateEstimate measure_linear_rate(const RunTrace& trace, const VectorRef& w_star, int burn_in = 10);

// Per-step distance ratios ‖w_{k+1} − w*‖ / ‖w_k − w*‖.
std::vector<double> step_ratios(const RunTrace& trace, const VectorRef& w_star);

struct FdDeviation {
  std::string derivative;  // "grad_x_f", "grad_y_g", "hessian"
  double max_abs_deviation = 0.0;
};

struct FdCheckReport {
  std::vector<FdDeviation> deviations;
  // Richardson consistency: max|D_h − D_{h/2}| / max|D_{h/2} − D_{h/4}| for
  // the player-1 gradient Jacobian, ≈ 4 for a smooth non-quadratic game.
  // Needs an analytic gradient; nested differences only measure noise.
  double richardson_ratio = 0.0;
  bool richardson_applicable = false;
  double max_deviation() const;
};

// Compares analytic derivatives (when present) with central differences at
// `points` seeded points uniform in [−radius, radius]^{m+n} around `center`.
FdCheckReport fd_check(const SmoothGame& game, const VectorRef& center, int points, double h,
                       std::uint64_t seed, double radius = 2.0);

}  // namespace nashopt
