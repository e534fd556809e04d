#pragma once

#include "nashopt/game.hpp"
#include "nashopt/optimizers.hpp"
#include "nashopt/problems.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nashopt::harness {

enum ExitCode : int { kOk = 0, kAdmissibility = 2, kNumerical = 3, kUsage = 64 };

struct ProblemOptions {
  std::string name = "bilinear-intro";
  // random-quadratic / zero-sum-bilinear sizes
  Index m = 2;
  Index n = 2;
  double lambda_floor = 1.0;
  double coupling_scale = 0.3;
  std::vector<double> payoff;  // row-major m x n; empty means identity-like [1]
  // toy-contrastive
  ContrastiveGameSpec contrastive;
};

struct Problem {
  SmoothGame game;
  std::optional<Vector> w_star;
  Vector default_w0;
};

// Problem names: bilinear-intro, indefinite-example, zero-sum-bilinear,
// random-quadratic, toy-contrastive. `seed` drives random generators and
// the default initial point.
Problem build_problem(const ProblemOptions& options, std::uint64_t seed);

// Header: iter, w_0..w_{d-1}, grad_norm, dist_to_star, loss_f, loss_g, step_time_ns.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nashopt::harness
