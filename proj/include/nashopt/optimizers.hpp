#pragma once

#include "nashopt/game.hpp"
#include "nashopt/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nashopt {

enum class Method { gd, cgd_lin, sga, sga_frozen, lrsga };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct OptimizerConfig {
  double eta = 0.01;
  double tau = 0.0;
  int max_iters = 1000;
  double grad_tol = 1e-10;
  double divergence_cap = 1e8;
  std::uint64_t seed = 0;

  void validate() const;
};

// Rank-one secant approximations of D∂x f (mu, m x (m+n)) and D∂y g
// (nu, n x (m+n)).
struct SecantState {
  Matrix mu;
  Matrix nu;

  Index m() const { return mu.rows(); }
  Index n() const { return nu.rows(); }
  // Right m x n block of mu, approximating ∂²xy f.
  Matrix coupling_f() const { return mu.rightCols(n()); }
  // Left n x m block of nu, approximating ∂²yx g.
  Matrix coupling_g() const { return nu.leftCols(m()); }
  // [[0, (M − Nᵀ)/2], [(N − Mᵀ)/2, 0]].
  Matrix alpha() const;
};

enum class SecantInitKind { exact, zero, random };

struct SecantInit {
  SecantInitKind kind = SecantInitKind::exact;
  double scale = 0.1;  // entry range for random init
};

SecantInitKind parse_secant_init(std::string_view name);
std::string_view to_string(SecantInitKind kind);

SecantState make_secant_state(const SmoothGame& game, const VectorRef& w0, const SecantInit& init,
                              std::uint64_t seed);

struct SecantUpdate {
  SecantState state;
  bool applied = false;
};

// Broyden-style least-change update; skipped (state returned unchanged)
// when ‖s‖ ≤ 1e−14·(1 + ‖w_next‖).
SecantUpdate secant_update(const SecantState& state, const VectorRef& w_prev, const VectorRef& w_next,
                           const VectorRef& gx_prev, const VectorRef& gx_next, const VectorRef& gy_prev,
                           const VectorRef& gy_next);

// Step increments; the caller applies w_{k+1} = w_k + increment.
Vector gd_step(const VectorRef& F, double eta);
Vector sga_step(const VectorRef& F, const MatrixRef& A, double eta, double tau);
Vector cgd_lin_step(const VectorRef& F, const MatrixRef& dxy_f, const MatrixRef& dyx_g, double eta);
Vector lrsga_step(const VectorRef& F, const SecantState& state, double eta, double tau);

enum class RunStatus { converged, max_iters, diverged, numerical_error };

std::string_view to_string(RunStatus status);

struct RunTrace {
  Method method = Method::gd;
  std::vector<Vector> iterates;
  std::vector<double> grad_norms;
  std::vector<double> dist_to_star;  // empty when w* is unknown
  std::vector<std::int64_t> step_times_ns;
  std::vector<std::pair<double, double>> losses;
  RunStatus status = RunStatus::max_iters;
  std::string message;
  bool fd_gradient = false;  // game lacked analytic gradients
  bool fd_hessian = false;   // curvature blocks came from finite differences
  int secant_skips = 0;

  std::size_t size() const { return iterates.size(); }
  // Iterations actually taken (trace length minus the initial point).
  int iterations() const { return static_cast<int>(iterates.size()) - 1; }
};

// Observes every attempted secant update inside run().
struct SecantEvent {
  int iteration = 0;  // k of the step w_k -> w_{k+1}
  const SecantState* before = nullptr;
  const SecantState* after = nullptr;
  const Vector* step = nullptr;  // s = w_{k+1} − w_k
  const Vector* dgx = nullptr;   // ∂x f(w_{k+1}) − ∂x f(w_k)
  const Vector* dgy = nullptr;
  bool applied = false;
};

struct RunOptions {
  SecantInit init;
  std::optional<SecantState> secant;  // explicit LRSGA start, overrides init
  std::optional<Vector> w_star;  // enables dist_to_star; required by sga_frozen
  bool record_losses = true;
  std::function<void(const SecantEvent&)> on_secant;
};

RunTrace run(const SmoothGame& game, Method method, const OptimizerConfig& cfg, const JointPoint& w0,
             const RunOptions& options = {});

}  // namespace nashopt
