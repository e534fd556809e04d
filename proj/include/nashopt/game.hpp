#pragma once

#include "nashopt/finite_difference.hpp"
#include "nashopt/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace nashopt {

struct Dims {
  Index m = 0;  // player-1 strategy length
  Index n = 0;  // player-2 strategy length
  Index total() const { return m + n; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

// Strategy pair w = (x, y), stored stacked.
class JointPoint {
 public:
  JointPoint() = default;
  JointPoint(const VectorRef& x, const VectorRef& y);
  static JointPoint from_stacked(const VectorRef& w, Index m);

  Dims dims() const { return {m_, w_.size() - m_}; }
  const Vector& stacked() const { return w_; }
  auto x() const { return w_.head(m_); }
  auto y() const { return w_.tail(w_.size() - m_); }

 private:
  Vector w_;
  Index m_ = 0;
};

using MatrixFn = std::function<Matrix(const VectorRef&)>;

// f(x, y) = ½xᵀPx + xᵀQf·y + bfᵀx and g(x, y) = ½yᵀRy + yᵀQg·x + bgᵀy, so
// F(w) = H·w + b with H = [P Qf; Qg R] and b = (bf, bg). P and R are expected
// symmetric; only their action through F matters.
struct QuadraticGame {
  Matrix P, Qf, Qg, R;
  Vector bf, bg;

  Dims dims() const { return {P.rows(), R.rows()}; }
  Matrix hessian() const;
  Vector offset() const;
  void validate() const;
};

// Two-player game evaluated through callbacks on the stacked point w.
// Missing analytic derivatives fall back to central finite differences.
class SmoothGame {
 public:
  struct Callbacks {
    ScalarFn loss_f;
    ScalarFn loss_g;
    VectorFn grad_x_f;  // optional, length m
    VectorFn grad_y_g;  // optional, length n
    MatrixFn hessian;   // optional, (m+n)x(m+n)
  };

  SmoothGame(std::string name, Dims dims, Callbacks callbacks);
  static SmoothGame from_quadratic(std::string name, QuadraticGame quadratic);

  const std::string& name() const { return name_; }
  Dims dims() const { return dims_; }
  bool has_analytic_gradient() const { return bool(cb_.grad_x_f) && bool(cb_.grad_y_g); }
  bool has_analytic_hessian() const { return bool(cb_.hessian); }
  const QuadraticGame* quadratic() const { return quadratic_ ? &*quadratic_ : nullptr; }

  double loss_f(const VectorRef& w) const;
  double loss_g(const VectorRef& w) const;
  Vector grad_x_f(const VectorRef& w) const;
  Vector grad_y_g(const VectorRef& w) const;
  // Full (m+n)x(m+n) game Hessian, diagonal blocks not yet symmetrized.
  Matrix hessian(const VectorRef& w) const;

 private:
  void check_point(const VectorRef& w) const;

  std::string name_;
  Dims dims_;
  Callbacks cb_;
  std::optional<QuadraticGame> quadratic_;
};

// H = S + A. The diagonal blocks of H are symmetrized on construction (they
// are Hessians of f in x and g in y), A carries only the off-diagonal blocks.
struct HessianDecomposition {
  Matrix H, S, A;
  Index m = 0;

  static HessianDecomposition from_hessian(const MatrixRef& H, Index m);
};

// Mixed second-derivative blocks used by SGA and linearized CGD.
struct MixedBlocks {
  Matrix dxy_f;  // m x n
  Matrix dyx_g;  // n x m
};

struct SneReport {
  double gradient_norm = 0.0;
  bool hessian_invertible = false;
  bool hessian_psd = false;
  bool is_stable = false;
  double min_sym_eigenvalue = 0.0;
  double min_abs_singular_value = 0.0;
};

// Stacked game gradient F(w) = (∂x f, ∂y g).
Vector eval_gradient(const SmoothGame& game, const JointPoint& w);
Vector eval_gradient(const SmoothGame& game, const VectorRef& w);

HessianDecomposition eval_hessian(const SmoothGame& game, const JointPoint& w);
HessianDecomposition eval_hessian(const SmoothGame& game, const VectorRef& w);

// Only the two coupling blocks; black-box games pay 2(m+n) gradient
// evaluations here instead of a full Jacobian.
MixedBlocks eval_mixed_blocks(const SmoothGame& game, const VectorRef& w);

// Antisymmetric part assembled from the coupling blocks.
Matrix antisymmetric_part(const MixedBlocks& blocks);

SneReport is_stable_equilibrium(const SmoothGame& game, const JointPoint& w, double tol = 1e-9);

}  // namespace nashopt
