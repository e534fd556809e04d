#include "nashopt/game.hpp"

#include "nashopt/bounds.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace nashopt {

JointPoint::JointPoint(const VectorRef& x, const VectorRef& y) : w_(x.size() + y.size()), m_(x.size()) {
  w_ << x, y;
  if (!w_.allFinite()) throw DomainError("joint point has non-finite entries");
}

JointPoint JointPoint::from_stacked(const VectorRef& w, Index m) {
  if (m < 0 || m > w.size()) throw DomainError("player-1 dimension exceeds point length");
  return JointPoint(w.head(m), w.tail(w.size() - m));
}

Matrix QuadraticGame::hessian() const {
  const Dims d = dims();
  Matrix H(d.total(), d.total());
  H << P, Qf, Qg, R;
  return H;
}

Vector QuadraticGame::offset() const {
  Vector b(bf.size() + bg.size());
  b << bf, bg;
  return b;
}

void QuadraticGame::validate() const {
  const Index m = P.rows();
  const Index n = R.rows();
  if (m == 0 || n == 0) throw DomainError("quadratic game needs both players (m, n >= 1)");
  if (P.cols() != m || R.cols() != n || Qf.rows() != m || Qf.cols() != n || Qg.rows() != n ||
      Qg.cols() != m || bf.size() != m || bg.size() != n)
    throw DomainError("quadratic game blocks have inconsistent shapes");
  if (!P.allFinite() || !Qf.allFinite() || !Qg.allFinite() || !R.allFinite() || !bf.allFinite() ||
      !bg.allFinite())
    throw DomainError("quadratic game blocks must be finite");
}

SmoothGame::SmoothGame(std::string name, Dims dims, Callbacks callbacks)
    : name_(std::move(name)), dims_(dims), cb_(std::move(callbacks)) {
  if (dims_.m <= 0 || dims_.n <= 0) throw DomainError("game needs both players (m, n >= 1)");
  if (!cb_.loss_f || !cb_.loss_g) throw DomainError("game needs both loss functions");
  if (bool(cb_.grad_x_f) != bool(cb_.grad_y_g))
    throw DomainError("analytic gradients must be given for both players or neither");
}

SmoothGame SmoothGame::from_quadratic(std::string name, QuadraticGame q) {
  q.validate();
  const Dims d = q.dims();
  const Index m = d.m;
  auto shared = std::make_shared<const QuadraticGame>(q);
  Callbacks cb;
  cb.loss_f = [shared, m](const VectorRef& w) {
    const auto x = w.head(m);
    const auto y = w.tail(w.size() - m);
    return 0.5 * x.dot(shared->P * x) + x.dot(shared->Qf * y) + shared->bf.dot(x);
  };
  cb.loss_g = [shared, m](const VectorRef& w) {
    const auto x = w.head(m);
    const auto y = w.tail(w.size() - m);
    return 0.5 * y.dot(shared->R * y) + y.dot(shared->Qg * x) + shared->bg.dot(y);
  };
  cb.grad_x_f = [shared, m](const VectorRef& w) -> Vector {
    return shared->P * w.head(m) + shared->Qf * w.tail(w.size() - m) + shared->bf;
  };
  cb.grad_y_g = [shared, m](const VectorRef& w) -> Vector {
    return shared->Qg * w.head(m) + shared->R * w.tail(w.size() - m) + shared->bg;
  };
  Matrix H = q.hessian();
  cb.hessian = [H](const VectorRef&) { return H; };
  SmoothGame game(std::move(name), d, std::move(cb));
  game.quadratic_ = std::move(q);
  return game;
}

void SmoothGame::check_point(const VectorRef& w) const {
  if (w.size() != dims_.total())
    throw DomainError("point has length " + std::to_string(w.size()) + ", game expects " +
                      std::to_string(dims_.total()));
}

double SmoothGame::loss_f(const VectorRef& w) const {
  check_point(w);
  return cb_.loss_f(w);
}

double SmoothGame::loss_g(const VectorRef& w) const {
  check_point(w);
  return cb_.loss_g(w);
}

Vector SmoothGame::grad_x_f(const VectorRef& w) const {
  check_point(w);
  if (cb_.grad_x_f) return cb_.grad_x_f(w);
  return fd_partial_gradient(cb_.loss_f, w, default_fd_step(w), 0, dims_.m);
}

Vector SmoothGame::grad_y_g(const VectorRef& w) const {
  check_point(w);
  if (cb_.grad_y_g) return cb_.grad_y_g(w);
  return fd_partial_gradient(cb_.loss_g, w, default_fd_step(w), dims_.m, dims_.n);
}

Matrix SmoothGame::hessian(const VectorRef& w) const {
  check_point(w);
  if (cb_.hessian) return cb_.hessian(w);
  const Index m = dims_.m;
  const Index n = dims_.n;
  const double h = default_fd_step(w);
  Matrix H(m + n, m + n);
  H.topRows(m) = fd_jacobian([this](const VectorRef& p) { return grad_x_f(p); }, w, h);
  H.bottomRows(n) = fd_jacobian([this](const VectorRef& p) { return grad_y_g(p); }, w, h);
  return H;
}

HessianDecomposition HessianDecomposition::from_hessian(const MatrixRef& H_in, Index m) {
  const Index d = H_in.rows();
  if (H_in.cols() != d || m <= 0 || m >= d) throw DomainError("game Hessian must be square with m, n >= 1");
  const Index n = d - m;
  HessianDecomposition dec;
  dec.m = m;
  dec.H = H_in;
  dec.H.topLeftCorner(m, m) = 0.5 * (H_in.topLeftCorner(m, m) + H_in.topLeftCorner(m, m).transpose());
  dec.H.bottomRightCorner(n, n) =
      0.5 * (H_in.bottomRightCorner(n, n) + H_in.bottomRightCorner(n, n).transpose());

  const Matrix h12 = dec.H.topRightCorner(m, n);
  const Matrix h21 = dec.H.bottomLeftCorner(n, m);
  const Matrix s12 = 0.5 * (h12 + h21.transpose());
  const Matrix a12 = 0.5 * (h12 - h21.transpose());

  dec.S.setZero(d, d);
  dec.S.topLeftCorner(m, m) = dec.H.topLeftCorner(m, m);
  dec.S.bottomRightCorner(n, n) = dec.H.bottomRightCorner(n, n);
  dec.S.topRightCorner(m, n) = s12;
  dec.S.bottomLeftCorner(n, m) = s12.transpose();

  dec.A.setZero(d, d);
  dec.A.topRightCorner(m, n) = a12;
  dec.A.bottomLeftCorner(n, m) = -a12.transpose();
  return dec;
}

Vector eval_gradient(const SmoothGame& game, const VectorRef& w) {
  const Dims d = game.dims();
  Vector F(d.total());
  F.head(d.m) = game.grad_x_f(w);
  F.tail(d.n) = game.grad_y_g(w);
  for (Index i = 0; i < F.size(); ++i)
    if (!std::isfinite(F[i]))
      throw EvaluationError("non-finite game gradient at coordinate " + std::to_string(i), i);
  return F;
}

Vector eval_gradient(const SmoothGame& game, const JointPoint& w) {
  if (!(w.dims() == game.dims())) throw DomainError("joint point dimensions do not match the game");
  return eval_gradient(game, w.stacked());
}

HessianDecomposition eval_hessian(const SmoothGame& game, const VectorRef& w) {
  Matrix H = game.hessian(w);
  if (!H.allFinite()) throw EvaluationError("non-finite game Hessian");
  return HessianDecomposition::from_hessian(H, game.dims().m);
}

HessianDecomposition eval_hessian(const SmoothGame& game, const JointPoint& w) {
  if (!(w.dims() == game.dims())) throw DomainError("joint point dimensions do not match the game");
  return eval_hessian(game, w.stacked());
}

MixedBlocks eval_mixed_blocks(const SmoothGame& game, const VectorRef& w) {
  const Dims d = game.dims();
  MixedBlocks blocks;
  if (game.has_analytic_hessian()) {
    const Matrix H = game.hessian(w);
    blocks.dxy_f = H.topRightCorner(d.m, d.n);
    blocks.dyx_g = H.bottomLeftCorner(d.n, d.m);
  } else {
    const double h = default_fd_step(w);
    blocks.dxy_f =
        fd_partial_jacobian([&game](const VectorRef& p) { return game.grad_x_f(p); }, w, h, d.m, d.n);
    blocks.dyx_g =
        fd_partial_jacobian([&game](const VectorRef& p) { return game.grad_y_g(p); }, w, h, 0, d.m);
  }
  if (!blocks.dxy_f.allFinite() || !blocks.dyx_g.allFinite())
    throw EvaluationError("non-finite mixed second derivatives");
  return blocks;
}

Matrix antisymmetric_part(const MixedBlocks& blocks) {
  const Index m = blocks.dxy_f.rows();
  const Index n = blocks.dxy_f.cols();
  const Matrix a12 = 0.5 * (blocks.dxy_f - blocks.dyx_g.transpose());
  Matrix A = Matrix::Zero(m + n, m + n);
  A.topRightCorner(m, n) = a12;
  A.bottomLeftCorner(n, m) = -a12.transpose();
  return A;
}

SneReport is_stable_equilibrium(const SmoothGame& game, const JointPoint& w, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  SneReport report;
  report.gradient_norm = eval_gradient(game, w).norm();
  const HessianDecomposition dec = eval_hessian(game, w);
  report.min_sym_eigenvalue = min_symmetric_eigenvalue(dec.S);
  report.min_abs_singular_value = min_singular_value(dec.H);
  report.hessian_psd = report.min_sym_eigenvalue >= -tol;
  report.hessian_invertible = report.min_abs_singular_value > tol * spectral_norm(dec.H);
  report.is_stable = report.gradient_norm <= tol && report.hessian_invertible && report.hessian_psd;
  return report;
}

}  // namespace nashopt
