#include "nashopt/optimizers.hpp"

#include "nashopt/rng.hpp"

#include <chrono>
#include <cmath>
#include <utility>

namespace nashopt {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::gd: return "gd";
    case Method::cgd_lin: return "cgd_lin";
    case Method::sga: return "sga";
    case Method::sga_frozen: return "sga_frozen";
    case Method::lrsga: return "lrsga";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::gd, Method::cgd_lin, Method::sga, Method::sga_frozen, Method::lrsga})
    if (to_string(m) == name) return m;
  if (name == "cgd-lin") return Method::cgd_lin;
  if (name == "sga-frozen") return Method::sga_frozen;
  throw DomainError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iters: return "max_iters";
    case RunStatus::diverged: return "diverged";
    case RunStatus::numerical_error: return "numerical_error";
  }
  return "?";
}

SecantInitKind parse_secant_init(std::string_view name) {
  if (name == "exact") return SecantInitKind::exact;
  if (name == "zero") return SecantInitKind::zero;
  if (name == "random") return SecantInitKind::random;
  throw DomainError("unknown secant init '" + std::string(name) + "'");
}

std::string_view to_string(SecantInitKind kind) {
  switch (kind) {
    case SecantInitKind::exact: return "exact";
    case SecantInitKind::zero: return "zero";
    case SecantInitKind::random: return "random";
  }
  return "?";
}

void OptimizerConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be positive and finite");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be non-negative and finite");
  if (max_iters < 1) throw DomainError("max_iters must be at least 1");
  if (!(grad_tol > 0.0)) throw DomainError("grad_tol must be positive");
  if (!(divergence_cap > 0.0)) throw DomainError("divergence_cap must be positive");
}

Matrix SecantState::alpha() const {
  const Index m_ = m();
  const Index n_ = n();
  const Matrix M = coupling_f();
  const Matrix N = coupling_g();
  Matrix a = Matrix::Zero(m_ + n_, m_ + n_);
  a.topRightCorner(m_, n_) = 0.5 * (M - N.transpose());
  a.bottomLeftCorner(n_, m_) = 0.5 * (N - M.transpose());
  return a;
}

SecantState make_secant_state(const SmoothGame& game, const VectorRef& w0, const SecantInit& init,
                              std::uint64_t seed) {
  const Dims d = game.dims();
  SecantState state;
  switch (init.kind) {
    case SecantInitKind::exact: {
      const Matrix H = game.hessian(w0);
      state.mu = H.topRows(d.m);
      state.nu = H.bottomRows(d.n);
      break;
    }
    case SecantInitKind::zero:
      state.mu = Matrix::Zero(d.m, d.total());
      state.nu = Matrix::Zero(d.n, d.total());
      break;
    case SecantInitKind::random: {
      if (!(init.scale >= 0.0)) throw DomainError("random secant init scale must be non-negative");
      CounterRng rng = CounterRng(seed).split(0x5ec4);
      state.mu.resize(d.m, d.total());
      state.nu.resize(d.n, d.total());
      for (Index j = 0; j < d.total(); ++j)
        for (Index i = 0; i < d.m; ++i) state.mu(i, j) = rng.uniform(-init.scale, init.scale);
      for (Index j = 0; j < d.total(); ++j)
        for (Index i = 0; i < d.n; ++i) state.nu(i, j) = rng.uniform(-init.scale, init.scale);
      break;
    }
  }
  return state;
}

SecantUpdate secant_update(const SecantState& state, const VectorRef& w_prev, const VectorRef& w_next,
                           const VectorRef& gx_prev, const VectorRef& gx_next, const VectorRef& gy_prev,
                           const VectorRef& gy_next) {
  const Vector s = w_next - w_prev;
  if (s.norm() <= 1e-14 * (1.0 + w_next.norm())) return {state, false};
  const double ss = s.squaredNorm();
  SecantUpdate out{state, true};
  const Vector rx = (gx_next - gx_prev) - state.mu * s;
  const Vector ry = (gy_next - gy_prev) - state.nu * s;
  out.state.mu.noalias() += rx * (s.transpose() / ss);
  out.state.nu.noalias() += ry * (s.transpose() / ss);
  return out;
}

Vector gd_step(const VectorRef& F, double eta) { return -eta * F; }

Vector sga_step(const VectorRef& F, const MatrixRef& A, double eta, double tau) {
  return -eta * (F - tau * (A * F));
}

Vector cgd_lin_step(const VectorRef& F, const MatrixRef& dxy_f, const MatrixRef& dyx_g, double eta) {
  const Index m = dxy_f.rows();
  const Index n = dxy_f.cols();
  Vector MF(m + n);
  MF.head(m) = F.head(m) - eta * (dxy_f * F.tail(n));
  MF.tail(n) = F.tail(n) - eta * (dyx_g * F.head(m));
  return -eta * MF;
}

Vector lrsga_step(const VectorRef& F, const SecantState& state, double eta, double tau) {
  return sga_step(F, state.alpha(), eta, tau);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Evaluated {
  Vector gx, gy, F;
};

Evaluated evaluate(const SmoothGame& game, const Vector& w) {
  Evaluated e;
  e.gx = game.grad_x_f(w);
  e.gy = game.grad_y_g(w);
  e.F.resize(e.gx.size() + e.gy.size());
  e.F << e.gx, e.gy;
  if (!e.F.allFinite()) throw EvaluationError("non-finite game gradient");
  return e;
}

}  // namespace

RunTrace run(const SmoothGame& game, Method method, const OptimizerConfig& cfg, const JointPoint& w0,
             const RunOptions& options) {
  cfg.validate();
  if (!(w0.dims() == game.dims())) throw DomainError("initial point dimensions do not match the game");
  if (options.w_star && options.w_star->size() != game.dims().total())
    throw DomainError("w_star dimensions do not match the game");
  if (options.secant && (options.secant->mu.rows() != game.dims().m || options.secant->nu.rows() != game.dims().n ||
                         options.secant->mu.cols() != game.dims().total() ||
                         options.secant->nu.cols() != game.dims().total()))
    throw DomainError("secant state dimensions do not match the game");
  if (method == Method::sga_frozen && !options.w_star)
    throw DomainError("sga_frozen needs a known equilibrium w_star");

  RunTrace trace;
  trace.method = method;
  trace.fd_gradient = !game.has_analytic_gradient();
  trace.fd_hessian = !game.has_analytic_hessian() &&
                     (method == Method::sga || method == Method::cgd_lin || method == Method::sga_frozen ||
                      (method == Method::lrsga && !options.secant && options.init.kind == SecantInitKind::exact));

  auto record = [&](const Vector& w, const Evaluated& e, std::int64_t ns) {
    trace.iterates.push_back(w);
    trace.grad_norms.push_back(e.F.norm());
    if (options.w_star) trace.dist_to_star.push_back((w - *options.w_star).norm());
    trace.step_times_ns.push_back(ns);
    if (options.record_losses) trace.losses.emplace_back(game.loss_f(w), game.loss_g(w));
  };

  Vector w = w0.stacked();
  Evaluated cur;
  SecantState secant;
  Matrix frozen_A;
  try {
    const auto t0 = Clock::now();
    cur = evaluate(game, w);
    if (method == Method::lrsga)
      secant = options.secant ? *options.secant : make_secant_state(game, w, options.init, cfg.seed);
    if (method == Method::sga_frozen) frozen_A = eval_hessian(game, *options.w_star).A;
    const auto t1 = Clock::now();
    record(w, cur, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  } catch (const std::exception& e) {
    trace.status = RunStatus::numerical_error;
    trace.message = e.what();
    return trace;
  }

  for (int k = 0;; ++k) {
    if (trace.grad_norms.back() <= cfg.grad_tol) {
      trace.status = RunStatus::converged;
      break;
    }
    if (k >= cfg.max_iters) {
      trace.status = RunStatus::max_iters;
      break;
    }
    try {
      const auto t0 = Clock::now();
      Vector inc;
      switch (method) {
        case Method::gd:
          inc = gd_step(cur.F, cfg.eta);
          break;
        case Method::sga:
          inc = sga_step(cur.F, antisymmetric_part(eval_mixed_blocks(game, w)), cfg.eta, cfg.tau);
          break;
        case Method::sga_frozen:
          inc = sga_step(cur.F, frozen_A, cfg.eta, cfg.tau);
          break;
        case Method::cgd_lin: {
          const MixedBlocks b = eval_mixed_blocks(game, w);
          inc = cgd_lin_step(cur.F, b.dxy_f, b.dyx_g, cfg.eta);
          break;
        }
        case Method::lrsga:
          inc = lrsga_step(cur.F, secant, cfg.eta, cfg.tau);
          break;
      }
      Vector w_next = w + inc;
      if (!w_next.allFinite()) {
        trace.status = RunStatus::numerical_error;
        trace.message = "non-finite iterate at iteration " + std::to_string(k + 1);
        break;
      }
      Evaluated next = evaluate(game, w_next);
      std::optional<SecantUpdate> up;
      if (method == Method::lrsga) up = secant_update(secant, w, w_next, cur.gx, next.gx, cur.gy, next.gy);
      const auto t1 = Clock::now();
      if (up) {
        // Observer time stays out of the step timing.
        if (options.on_secant) {
          const Vector s = w_next - w;
          const Vector dgx = next.gx - cur.gx;
          const Vector dgy = next.gy - cur.gy;
          options.on_secant({k, &secant, &up->state, &s, &dgx, &dgy, up->applied});
        }
        if (!up->applied) ++trace.secant_skips;
        secant = std::move(up->state);
      }
      w = std::move(w_next);
      cur = std::move(next);
      record(w, cur, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
      if (w.norm() > cfg.divergence_cap) {
        trace.status = RunStatus::diverged;
        break;
      }
    } catch (const std::exception& e) {
      trace.status = RunStatus::numerical_error;
      trace.message = e.what();
      break;
    }
  }
  return trace;
}

}  // namespace nashopt
