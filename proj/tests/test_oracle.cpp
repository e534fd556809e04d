#include "nashopt/bounds.hpp"
#include "nashopt/oracle.hpp"
#include "nashopt/problems.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace nashopt;
using test::mat;
using test::max_abs;
using test::vec;

namespace {

OptimizerConfig config(double eta, double tau, int iters) {
  OptimizerConfig cfg;
  cfg.eta = eta;
  cfg.tau = tau;
  cfg.max_iters = iters;
  cfg.grad_tol = 1e-14;
  return cfg;
}

}  // namespace

TEST_CASE("solve_quadratic_equilibrium examples") {
  CHECK(max_abs(solve_quadratic_equilibrium(*make_bilinear_intro().quadratic()).stacked()) == 0.0);
  CHECK(max_abs(solve_quadratic_equilibrium(*make_indefinite_example().quadratic()).stacked()) == 0.0);
  QuadraticGame q{mat(1, 1, {1}), mat(1, 1, {0}), mat(1, 1, {0}), mat(1, 1, {1}), vec({1}), vec({1})};
  CHECK(max_abs(solve_quadratic_equilibrium(q).stacked() - vec({-1, -1})) <= 1e-15);
  QuadraticGame singular{mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {1}), vec({1}), vec({0})};
  CHECK_THROWS_AS(solve_quadratic_equilibrium(singular), NumericalError);
}

TEST_CASE("equilibrium residual bound on random quadratics") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto gen = make_random_sne_quadratic({seed, 1 + Index(seed % 8), 1 + Index(seed % 5), 1.0, 0.1});
    const QuadraticGame& q = *gen.game.quadratic();
    const Vector w = solve_quadratic_equilibrium(q).stacked();
    CHECK((q.hessian() * w + q.offset()).norm() <= 1e-10 * (1 + q.offset().norm()));
    CHECK(max_abs(w - gen.w_star) <= 1e-12);
  }
}

TEST_CASE("measure_linear_rate examples") {
  const RunTrace gd = run(make_bilinear_intro(), Method::gd, config(0.7, 0, 200), JointPoint(vec({1}), vec({1})));
  CHECK(std::abs(measure_linear_rate(gd, vec({0, 0})).rate - std::sqrt(0.58)) <= 1e-3);

  const RunTrace div = run(make_indefinite_example(), Method::gd, config(0.1, 0, 10000), JointPoint(vec({1}), vec({-1})));
  CHECK(std::abs(measure_linear_rate(div, vec({0, 0})).rate - 1.1) <= 1e-9);

  const RunTrace sga = run(make_zero_sum_bilinear(mat(1, 1, {1})), Method::sga, config(0.5, 1.0, 40),
                           JointPoint(vec({1}), vec({0})));
  CHECK(std::abs(measure_linear_rate(sga, vec({0, 0})).rate - std::sqrt(0.5)) <= 1e-9);
}

TEST_CASE("measure_linear_rate flags an exact hit and short traces") {
  RunTrace t;
  for (int k = 0; k < 20; ++k) t.iterates.push_back(vec({k < 15 ? std::pow(0.5, k) : 0.0}));
  const RateEstimate est = measure_linear_rate(t, vec({0}), 10);
  CHECK(est.underflow);
  CHECK(est.rate == 0.0);
  CHECK(measure_linear_rate(t, vec({0}), 0).underflow);
  RunTrace shorty;
  shorty.iterates.assign(6, vec({1}));
  CHECK_THROWS_AS(measure_linear_rate(shorty, vec({0}), 10), DomainError);
}

TEST_CASE("fd agreement on the problem zoo") {
  const SmoothGame games[] = {make_bilinear_intro(), make_indefinite_example(),
                              make_zero_sum_bilinear(mat(2, 2, {1, 2, -1, 3})),
                              make_random_sne_quadratic({5, 4, 3, 1.0, 0.3}).game};
  for (const SmoothGame& g : games) {
    const FdCheckReport r = fd_check(g, Vector::Zero(g.dims().total()), 50, 1e-4, 1);
    CHECK(r.max_deviation() <= 1e-6);
    CHECK_FALSE(r.richardson_applicable);
  }
  for (const SmoothGame& g : {test::make_smooth_zero_sum(), test::make_smooth_general_sum()}) {
    const FdCheckReport r = fd_check(g, Vector::Zero(g.dims().total()), 50, 1e-4, 2);
    CHECK(r.max_deviation() <= 1e-6);
  }
}

TEST_CASE("Richardson ratio on the contrastive game") {
  ContrastiveGameSpec spec;
  spec.batch_size = 4;
  spec.embed_dim = 3;
  const SmoothGame game = make_toy_contrastive(spec);
  const FdCheckReport r = fd_check(game, contrastive_initial_point(spec, 0), 10, 1e-4, 3, 0.5);
  REQUIRE(r.richardson_applicable);
  CHECK(r.richardson_ratio == doctest::Approx(4.0).epsilon(0.125));
  CHECK(r.max_deviation() <= 1e-5);
}
