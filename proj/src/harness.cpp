#include "nashopt/harness.hpp"

#include "nashopt/bounds.hpp"
#include "nashopt/oracle.hpp"
#include "nashopt/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace nashopt::harness {

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

Problem build_problem(const ProblemOptions& opt, std::uint64_t seed) {
  auto uniform_point = [seed](Index d) {
    CounterRng rng = CounterRng(seed).split(0x30);
    Vector w(d);
    for (Index i = 0; i < d; ++i) w[i] = rng.uniform(-1.0, 1.0);
    return w;
  };
  auto quadratic_problem = [&](SmoothGame game) {
    Vector w_star = solve_quadratic_equilibrium(*game.quadratic()).stacked();
    Vector w0 = uniform_point(game.dims().total());
    return Problem{std::move(game), std::move(w_star), std::move(w0)};
  };

  if (opt.name == "bilinear-intro") return quadratic_problem(make_bilinear_intro());
  if (opt.name == "indefinite-example") return quadratic_problem(make_indefinite_example());
  if (opt.name == "zero-sum-bilinear") {
    Matrix payoff;
    if (opt.payoff.empty()) {
      payoff = Matrix::Identity(1, 1);
    } else {
      if (static_cast<Index>(opt.payoff.size()) != opt.m * opt.n)
        throw DomainError("--payoff needs m*n row-major entries");
      payoff = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          opt.payoff.data(), opt.m, opt.n);
    }
    if (payoff.rows() == payoff.cols() && min_singular_value(payoff) > 1e-12 * spectral_norm(payoff))
      return quadratic_problem(make_zero_sum_bilinear(payoff));
    SmoothGame game = make_zero_sum_bilinear(payoff);
    Vector w0 = uniform_point(game.dims().total());
    return Problem{std::move(game), std::nullopt, std::move(w0)};
  }
  if (opt.name == "random-quadratic") {
    RandomQuadraticSpec spec{seed, opt.m, opt.n, opt.lambda_floor, opt.coupling_scale};
    GameWithEquilibrium gen = make_random_sne_quadratic(spec);
    Vector w0 = uniform_point(gen.game.dims().total());
    return Problem{std::move(gen.game), std::move(gen.w_star), std::move(w0)};
  }
  if (opt.name == "toy-contrastive") {
    ContrastiveGameSpec spec = opt.contrastive;
    spec.data_seed = seed;
    SmoothGame game = make_toy_contrastive(spec);
    Vector w0 = contrastive_initial_point(spec, seed);
    return Problem{std::move(game), std::nullopt, std::move(w0)};
  }
  throw DomainError("unknown problem '" + opt.name + "'");
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  const Index d = trace.iterates.empty() ? 0 : trace.iterates.front().size();
  out << "iter";
  for (Index i = 0; i < d; ++i) out << ",w_" << i;
  out << ",grad_norm,dist_to_star,loss_f,loss_g,step_time_ns\n";
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    out << k;
    for (Index i = 0; i < d; ++i) out << ',' << num(trace.iterates[k][i]);
    out << ',' << num(trace.grad_norms[k]) << ',';
    if (!trace.dist_to_star.empty()) out << num(trace.dist_to_star[k]);
    out << ',';
    if (!trace.losses.empty()) out << num(trace.losses[k].first) << ',' << num(trace.losses[k].second);
    else out << ',';
    out << ',' << trace.step_times_ns[k] << '\n';
  }
}

namespace {

struct RunFlags {
  std::string method = "gd";
  double eta = 0.01;
  double tau = 0.0;
  int iters = 1000;
  double tol = 1e-10;
  double cap = 1e8;
  std::uint64_t seed = 0;
  std::string init = "exact";
  double init_scale = 0.1;
  std::vector<double> w0;
  int burn_in = 10;
};

void add_problem_flags(CLI::App* cmd, ProblemOptions& p, std::uint64_t& seed, bool& fd_gradients) {
  cmd->add_option("--config", "flat key=value file; command-line flags take precedence");
  cmd->add_option("--problem", p.name, "bilinear-intro | indefinite-example | zero-sum-bilinear | "
                                       "random-quadratic | toy-contrastive")
      ->check(CLI::IsMember({"bilinear-intro", "indefinite-example", "zero-sum-bilinear", "random-quadratic",
                             "toy-contrastive"}));
  cmd->add_option("--m", p.m, "player-1 dimension (random-quadratic, zero-sum-bilinear)")->check(CLI::PositiveNumber);
  cmd->add_option("--n", p.n, "player-2 dimension (random-quadratic, zero-sum-bilinear)")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda-floor", p.lambda_floor, "random-quadratic diagonal-block eigenvalue floor");
  cmd->add_option("--coupling", p.coupling_scale, "random-quadratic coupling entry scale");
  cmd->add_option("--payoff", p.payoff, "zero-sum payoff matrix, row-major")->delimiter(',');
  cmd->add_option("--batch", p.contrastive.batch_size, "toy-contrastive batch size N");
  cmd->add_option("--d-img", p.contrastive.d_img, "toy-contrastive image feature dimension");
  cmd->add_option("--d-txt", p.contrastive.d_txt, "toy-contrastive text feature dimension");
  cmd->add_option("--embed", p.contrastive.embed_dim, "toy-contrastive embedding dimension");
  cmd->add_option("--temp", p.contrastive.temperature, "toy-contrastive temperature");
  cmd->add_flag("--fd-gradients", fd_gradients, "toy-contrastive: use finite-difference gradients");
  cmd->add_option("--seed", seed, "problem/data/initialization seed");
}

void add_run_flags(CLI::App* cmd, RunFlags& r) {
  cmd->add_option("--eta", r.eta, "stepsize");
  cmd->add_option("--tau", r.tau, "adjustment parameter");
  cmd->add_option("--iters", r.iters, "maximum iterations");
  cmd->add_option("--tol", r.tol, "gradient-norm stopping tolerance");
  cmd->add_option("--cap", r.cap, "divergence cap on the iterate norm");
  cmd->add_option("--init", r.init, "LRSGA secant initialization")
      ->check(CLI::IsMember({"exact", "zero", "random"}));
  cmd->add_option("--init-scale", r.init_scale, "entry range for random secant initialization");
  cmd->add_option("--w0", r.w0, "initial point, comma separated")->delimiter(',');
  cmd->add_option("--burn-in", r.burn_in, "iterations skipped by the rate estimate");
}

OptimizerConfig make_config(const RunFlags& r, std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.eta = r.eta;
  cfg.tau = r.tau;
  cfg.max_iters = r.iters;
  cfg.grad_tol = r.tol;
  cfg.divergence_cap = r.cap;
  cfg.seed = seed;
  return cfg;
}

struct RunOutcome {
  RunTrace trace;
  std::optional<RateEstimate> rate;
  std::int64_t wall_ns = 0;
};

RunOutcome execute(const Problem& problem, Method method, const RunFlags& r, std::uint64_t seed) {
  Vector w0 = r.w0.empty() ? problem.default_w0 : to_vector(r.w0);
  if (w0.size() != problem.game.dims().total())
    throw CLI::ValidationError("--w0", "expected " + std::to_string(problem.game.dims().total()) + " entries");
  RunOptions options;
  options.init.kind = parse_secant_init(r.init);
  options.init.scale = r.init_scale;
  options.w_star = problem.w_star;
  RunOutcome outcome;
  const auto t0 = std::chrono::steady_clock::now();
  outcome.trace = run(problem.game, method, make_config(r, seed),
                      JointPoint::from_stacked(w0, problem.game.dims().m), options);
  outcome.wall_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
  if (problem.w_star) {
    const int burn = static_cast<int>(outcome.trace.size()) >= r.burn_in + 5 ? r.burn_in : 0;
    if (outcome.trace.size() >= static_cast<std::size_t>(burn) + 5)
      outcome.rate = measure_linear_rate(outcome.trace, *problem.w_star, burn);
  }
  return outcome;
}

double mean_step_ns(const RunTrace& trace) {
  if (trace.step_times_ns.size() < 2) return 0.0;
  const double total = std::accumulate(trace.step_times_ns.begin() + 1, trace.step_times_ns.end(), 0.0);
  return total / static_cast<double>(trace.step_times_ns.size() - 1);
}

// Expands `--config path` into flags for every key the command line does not
// already set. Keys mirror long flag names; `#` starts a comment.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end() || std::next(it) == args.end()) return args;
  const std::string path = *std::next(it);
  args.erase(it, std::next(it, 2));
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read '" + path + "'");
  std::vector<std::string> injected;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--config", path + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string flag = "--" + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const bool on_command_line = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (on_command_line) continue;
    if (flag == "--fd-gradients") {
      if (value == "true" || value == "1") injected.push_back(flag);
      continue;
    }
    injected.push_back(flag);
    injected.push_back(value);
  }
  // Subcommand name stays first.
  args.insert(args.begin() + (args.empty() ? 0 : 1), injected.begin(), injected.end());
  return args;
}

std::ostream* open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return &fallback;
  file.open(path, std::ios::binary);
  if (!file) throw CLI::ValidationError("--out", "cannot open '" + path + "'");
  return &file;
}

int cmd_bounds(const ProblemOptions& popt, std::uint64_t seed, const std::vector<double>& at, std::ostream& out,
               std::ostream& err) {
  const Problem problem = build_problem(popt, seed);
  Vector w = problem.w_star ? *problem.w_star : Vector::Zero(problem.game.dims().total());
  if (!at.empty()) w = to_vector(at);
  if (w.size() != problem.game.dims().total())
    throw CLI::ValidationError("--at", "expected " + std::to_string(problem.game.dims().total()) + " entries");
  ParameterBounds b;
  try {
    b = parameter_bounds(eval_hessian(problem.game, w));
  } catch (const AdmissibilityError& e) {
    err << "error: " << e.what() << '\n';
    return kAdmissibility;
  }
  const SpectralSummary& s = b.spectrum;
  out << "quantity,value\n";
  out << "norm_S," << num(s.norm_S) << '\n';
  out << "norm_A," << num(s.norm_A) << '\n';
  out << "norm_H," << num(s.norm_H) << '\n';
  out << "lambda_min," << num(s.lambda_min_real) << '\n';
  out << "sigma_min," << num(s.sigma_min) << '\n';
  out << "tau_max," << num(b.tau_max) << '\n';
  out << "tau_max_ism," << num(b.tau_max_ism) << '\n';
  // With S = 0 every τ > 0 is admissible; report around τ = 1/‖A‖, where
  // eta_max(τ) peaks.
  const double ref = std::isfinite(b.tau_max) ? b.tau_max : 1.0 / s.norm_A;
  const char* ref_name = std::isfinite(b.tau_max) ? "tau_max" : "inv_norm_A";
  for (double frac : {0.5, 0.9, 0.99}) {
    const double tau = frac * ref;
    const std::string tag = num(frac) + "*" + ref_name;
    out << "tau(" << tag << ")," << num(tau) << '\n';
    out << "eta_max(" << tag << ")," << num(b.eta_max(tau)) << '\n';
    out << "h(" << tag << ")," << num(b.h(tau)) << '\n';
    out << "kappa(" << tag << ")," << num(b.kappa(tau)) << '\n';
    out << "L(" << tag << ")," << num(b.lipschitz(tau)) << '\n';
  }
  out << "eta_max(tau=1)," << num(b.eta_max(1.0)) << '\n';
  return kOk;
}

int cmd_run(const ProblemOptions& popt, std::uint64_t seed, const RunFlags& r, const std::string& out_path,
            std::ostream& out, std::ostream& err) {
  const Problem problem = build_problem(popt, seed);
  const Method method = parse_method(r.method);
  if (method == Method::sga_frozen && !problem.w_star) {
    err << "error: sga_frozen needs a problem with a known equilibrium\n";
    return kUsage;
  }
  const RunOutcome o = execute(problem, method, r, seed);
  std::ofstream file;
  std::ostream* csv = open_output(out_path, file, out);
  write_trace_csv(*csv, o.trace);
  std::ostream& summary = csv == &out ? err : out;
  summary << "status=" << to_string(o.trace.status) << " iterations=" << o.trace.iterations()
          << " final_grad_norm=" << num(o.trace.grad_norms.back()) << " rate="
          << (o.rate ? num(o.rate->rate) : std::string("nan")) << " wall_time_ns=" << o.wall_ns;
  if (o.trace.fd_gradient) summary << " fd_gradient=1";
  if (o.trace.fd_hessian) summary << " fd_hessian=1";
  if (!o.trace.message.empty()) summary << " message=\"" << o.trace.message << '"';
  summary << '\n';
  return o.trace.status == RunStatus::numerical_error ? kNumerical : kOk;
}

int cmd_compare(const ProblemOptions& popt, std::uint64_t seed, const RunFlags& r, const std::string& method_a,
                const std::string& method_b, int repeats, int jobs, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
  const Method ma = parse_method(method_a);
  const Method mb = parse_method(method_b);
  struct Row {
    RunOutcome a, b;
    std::string error;
  };
  std::vector<Row> rows(static_cast<std::size_t>(repeats));
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
  for (int rep = 0; rep < repeats; ++rep) {
    Row& row = rows[static_cast<std::size_t>(rep)];
    try {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(rep);
      const Problem problem = build_problem(popt, s);
      row.a = execute(problem, ma, r, s);
      row.b = execute(problem, mb, r, s);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  std::ofstream file;
  std::ostream* csv = open_output(out_path, file, out);
  *csv << "repeat,seed,method_a,status_a,iters_a,loss_f_a,loss_g_a,mean_step_ns_a,"
          "method_b,status_b,iters_b,loss_f_b,loss_g_b,mean_step_ns_b,speedup_b_over_a\n";
  bool numerical = false;
  double sum_a = 0.0, sum_b = 0.0;
  for (int rep = 0; rep < repeats; ++rep) {
    const Row& row = rows[static_cast<std::size_t>(rep)];
    if (!row.error.empty()) {
      err << "error: repeat " << rep << ": " << row.error << '\n';
      return kNumerical;
    }
    auto side = [&](const RunOutcome& o, Method m) {
      const auto& last = o.trace.losses.back();
      *csv << to_string(m) << ',' << to_string(o.trace.status) << ',' << o.trace.iterations() << ','
           << num(last.first) << ',' << num(last.second) << ',' << num(mean_step_ns(o.trace)) << ',';
      numerical = numerical || o.trace.status == RunStatus::numerical_error;
    };
    *csv << rep << ',' << seed + static_cast<std::uint64_t>(rep) << ',';
    side(row.a, ma);
    side(row.b, mb);
    const double ta = mean_step_ns(row.a.trace);
    const double tb = mean_step_ns(row.b.trace);
    sum_a += ta;
    sum_b += tb;
    *csv << num(tb > 0.0 ? ta / tb : 0.0) << '\n';
  }
  std::ostream& summary = csv == &out ? err : out;
  summary << "mean_step_ns_" << method_a << '=' << num(sum_a / repeats) << " mean_step_ns_" << method_b << '='
          << num(sum_b / repeats) << " speedup=" << num(sum_b > 0.0 ? sum_a / sum_b : 0.0) << '\n';
  return numerical ? kNumerical : kOk;
}

int cmd_fdcheck(const ProblemOptions& popt, std::uint64_t seed, int points, double h, double tol,
                std::ostream& out) {
  const Problem problem = build_problem(popt, seed);
  const Vector center = problem.game.quadratic() ? Vector::Zero(problem.game.dims().total()) : problem.default_w0;
  const double radius = problem.game.quadratic() ? 2.0 : 0.5;
  const FdCheckReport report = fd_check(problem.game, center, points, h, seed, radius);
  bool ok = true;
  out << "check,value,limit,pass\n";
  for (const auto& d : report.deviations) {
    const bool pass = d.max_abs_deviation <= tol;
    ok = ok && pass;
    out << "max_dev_" << d.derivative << ',' << num(d.max_abs_deviation) << ',' << num(tol) << ','
        << (pass ? "yes" : "no") << '\n';
  }
  if (report.richardson_applicable) {
    const bool pass = std::abs(report.richardson_ratio - 4.0) <= 0.5;
    ok = ok && pass;
    out << "richardson_ratio," << num(report.richardson_ratio) << ",4+-0.5," << (pass ? "yes" : "no") << '\n';
  }
  return ok ? kOk : kNumerical;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-player smooth game optimizers (GD, linearized CGD, SGA, LRSGA)", "nashopt"};
  app.require_subcommand(1);

  ProblemOptions popt;
  std::uint64_t seed = 0;
  bool fd_gradients = false;
  RunFlags rflags;
  std::string out_path;

  CLI::App* bounds = app.add_subcommand("bounds", "spectral quantities and admissible SGA parameters");
  add_problem_flags(bounds, popt, seed, fd_gradients);
  std::vector<double> at;
  bounds->add_option("--at", at, "evaluation point (default: w* or origin)")->delimiter(',');

  CLI::App* runc = app.add_subcommand("run", "run one optimizer and write its CSV trace");
  add_problem_flags(runc, popt, seed, fd_gradients);
  add_run_flags(runc, rflags);
  runc->add_option("--method", rflags.method, "gd | cgd_lin | sga | sga_frozen | lrsga");
  runc->add_option("--out", out_path, "CSV path (default stdout)");

  CLI::App* compare = app.add_subcommand("compare", "run two optimizers over seeded repeats");
  add_problem_flags(compare, popt, seed, fd_gradients);
  add_run_flags(compare, rflags);
  std::string method_a = "sga", method_b = "lrsga";
  int repeats = 5, jobs = 1;
  compare->add_option("--method-a", method_a, "first method");
  compare->add_option("--method-b", method_b, "second method");
  compare->add_option("--repeats", repeats, "number of seeds (seed, seed+1, ...)")->check(CLI::PositiveNumber);
  compare->add_option("--jobs", jobs, "parallel workers for repeats")->check(CLI::PositiveNumber);
  compare->add_option("--out", out_path, "CSV path (default stdout)");

  CLI::App* fdcheck = app.add_subcommand("fdcheck", "finite-difference agreement of analytic derivatives");
  add_problem_flags(fdcheck, popt, seed, fd_gradients);
  int points = 50;
  double h = 1e-5;
  double fd_tol = 1e-6;
  fdcheck->add_option("--points", points, "number of random points")->check(CLI::PositiveNumber);
  fdcheck->add_option("--step", h, "difference step h")->check(CLI::PositiveNumber);
  fdcheck->add_option("--max-dev", fd_tol, "allowed max absolute deviation");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  popt.contrastive.analytic_gradients = !fd_gradients;

  try {
    if (*bounds) return cmd_bounds(popt, seed, at, out, err);
    if (*runc) return cmd_run(popt, seed, rflags, out_path, out, err);
    if (*compare)
      return cmd_compare(popt, seed, rflags, method_a, method_b, repeats, jobs, out_path, out, err);
    if (*fdcheck) return cmd_fdcheck(popt, seed, points, h, fd_tol, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const AdmissibilityError& e) {
    err << "error: " << e.what() << '\n';
    return kAdmissibility;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace nashopt::harness
