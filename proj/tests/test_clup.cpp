#include <doctest.h>

#include <cmath>

#include "sbp/clup.hpp"
#include "sbp/errors.hpp"
#include "sbp/instance.hpp"
#include "sbp/optimize.hpp"

using namespace sbp;

namespace {

Eigen::VectorXd random_interior(const SbpInstance& inst, double kappa0,
                                CounterRng& rng) {
  return feasible_init(inst, kappa0, rng);
}

}  // namespace

TEST_CASE("barrier value and gradient basics") {
  const SbpInstance inst = gen_instance(30, 1.2, 1.0, 11);
  const double kappa0 = 1.5;

  // x = 0: value -2 log kappa0, gradient zero
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(inst.n);
  const BarrierEval at0 = barrier_value_grad(zero, inst, kappa0, 1.3);
  CHECK(at0.value == doctest::Approx(-2.0 * std::log(kappa0)).epsilon(1e-12));
  CHECK(at0.grad.norm() == 0.0);

  // linearity in t0x
  CounterRng rng(5, 0);
  const Eigen::VectorXd x = random_interior(inst, kappa0, rng);
  const double v1 = barrier_value_grad(x, inst, kappa0, 1.3).value;
  const double v2 = barrier_value_grad(x, inst, kappa0, 2.6).value;
  CHECK(v2 - v1 == doctest::Approx(-1.3 * x.norm()).epsilon(1e-12));

  // boundary -> domain error
  Eigen::VectorXd edge = Eigen::VectorXd::Zero(inst.n);
  edge[0] = 1.0 / std::sqrt(static_cast<double>(inst.n));
  CHECK_THROWS_AS(barrier_value_grad(edge, inst, kappa0, 1.0), domain_error);
}

TEST_CASE("analytic gradient matches central differences") {
  // relative error < 1e-5 at random interior points across sizes
  int checked = 0;
  for (int n : {10, 50, 200}) {
    const SbpInstance inst = gen_instance(n, 1.2, 1.0, 1000 + n);
    const double kappa0 = 1.5;
    CounterRng rng(77 + n, 0);
    for (int t = 0; t < (n == 200 ? 20 : 40); ++t) {
      Eigen::VectorXd x = random_interior(inst, kappa0, rng);
      // move off the feasible_init shell a little
      for (int i = 0; i < x.size(); ++i)
        x[i] *= 0.5 + rng.next_unit();
      const BarrierEval be = barrier_value_grad(x, inst, kappa0, 1.3);
      const Objective f = [&](const Eigen::VectorXd& y) {
        return barrier_value_grad(y, inst, kappa0, 1.3).value;
      };
      const Eigen::VectorXd fd = finite_diff_grad(f, x, 1e-6);
      CHECK((fd - be.grad).norm() / be.grad.norm() < 1e-5);
      ++checked;
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("gradbar contracts") {
  const SbpInstance inst = gen_instance(20, 1.0, 1.0, 21);
  const ClupConfig cfg;
  const double kappa0 = cfg.effective_kappa0(inst.kappa);
  CounterRng rng(3, 0);
  const Eigen::VectorXd x0 = random_interior(inst, kappa0, rng);

  const double f0 = barrier_value_grad(x0, inst, kappa0, 1.3).value;
  const GradbarResult gb = gradbar(inst, x0, kappa0, 1.3, cfg);
  const double f1 = barrier_value_grad(gb.x, inst, kappa0, 1.3).value;
  CHECK(f1 <= f0);  // objective never increases
  // the norm-reward term pushes outward from a small start
  CHECK(gb.x.norm() > x0.norm());

  // immediate convergence when the gradient is already tiny
  const GradbarResult gb2 = gradbar(inst, gb.x, kappa0, 1.3, cfg);
  const double f2 = barrier_value_grad(gb2.x, inst, kappa0, 1.3).value;
  CHECK(f2 <= f1);
}

TEST_CASE("feasible_init is strictly interior with margin") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const SbpInstance inst = gen_instance(50, 1.5, 1.0, seed);
    const double kappa0 = 1.5;
    CounterRng rng(seed, 1);
    int k = 0;
    const Eigen::VectorXd x = feasible_init(inst, kappa0, rng, &k);
    CHECK(k >= 1);
    CHECK(k <= 4);
    const double n = static_cast<double>(inst.n);
    CHECK((kappa0 * kappa0 -
           (inst.G * x).array().square()).minCoeff() >= 1e-9);
    CHECK((1.0 - n * x.array().square()).minCoeff() >= 1e-9);
  }
  // huge kappa0: only the cube constraint binds, one halving suffices
  const SbpInstance inst = gen_instance(20, 1.0, 1.0, 5);
  CounterRng rng(5, 1);
  int k = 0;
  feasible_init(inst, 100.0, rng, &k);
  CHECK(k == 1);
}

TEST_CASE("clup_solve determinism and self-certification") {
  const SbpInstance inst = gen_instance(16, 1.0, 1.0, 1234);
  ClupConfig cfg;
  cfg.max_restarts = 50;
  const ClupResult a = clup_solve(inst, cfg, CounterRng(7, 1));
  const ClupResult b = clup_solve(inst, cfg, CounterRng(7, 1));
  CHECK(a.kappa_hat == b.kappa_hat);
  CHECK(a.sign_out == b.sign_out);
  CHECK(a.restarts_used == b.restarts_used);
  CHECK(a.x_final == b.x_final);

  // kappa_hat always equals the feasibility check of the returned sign
  CHECK(a.kappa_hat == is_feasible_sign(a.sign_out, inst).kappa_hat);
  if (a.success) CHECK(is_feasible_sign(a.sign_out, inst).feasible);
}

TEST_CASE("clup_solve finds a feasible point on an oracle-verified instance") {
  const SbpInstance inst = gen_instance(16, 1.0, 1.0, 77);
  const OracleResult oracle = brute_force(inst);
  REQUIRE(oracle.feasible);  // instance is solvable at kappa = 1
  ClupConfig cfg;
  cfg.max_restarts = 100;
  const ClupResult r = clup_solve(inst, cfg, CounterRng(77, 1));
  CHECK(r.success);
  CHECK(is_feasible_sign(r.sign_out, inst).feasible);
  CHECK(r.kappa_hat >= oracle.xi_star);  // oracle dominance
}

TEST_CASE("monte_carlo trials=1 equals the single run") {
  ClupConfig cfg;
  cfg.max_restarts = 5;
  const std::vector<double> grid{0.8};
  const auto rows = monte_carlo(24, grid, 1.0, 1, cfg, 555);
  REQUIRE(rows.size() == 1);
  const std::uint64_t inst_seed = splitmix64_value(555, 0);
  const SbpInstance inst = gen_instance(24, 0.8, 1.0, inst_seed);
  const ClupResult r = clup_solve(inst, cfg, CounterRng(inst_seed, 1));
  CHECK(rows[0].mean_kappa_hat == r.kappa_hat);
  CHECK(rows[0].stderr_kappa_hat == 0.0);
  CHECK(rows[0].success_rate == (r.success ? 1.0 : 0.0));
}

TEST_CASE("config validation") {
  ClupConfig cfg;
  cfg.schedule_factor = 1.0;
  CHECK_THROWS_AS(cfg.validate(), parameter_error);
  cfg = ClupConfig{};
  cfg.max_restarts = 5000;
  CHECK_THROWS_AS(cfg.validate(), parameter_error);
  cfg = ClupConfig{};
  const SbpInstance inst = gen_instance(8, 1.0, 2.0, 3);
  cfg.kappa0 = 1.0;  // below the instance margin
  CHECK_THROWS_AS(clup_solve(inst, cfg, CounterRng(1, 1)), parameter_error);
}
