// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "sbp/asymptotics.hpp"
#include "sbp/clup.hpp"
#include "sbp/flrdt.hpp"
#include "sbp/instance.hpp"
#include "sbp/optimize.hpp"
#include "sbp/quadrature.hpp"
#include "sbp/report.hpp"
#include "sbp/special.hpp"

using namespace sbp;

namespace {

int failures = 0;

double now_s() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

void report(int id, const std::string& name, bool pass,
            const std::string& detail, double elapsed) {
  std::printf("[%s] criterion %2d: %-34s %s (%.1fs)\n", pass ? "PASS" : "FAIL",
              id, name.c_str(), detail.c_str(), elapsed);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) { return format_sig6(v); }

}  // namespace

int main() {
  double t_start = 0.0;

  // 1. level-1 closed form
  t_start = now_s();
  const CapacityEstimate e1 = alpha_c(1.0, 1);
  {
    const double dt = now_s() - t_start;
    const bool pass = std::abs(e1.alpha - 4.2250) < 1e-4 && dt < 1.0;
    report(1, "level-1 capacity", pass, "alpha=" + fmt(e1.alpha), dt);
  }

  // 2. level-2 threshold and the r=2 stationary limit
  t_start = now_s();
  const CapacityEstimate e2 = alpha_c(1.0, 2);
  bool pass2 = std::abs(e2.alpha - 1.8159) < 1e-3;
  {
    const StationaryResult st = stationary_point(e2.alpha, 1.0, 2, table_seed(2));
    pass2 = pass2 && st.point.p[0] < 1e-4 && st.point.q_s[0] < 1e-4;
    const double dt = now_s() - t_start;
    pass2 = pass2 && dt < 10.0;
    report(2, "level-2 threshold", pass2,
           "alpha=" + fmt(e2.alpha) + " p2=" + fmt(st.point.p[0]) +
               " q2s=" + fmt(st.point.q_s[0]),
           dt);
  }

  // 3. level-3 capacity with the stationary point near the reference values
  t_start = now_s();
  const CapacityEstimate e3 = alpha_c(1.0, 3);
  {
    const bool near = std::abs(e3.point.p[0] / 0.9852 - 1.0) < 0.02 &&
                      std::abs(e3.point.q_s[0] / 0.8794 - 1.0) < 0.02 &&
                      std::abs(e3.point.c_s[0] / 4.2629 - 1.0) < 0.02;
    const bool ordering = !c_ordering_report(e3.point).decreasing;
    const double dt = now_s() - t_start;
    const bool pass =
        std::abs(e3.alpha - 1.6576) < 5e-3 && near && ordering && dt < 120.0;
    report(3, "level-3 capacity", pass,
           "alpha=" + fmt(e3.alpha) + " p2=" + fmt(e3.point.p[0]) +
               " q2s=" + fmt(e3.point.q_s[0]) + " c3s=" + fmt(e3.point.c_s[0]),
           dt);
  }

  // 4. level-4 capacity seeded from the reference table
  t_start = now_s();
  const CapacityEstimate e4 = alpha_c(1.0, 4);
  {
    const double dt = now_s() - t_start;
    const bool pass = std::abs(e4.alpha - 1.6218) < 1e-2 && dt < 1800.0;
    report(4, "level-4 capacity", pass, "alpha=" + fmt(e4.alpha), dt);
  }

  // 5. strictly decreasing level sequence
  t_start = now_s();
  {
    const bool pass = e1.alpha > e2.alpha && e2.alpha > e3.alpha &&
                      e3.alpha > e4.alpha;
    report(5, "monotone level sequence", pass,
           fmt(e1.alpha) + " > " + fmt(e2.alpha) + " > " + fmt(e3.alpha) +
               " > " + fmt(e4.alpha),
           now_s() - t_start);
  }

  // 6. asymptotic constants
  t_start = now_s();
  {
    const double kx = solve_kappa_x();
    const double c = small_alpha_constant();
    const double dt = now_s() - t_start;
    const bool pass =
        std::abs(kx - 0.7534) < 1e-4 && std::abs(c - 1.2385) < 1e-3 && dt < 1.0;
    report(6, "asymptotic constants", pass,
           "kappa_x=" + fmt(kx) + " constant=" + fmt(c), dt);
  }

  // 7. full evaluators and small-kappa approximations join at kappa = 0.3
  t_start = now_s();
  {
    const double a3_sk = level3_small_kappa_alpha(0.3);
    const CapacityEstimate f3 = alpha_c(0.3, 3);
    const double gap3 = std::abs(a3_sk / f3.alpha - 1.0);
    const double a4_sk = level4_small_kappa_alpha(0.3);
    const CapacityEstimate f4 = alpha_c(0.3, 4);
    const double gap4 = std::abs(a4_sk / f4.alpha - 1.0);
    const bool pass = gap3 < 0.02 && gap4 < 0.03;
    report(7, "branch consistency at 0.3", pass,
           "l3 full=" + fmt(f3.alpha) + " approx=" + fmt(a3_sk) +
               " gap=" + fmt(gap3) + "; l4 full=" + fmt(f4.alpha) +
               " approx=" + fmt(a4_sk) + " gap=" + fmt(gap4),
           now_s() - t_start);
  }

  // 8. quadrature exactness and order-doubling stability
  t_start = now_s();
  {
    bool pass = true;
    for (int order : {2, 8, 40}) {
      const QuadratureRule r = gauss_hermite_rule(order);
      double moment = 1.0;  // E[Z^0]
      for (int k = 0; k <= std::min(2 * order - 1, 20); ++k) {
        const double got =
            expect_gauss([k](double z) { return std::pow(z, k); }, r);
        pass = pass && std::abs(got - moment * (k % 2 == 0 ? 1.0 : 0.0)) <
                           1e-10 * std::max(1.0, moment);
        if (k % 2 == 1) moment *= (k + 2) - 1;  // next even double factorial
      }
    }
    // order-doubling stability of every functional used at accepted points
    const EvalScheme dbl{gauss_hermite_rule(160), gauss_hermite_rule(240),
                         gauss_hermite_rule(192), normal_panel_rule(128, 16)};
    const LiftingPoint t2 =
        LiftingPoint::make(3, {0.9852, 0.0}, {0.8794, 0.0}, {4.2629});
    const LiftingPoint t3 =
        LiftingPoint::make(4, {0.9988, 0.9729, 0.0}, {1.1211, 0.0760, 0.0},
                           {4.1522, 12.0687});
    const double d3 =
        std::abs(psi_level_r(t2, 1.6576, 1.0) - psi_level_r(t2, 1.6576, 1.0, dbl));
    const double d4 =
        std::abs(psi_level_r(t3, 1.6218, 1.0) - psi_level_r(t3, 1.6218, 1.0, dbl));
    const double dm = std::abs(
        expect_gauss([](double z) { return log2cosh(0.9378 * z); },
                     gauss_hermite_rule(80)) -
        expect_gauss([](double z) { return log2cosh(0.9378 * z); },
                     gauss_hermite_rule(160)));
    pass = pass && d3 < 1e-7 && d4 < 1e-7 && dm < 1e-7;
    report(8, "quadrature properties", pass,
           "dpsi3=" + fmt(d3) + " dpsi4=" + fmt(d4) + " dmoment=" + fmt(dm),
           now_s() - t_start);
  }

  // 9. nesting identities
  t_start = now_s();
  {
    // equal consecutive exponents merge layers: at c3s = 1 the level-3
    // functional collapses to psi_level2 at the deeper slot; with the
    // acceptance point p3 = q3s = 0 that is psi_level2(0, 0)
    const double a = 1.8, k = 1.0;
    const double c1 = std::abs(
        psi_level_r(LiftingPoint::make(3, {0.5, 0.0}, {1.0, 0.0}, {1.0}), a, k) -
        psi_level2(0.0, 0.0, a, k));
    const double c2 = std::abs(
        psi_level_r(LiftingPoint::make(3, {0.7, 0.5}, {1.5, 1.0}, {1.0}), a, k) -
        psi_level2(0.5, 1.0, a, k));
    // level-insertion invariance at r = 4
    const LiftingPoint base =
        LiftingPoint::make(3, {0.9852, 0.0}, {0.8794, 0.0}, {4.2629});
    const LiftingPoint ins = LiftingPoint::make(
        4, {0.9852, 0.9852, 0.0}, {0.8794, 0.8794, 0.0}, {2.5, 4.2629});
    const double c3 =
        std::abs(psi_level_r(ins, 1.6576, k) - psi_level_r(base, 1.6576, k));
    const bool pass = c1 < 1e-9 && c2 < 1e-9 && c3 < 1e-9;
    report(9, "nesting identities", pass,
           "collapse=" + fmt(c1) + "," + fmt(c2) + " insertion=" + fmt(c3),
           now_s() - t_start);
  }

  // 10. CLuP soundness, oracle dominance, gradient correctness
  t_start = now_s();
  {
    bool pass = true;
    int successes = 0;
    ClupConfig cfg;
    cfg.max_restarts = 30;
    for (int i = 0; i < 50; ++i) {
      const int n = 12 + (i % 11);  // cycles 12..22
      const std::uint64_t seed = 90000 + 17 * i;
      const SbpInstance inst = gen_instance(n, 1.2, 1.0, seed);
      const OracleResult oracle = brute_force(inst);
      const ClupResult r = clup_solve(inst, cfg, CounterRng(seed, 1));
      if (r.kappa_hat < oracle.xi_star - 1e-12) pass = false;
      if (r.success) {
        ++successes;
        if (!is_feasible_sign(r.sign_out, inst).feasible) pass = false;
      }
      if (r.kappa_hat != is_feasible_sign(r.sign_out, inst).kappa_hat)
        pass = false;
    }
    // analytic gradient vs central differences at 100 interior points
    int grad_ok = 0;
    for (int n : {10, 50, 200}) {
      const SbpInstance inst = gen_instance(n, 1.2, 1.0, 5000 + n);
      CounterRng rng(42 + n, 0);
      const int reps = (n == 200) ? 20 : 40;
      for (int t = 0; t < reps; ++t) {
        Eigen::VectorXd x = feasible_init(inst, 1.5, rng);
        for (int j = 0; j < x.size(); ++j) x[j] *= 0.5 + rng.next_unit();
        const BarrierEval be = barrier_value_grad(x, inst, 1.5, 1.3);
        const Objective f = [&](const Eigen::VectorXd& y) {
          return barrier_value_grad(y, inst, 1.5, 1.3).value;
        };
        const Eigen::VectorXd fd = finite_diff_grad(f, x, 1e-6);
        if ((fd - be.grad).norm() / be.grad.norm() < 1e-5) ++grad_ok;
      }
    }
    pass = pass && grad_ok == 100;
    const double dt = now_s() - t_start;
    pass = pass && dt < 300.0;
    report(10, "CLuP soundness + oracle", pass,
           "successes=" + std::to_string(successes) + "/50 grad_ok=" +
               std::to_string(grad_ok) + "/100",
           dt);
  }

  // 11. Monte Carlo sweep against the theory thresholds (figure substitute)
  t_start = now_s();
  {
    ClupConfig cfg;
    cfg.max_restarts = 10;
    cfg.max_outer_iters = 120;
    cfg.max_inner_iters = 2000;
    std::vector<double> grid;
    for (double a = 0.6; a <= 1.6 + 1e-9; a += 0.1) grid.push_back(a);
    const auto rows = monte_carlo(100, grid, 1.0, 50, cfg, 424242);

    bool monotone = true;
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
      const double slack = std::sqrt(rows[i].stderr_kappa_hat *
                                         rows[i].stderr_kappa_hat +
                                     rows[i + 1].stderr_kappa_hat *
                                         rows[i + 1].stderr_kappa_hat);
      if (rows[i + 1].mean_kappa_hat < rows[i].mean_kappa_hat - slack)
        monotone = false;
    }

    // empirical crossing of mean kappa_hat with the kappa = 1 margin
    double crossing = std::numeric_limits<double>::quiet_NaN();
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
      const double y0 = rows[i].mean_kappa_hat - 1.0;
      const double y1 = rows[i + 1].mean_kappa_hat - 1.0;
      if (y0 <= 0.0 && y1 > 0.0) {
        crossing = rows[i].alpha + 0.1 * (-y0) / (y1 - y0);
        break;
      }
    }

    // overlay file: MC curve plus the level-2..4 theory thresholds
    Provenance prov;
    prov.command = "acceptance-figure-sweep";
    prov.add("n", 100LL);
    prov.add("kappa", 1.0);
    prov.add("trials", 50LL);
    prov.add("restarts", static_cast<long long>(cfg.max_restarts));
    prov.add("alpha_c_level2", e2.alpha);
    prov.add("alpha_c_level3", e3.alpha);
    prov.add("alpha_c_level4", e4.alpha);
    prov.add("empirical_crossing", crossing);
    Table t("sbp.acceptance_overlay.v1",
            {"alpha", "mean_kappa_hat", "stderr_kappa_hat", "success_rate",
             "mean_restarts"});
    for (const auto& r : rows)
      t.add_row({format_full(r.alpha), format_full(r.mean_kappa_hat),
                 format_full(r.stderr_kappa_hat), format_full(r.success_rate),
                 format_full(r.mean_restarts)});
    write_table("acceptance_figure_sweep.csv", "csv", t, prov);

    const bool pass = monotone && t.rows() == grid.size();
    report(11, "MC sweep vs theory", pass,
           "monotone=" + std::string(monotone ? "yes" : "no") +
               " crossing=" + fmt(crossing) + " (alpha_c2=" + fmt(e2.alpha) +
               ", alpha_c4=" + fmt(e4.alpha) + "), qualitative agreement reported",
           now_s() - t_start);
  }

  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures;
}
