#include "sbp/clup.hpp"

#include <cmath>

#include "sbp/errors.hpp"

namespace sbp {

void ClupConfig::validate() const {
  if (!(schedule_factor > 1.0))
    throw parameter_error("ClupConfig: schedule_factor must exceed 1");
  if (!(t0x_init > 0.0)) throw parameter_error("ClupConfig: t0x_init <= 0");
  if (max_restarts < 0 || max_restarts > 2000)
    throw parameter_error("ClupConfig: max_restarts outside [0, 2000]");
  if (stability_window < 1)
    throw parameter_error("ClupConfig: stability_window < 1");
}

namespace {

// smallest barrier argument: positive iff x is strictly interior
double interior_margin(const Eigen::VectorXd& x, const Eigen::VectorXd& Gx,
                       const SbpInstance& inst, double kappa0) {
  const double k2 = kappa0 * kappa0;
  double m = k2 - Gx.cwiseAbs2().maxCoeff();
  const double cube =
      1.0 - static_cast<double>(inst.n) * x.cwiseAbs2().maxCoeff();
  return std::min(m, cube);
}

double barrier_value(const Eigen::VectorXd& x, const Eigen::VectorXd& Gx,
                     const SbpInstance& inst, double kappa0, double t0x) {
  const double k2 = kappa0 * kappa0;
  const double n = static_cast<double>(inst.n);
  double v = -t0x * x.norm();
  v -= (k2 - Gx.array().square()).log().sum() / inst.m;
  v -= (1.0 - n * x.array().square()).log().sum() / n;
  return v;
}

}  // namespace

BarrierEval barrier_value_grad(const Eigen::VectorXd& x,
                               const SbpInstance& inst, double kappa0,
                               double t0x) {
  if (x.size() != inst.n)
    throw parameter_error("barrier_value_grad: dimension mismatch");
  const Eigen::VectorXd Gx = inst.G * x;
  if (interior_margin(x, Gx, inst, kappa0) <= 0.0)
    throw domain_error("barrier_value_grad: point touches a barrier");

  const double k2 = kappa0 * kappa0;
  const double n = static_cast<double>(inst.n);
  BarrierEval out;
  out.value = barrier_value(x, Gx, inst, kappa0, t0x);

  const Eigen::ArrayXd denom_rows = k2 - Gx.array().square();
  out.grad = (2.0 / inst.m) * (inst.G.transpose() * (Gx.array() / denom_rows).matrix());
  out.grad.array() += 2.0 * x.array() / (1.0 - n * x.array().square());
  const double nx = x.norm();
  if (nx > 0.0) out.grad -= (t0x / nx) * x;  // subgradient 0 at x = 0
  return out;
}

GradbarResult gradbar(const SbpInstance& inst, const Eigen::VectorXd& x0,
                      double kappa0, double t0x, const ClupConfig& cfg) {
  Eigen::VectorXd x = x0;
  Eigen::VectorXd Gx = inst.G * x;
  if (interior_margin(x, Gx, inst, kappa0) <= 0.0)
    throw domain_error("gradbar: start is not strictly interior");
  double fx = barrier_value(x, Gx, inst, kappa0, t0x);

  GradbarResult res;
  for (res.iters = 0; res.iters < cfg.max_inner_iters; ++res.iters) {
    const BarrierEval be = barrier_value_grad(x, inst, kappa0, t0x);
    const double gnorm2 = be.grad.squaredNorm();
    if (std::sqrt(gnorm2) < cfg.grad_tol) break;

    double step = cfg.initial_step;
    bool accepted = false;
    while (step > 1e-18) {
      const Eigen::VectorXd xt = x - step * be.grad;
      const Eigen::VectorXd Gxt = inst.G * xt;
      if (interior_margin(xt, Gxt, inst, kappa0) > 0.0) {
        const double ft = barrier_value(xt, Gxt, inst, kappa0, t0x);
        if (ft <= fx - cfg.armijo_c * step * gnorm2) {
          x = xt;
          Gx = Gxt;
          fx = ft;
          accepted = true;
          break;
        }
      }
      step *= cfg.backtrack_factor;
    }
    if (!accepted) {
      res.stalled = true;
      break;
    }
  }
  res.x = x;
  return res;
}

Eigen::VectorXd feasible_init(const SbpInstance& inst, double kappa0,
                              CounterRng& rng, int* halvings) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(inst.n));
  Eigen::VectorXd x(inst.n);
  for (int i = 0; i < inst.n; ++i) x[i] = rng.next_sign() ? scale : -scale;
  int k = 0;
  do {
    x *= 0.5;
    ++k;
  } while (interior_margin(x, inst.G * x, inst, kappa0) < 1e-9);
  if (halvings) *halvings = k;
  return x;
}

namespace {

Eigen::VectorXi round_sign(const Eigen::VectorXd& x) {
  Eigen::VectorXi s(x.size());
  for (int i = 0; i < x.size(); ++i) s[i] = x[i] >= 0.0 ? 1 : -1;
  return s;
}

}  // namespace

ClupResult clup_solve(const SbpInstance& inst, const ClupConfig& cfg,
                      CounterRng rng) {
  cfg.validate();
  const double kappa0 = cfg.effective_kappa0(inst.kappa);
  if (kappa0 < inst.kappa)
    throw parameter_error("clup_solve: kappa0 below the instance margin");

  ClupResult best;
  best.kappa_hat = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart <= cfg.max_restarts; ++restart) {
    Eigen::VectorXd x = feasible_init(inst, kappa0, rng);
    double t0x = cfg.t0x_init;
    Eigen::VectorXi stable_sign = round_sign(x);
    int stable_count = 0;
    int outer = 0;
    long inner_total = 0;
    std::vector<ClupTraceRow> trace;

    for (outer = 0; outer < cfg.max_outer_iters; ++outer) {
      const GradbarResult gb = gradbar(inst, x, kappa0, t0x, cfg);
      x = gb.x;
      inner_total += gb.iters;
      const Eigen::VectorXi s = round_sign(x);
      if (cfg.record_trace) {
        const double kh = is_feasible_sign(s, inst).kappa_hat;
        trace.push_back({outer, t0x,
                         barrier_value(x, inst.G * x, inst, kappa0, t0x), kh});
      }
      if (s == stable_sign) {
        if (++stable_count >= cfg.stability_window) break;
      } else {
        stable_sign = s;
        stable_count = 1;
      }
      t0x *= cfg.schedule_factor;
      if (t0x > cfg.t0x_cap) break;
    }

    const Eigen::VectorXi s = round_sign(x);
    const Feasibility fe = is_feasible_sign(s, inst);
    if (fe.kappa_hat < best.kappa_hat) {
      best.x_final = x;
      best.sign_out = s;
      best.kappa_hat = fe.kappa_hat;
      best.success = fe.feasible;
      best.outer_iters = outer;
      best.inner_iters_total = inner_total;
      best.restarts_used = restart;
      if (cfg.record_trace) best.trace = std::move(trace);
    }
    if (best.success) break;
  }
  return best;
}

std::vector<McRow> monte_carlo(int n, const std::vector<double>& alpha_grid,
                               double kappa, int trials, const ClupConfig& cfg,
                               std::uint64_t base_seed) {
  if (trials < 1) throw parameter_error("monte_carlo: trials must be >= 1");
  std::vector<McRow> rows;
  rows.reserve(alpha_grid.size());
  for (size_t cell = 0; cell < alpha_grid.size(); ++cell) {
    const double alpha = alpha_grid[cell];
    // Kahan-summed aggregates, independent of trial evaluation order
    double sum = 0.0, comp = 0.0, sum_sq = 0.0;
    double successes = 0.0, restarts = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t inst_seed = splitmix64_value(
          base_seed, static_cast<std::uint64_t>(cell) * 1000003ULL + t);
      const SbpInstance inst = gen_instance(n, alpha, kappa, inst_seed);
      const ClupResult r =
          clup_solve(inst, cfg, CounterRng(inst_seed, /*stream=*/1));
      const double y = r.kappa_hat - comp;
      const double s2 = sum + y;
      comp = (s2 - sum) - y;
      sum = s2;
      sum_sq += r.kappa_hat * r.kappa_hat;
      successes += r.success ? 1.0 : 0.0;
      restarts += r.restarts_used;
    }
    McRow row;
    row.alpha = alpha;
    row.trials = trials;
    row.mean_kappa_hat = sum / trials;
    const double var =
        trials > 1
            ? std::max(0.0, (sum_sq - trials * row.mean_kappa_hat *
                                          row.mean_kappa_hat) /
                                (trials - 1))
            : 0.0;
    row.stderr_kappa_hat = std::sqrt(var / trials);
    row.success_rate = successes / trials;
    row.mean_restarts = restarts / trials;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sbp
