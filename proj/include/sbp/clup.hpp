#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "sbp/instance.hpp"
#include "sbp/rng.hpp"

namespace sbp {

/// Schedule and solver knobs for the controlled-loosening barrier solver.
struct ClupConfig {
  double kappa0 = 0.0;          // barrier margin; 0 = auto max(1.5k, k+0.5)
  double t0x_init = 1.3;
  double schedule_factor = 1.1; // constant c^(t) > 1
  double t0x_cap = 1e6;
  int max_outer_iters = 200;
  int max_restarts = 300;       // hard cap 2000
  int stability_window = 5;     // unchanged sign patterns to declare done

  // inner descent (gradbar)
  int max_inner_iters = 5000;
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  double grad_tol = 1e-8;

  bool record_trace = false;

  double effective_kappa0(double kappa) const {
    return kappa0 > 0.0 ? kappa0 : std::max(1.5 * kappa, kappa + 0.5);
  }
  void validate() const;
};

struct ClupTraceRow {
  int outer = 0;
  double t0x = 0.0;
  double objective = 0.0;
  double kappa_hat = 0.0;
};

struct ClupResult {
  Eigen::VectorXd x_final;
  Eigen::VectorXi sign_out;
  double kappa_hat = 0.0;
  bool success = false;
  int outer_iters = 0;
  long inner_iters_total = 0;
  int restarts_used = 0;
  std::vector<ClupTraceRow> trace;
};

/// Barrier objective and analytic gradient
///   f = -t0x ||x|| - (1/m) sum_j log(k0^2 - (Gx)_j^2) - (1/n) sum_i log(1 - n x_i^2)
/// x must be strictly interior. At x = 0 the norm term's gradient is taken
/// as 0 (documented subgradient choice).
struct BarrierEval {
  double value = 0.0;
  Eigen::VectorXd grad;
};
BarrierEval barrier_value_grad(const Eigen::VectorXd& x,
                               const SbpInstance& inst, double kappa0,
                               double t0x);

struct GradbarResult {
  Eigen::VectorXd x;
  int iters = 0;
  bool stalled = false;
};

/// Backtracking gradient descent on the barrier objective: the step first
/// shrinks until the trial point is strictly interior, then until the Armijo
/// decrease condition holds. Output objective never exceeds the input's.
GradbarResult gradbar(const SbpInstance& inst, const Eigen::VectorXd& x0,
                      double kappa0, double t0x, const ClupConfig& cfg);

/// Random +-1/sqrt(n) corner halved k >= 1 times until every barrier
/// argument clears a 1e-9 margin.
Eigen::VectorXd feasible_init(const SbpInstance& inst, double kappa0,
                              CounterRng& rng, int* halvings = nullptr);

/// Full solver: outer loosening schedule plus restarts; returns the best
/// rounded sign pattern found across restarts.
ClupResult clup_solve(const SbpInstance& inst, const ClupConfig& cfg,
                      CounterRng rng);

struct McRow {
  double alpha = 0.0;
  double mean_kappa_hat = 0.0;
  double stderr_kappa_hat = 0.0;
  double success_rate = 0.0;
  double mean_restarts = 0.0;
  int trials = 0;
};

/// Monte Carlo sweep: independent seeded instances per (alpha, trial) cell,
/// deterministic given base_seed regardless of evaluation order.
std::vector<McRow> monte_carlo(int n, const std::vector<double>& alpha_grid,
                               double kappa, int trials,
                               const ClupConfig& cfg, std::uint64_t base_seed);

}  // namespace sbp
