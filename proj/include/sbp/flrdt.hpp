#pragma once

#include <optional>
#include <utility>

#include "sbp/lifting.hpp"
#include "sbp/optimize.hpp"
#include "sbp/quadrature.hpp"

namespace sbp {

/// Closed-form first-level capacity estimate. If gamma_sq_hat is non-null it
/// receives the optimal gamma_sq at the critical density.
double alpha_level1(double kappa, double* gamma_sq_hat = nullptr);

/// E[max(|Z| - kappa, 0)^2] in closed form (the level-1 building block).
double excess_square_moment(double kappa);

/// Closed-form second-level threshold log2 / (-log erf(kappa/sqrt(2))),
/// the value reached on the partial second level of lifting.
double alpha_level2(double kappa);

/// Per-side quadrature rules for the nested dual evaluations. The erfc-side
/// integrands develop interior edges of width ~sqrt(1-p2) that plain
/// Gauss-Hermite resolves poorly, so the sharpest (last active) erfc layer
/// uses a panel rule with uniform resolution; everything else is smooth and
/// keeps Gauss-Hermite.
struct EvalScheme {
  QuadratureRule cosh_inner;
  QuadratureRule cosh_outer;
  QuadratureRule erfc_inner;
  QuadratureRule erfc_sharp;
};

/// Accurate defaults used for reported values and residuals.
const EvalScheme& default_scheme();
/// Cheaper variant used inside iterative solves.
const EvalScheme& search_scheme();
/// Scales the default node counts by roughly factor/96 (CLI --order hook).
EvalScheme scaled_scheme(int order);

/// The c2-rescaled second-level functional
///   0.5(1-p2) q2s - E log 2cosh(sqrt(q2s) h) - alpha E log(erfc difference).
double psi_level2(double p2, double q2s, double alpha, double kappa,
                  const EvalScheme& s = default_scheme());
double psi_level2(double p2, double q2s, double alpha, double kappa,
                  const QuadratureRule& rule);

struct PsiParts {
  double value;
  double dvalue_dalpha;  // = -(erfc cascade term); positive at feasible points
};

/// Generic rescaled level-r functional psi^(r,s) for r >= 2. The nested
/// expectations run over h^(3)..h^(r+1) and u^(2,3)..u^(2,r+1); layers with a
/// zero Gaussian increment are inert and are skipped exactly.
PsiParts psi_level_r_parts(const LiftingPoint& pt, double alpha, double kappa,
                           const EvalScheme& s = default_scheme());
double psi_level_r(const LiftingPoint& pt, double alpha, double kappa,
                   const EvalScheme& s = default_scheme());
/// Same-rule-everywhere variant matching the plain operation signature.
double psi_level_r(const LiftingPoint& pt, double alpha, double kappa,
                   const QuadratureRule& rule);

struct StationaryOptions {
  int max_evals = 20000;       // objective evaluations per start
  double diameter_tol = 1e-10;
  double target_sq = 1e-26;    // early stop for the squared gradient norm
  double accept_sq = 1e-12;    // acceptance threshold on the residual
  int n_starts = 1;            // 1 = init only; more adds the +-5%/20% pattern
  bool use_search_scheme = true;  // search cheap, then polish on defaults
  bool polish = true;             // skip to stay on the search scheme only
  int polish_evals = 4000;
};

struct StationaryResult {
  LiftingPoint point;
  double grad_sq = 0.0;  // squared norm of the finite-difference gradient
                         // over the free (transformed) coordinates
  Eigen::VectorXd c_second_diff;  // diagnostic second differences along c_s
  int evaluations = 0;
  int start_index = 0;
};

/// Solves the stationarity system at level r (partial lifting: trailing
/// p_r = q_r^(s) = 0) by multistart Nelder-Mead on the squared gradient norm,
/// seeded at init. Throws solver_error with the best residual if no start
/// reaches accept_sq.
StationaryResult stationary_point(double alpha, double kappa, int r,
                                  const LiftingPoint& init,
                                  const StationaryOptions& opts = {});

/// The +-{5%, 20%} per-coordinate perturbation pattern around init (first
/// entry is init itself), capped at 64 starts.
std::vector<LiftingPoint> multistart_pattern(const LiftingPoint& init,
                                             int cap = 64);

struct CapacityEstimate {
  double kappa = 0.0;
  int level = 0;
  double alpha = 0.0;
  LiftingPoint point;
  double psi_residual = 0.0;
  double grad_residual = 0.0;  // norm (not squared) of the gradient
  int quadrature_order = 0;
};

struct AlphaCOptions {
  double alpha_tol = 1e-7;   // final alpha bracket width (relative if alpha>1)
  double psi_tol = 1e-8;
  double hop_rel = 0.05;     // max relative alpha step while tracking the branch
  int max_steps = 200;
  int init_starts = 13;      // multistart width for the first solve
  int order_override = 0;    // 0 = defaults
};

/// Capacity estimate at level r. Levels 1 and 2 are closed forms; levels
/// >= 3 track the stationary branch seeded from the kappa=1 table values
/// (continuing in kappa when needed) and bisect alpha on a tight bracket,
/// re-solving the stationary system warm-started at each trial alpha.
CapacityEstimate alpha_c(double kappa, int r,
                         std::optional<std::pair<double, double>> bracket = {},
                         const AlphaCOptions& opts = {});

/// Built-in stationary seeds at kappa = 1 (from the r <= 5 reference runs).
LiftingPoint table_seed(int r);
double table_alpha(int r);

}  // namespace sbp
