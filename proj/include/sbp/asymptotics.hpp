#pragma once

namespace sbp {

/// Root of  -log erf(k) - k e^{-k^2} / (sqrt(pi) erf(k)) = 0  in (0.5, 1).
double solve_kappa_x();

/// kappa_x * sqrt(-8 log erf(kappa_x)); the prefactor of the
/// kappa ~ C sqrt(alpha / -log alpha) small-density law.
double small_alpha_constant();

/// Third-level small-kappa solution at a given margin.
struct SmallKappaLevel3 {
  double alpha = 0.0;
  double p2_hat = 0.0;       // solved p2 at the critical density
  double inner_residual = 0.0;
  double psi_residual = 0.0;
  // scaled variables of the alpha -> 0 parameterization
  double p_x = 0.0;    // (1-p2) (-log alpha) / alpha
  double c_x = 0.0;    // -0.5 log((1-p2)/4)
  double q2_bar = 0.0; // c_x / (-log alpha)
};

/// Solves the level-3 small-kappa system: an inner 1-D solve for p2 at each
/// trial alpha, bisected over alpha until the reduced functional vanishes.
/// Valid for 0 < kappa <= cutoff (default 0.35).
SmallKappaLevel3 level3_small_kappa(double kappa, double cutoff = 0.35);
double level3_small_kappa_alpha(double kappa, double cutoff = 0.35);

struct SmallKappaLevel4 {
  double alpha = 0.0;
  double p2 = 0.0, p3 = 0.0, q2s = 0.0, c3s = 0.0, c_x = 0.0;
  double h_star = 0.0;          // outer saddle location
  double saddle_residual = 0.0; // residual of the h-saddle equation
  double grad_sq = 0.0;
  double psi_residual = 0.0;
};

/// Solves the reduced fourth-level small-kappa functional (free parameters
/// p2, p3, q2s, c3s, c_x = q3s c4s; inner h-saddle solved per evaluation)
/// to joint stationarity and bisects alpha for the zero crossing.
SmallKappaLevel4 level4_small_kappa(double kappa, double cutoff = 0.35);
double level4_small_kappa_alpha(double kappa, double cutoff = 0.35);

/// Bundled constants-and-solution record for reporting.
struct AsymptoticSolution {
  double kappa_x = 0.0;
  double constant = 0.0;
  double p2_hat = 0.0;
  double p_x = 0.0, c_x = 0.0, q2_bar = 0.0;
};

AsymptoticSolution asymptotic_solution(double kappa);

}  // namespace sbp
