#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <vector>

namespace sbp {

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Axis-aligned box; entries may be +-inf for unbounded coordinates.
struct Box {
  Eigen::VectorXd lo, hi;
  static Box unbounded(int dim);
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
};

struct NmOptions {
  int max_evals = 20000;
  double diameter_tol = 1e-10;
  // Stop early once the best value drops to this level (useful for residual
  // objectives whose true minimum is 0).
  double target_value = -std::numeric_limits<double>::infinity();
  double initial_step = 0.05;  // relative simplex edge, scaled by 1+|x_i|
};

struct MinimizeResult {
  Eigen::VectorXd point;
  double value = std::numeric_limits<double>::quiet_NaN();
  int evaluations = 0;
  int start_index = -1;  // which start won (multistart only)
};

/// Nelder-Mead simplex search with adaptive shrink, clamped to the box.
MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                           const Box& bounds, const NmOptions& opts = {});

/// Derivative-free multistart: runs nelder_mead from every start and keeps
/// the lowest value; exact ties go to the lowest start index, so parallel
/// and serial execution agree. Throws optimization errors only if every
/// start yields a non-finite objective.
MinimizeResult minimize_multistart(const Objective& f,
                                   const std::vector<Eigen::VectorXd>& starts,
                                   const Box& bounds,
                                   const NmOptions& opts = {});

/// Central finite differences, step h*(1+|x_i|) per coordinate.
Eigen::VectorXd finite_diff_grad(const Objective& f, const Eigen::VectorXd& x,
                                 double h = 1e-6);

}  // namespace sbp
