#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "sbp/errors.hpp"

namespace sbp {

/// Nodes and weights for expectations E[f(Z)] of a standard normal Z.
/// Weights are positive and sum to 1; nodes are strictly increasing and
/// symmetric about 0.
struct QuadratureRule {
  int order = 0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Hermite rule of the given order, mapped to the N(0,1) weight.
/// Exact for polynomial integrands of degree <= 2*order-1.
/// Computed by Golub-Welsch on the Hermite Jacobi matrix. Order in [2, 512].
QuadratureRule gauss_hermite_rule(int order);

/// Composite Gauss-Legendre rule on [-halfwidth, halfwidth] with the N(0,1)
/// density folded into the weights. Same contract as gauss_hermite_rule but
/// with uniformly spaced resolution, which handles integrands with sharp
/// interior edges that defeat plain Gauss-Hermite. Mass outside +-12 is below
/// 1e-31, so the rule invariants still hold to machine precision.
QuadratureRule normal_panel_rule(int panels, int points_per_panel = 16,
                                 double halfwidth = 12.0);

/// E[f(Z)] = sum_i w_i f(x_i). Throws evaluation_error at the first
/// non-finite f(node).
template <class F>
double expect_gauss(F&& f, const QuadratureRule& rule) {
  double acc = 0.0;
  for (int i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v))
      throw evaluation_error("expect_gauss: non-finite integrand value at node",
                             rule.nodes[i]);
    acc += rule.weights[i] * v;
  }
  return acc;
}

/// log E[exp(g(Z))] evaluated stably as a log-sum-exp over the rule.
/// g may return -inf (zero contribution); a NaN throws evaluation_error.
template <class G>
double log_expect_exp(G&& g, const QuadratureRule& rule) {
  const int n = static_cast<int>(rule.nodes.size());
  Eigen::VectorXd v(n);
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    v[i] = g(rule.nodes[i]);
    if (std::isnan(v[i]))
      throw evaluation_error("log_expect_exp: NaN integrand value at node",
                             rule.nodes[i]);
    m = std::max(m, v[i]);
  }
  if (!std::isfinite(m)) return m;  // all -inf
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += rule.weights[i] * std::exp(v[i] - m);
  return m + std::log(acc);
}

}  // namespace sbp
