#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "sbp/errors.hpp"

namespace sbp {

/// Parameter state of the lifted dual functional at level r.
/// p holds (p_2 .. p_r); q_s holds the rescaled (q_2^(s) .. q_r^(s));
/// c_s holds the rescaled exponents (c_3^(s) .. c_r^(s)), with c_2^(s) = 1
/// implicit. gamma_sq is identically 0 in the rescaled forms for r >= 2.
struct LiftingPoint {
  int level = 1;
  Eigen::VectorXd p;
  Eigen::VectorXd q_s;
  Eigen::VectorXd c_s;
  double gamma_sq = 0.0;

  void validate() const;  // throws invariant_error

  static LiftingPoint make(int level, std::vector<double> p,
                           std::vector<double> q_s, std::vector<double> c_s,
                           double gamma_sq = 0.0);
};

/// Gaussian cascade coefficients b_k = sqrt(p_{k-1}-p_k), c_k = sqrt(q_{k-1}-q_k),
/// built from interior lists with implicit leading 1 and trailing 0.
struct CascadeCoefficients {
  Eigen::VectorXd b;  // (b_2 .. b_{r+1})
  Eigen::VectorXd c;
};

/// sqrt of consecutive differences of [xs..., 0]. Monotonicity violations
/// (negative differences beyond roundoff) throw invariant_error.
Eigen::VectorXd diff_sqrt_chain(const Eigen::VectorXd& xs);

/// Builds both coefficient lists from interior (p_2..p_r), (q_2..q_r).
CascadeCoefficients cascade(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Classification of the implied exponent sequence (c_2^(s)=1, c_3^(s), ...).
struct OrderingReport {
  bool decreasing = true;
  // adjacent index pairs (k, k+1), in c_k-subscript terms, where c_{k+1} > c_k
  std::vector<std::pair<int, int>> violations;
  std::string label() const { return decreasing ? "decreasing" : "non-monotone"; }
};

OrderingReport c_ordering_report(const LiftingPoint& point);

}  // namespace sbp
