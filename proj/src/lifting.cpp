#include "sbp/lifting.hpp"

#include <cmath>

namespace sbp {

void LiftingPoint::validate() const {
  if (level < 1) throw invariant_error("LiftingPoint: level must be >= 1");
  const int np = level - 1;
  if (p.size() != np || q_s.size() != np)
    throw invariant_error("LiftingPoint: p and q_s must have level-1 entries");
  if (c_s.size() != std::max(0, level - 2))
    throw invariant_error("LiftingPoint: c_s must have level-2 entries");
  double prev = 1.0;
  for (int i = 0; i < np; ++i) {
    if (!(p[i] >= 0.0) || p[i] > prev + 1e-15)
      throw invariant_error("LiftingPoint: p must satisfy 1 >= p2 >= ... >= 0");
    prev = p[i];
  }
  for (int i = 0; i < np; ++i) {
    if (!(q_s[i] >= 0.0) || (i > 0 && q_s[i] > q_s[i - 1] + 1e-15))
      throw invariant_error("LiftingPoint: q_s must be non-negative decreasing");
  }
  for (int i = 0; i < c_s.size(); ++i)
    if (!(c_s[i] > 0.0))
      throw invariant_error("LiftingPoint: c_s entries must be positive");
  if (!(gamma_sq >= 0.0))
    throw invariant_error("LiftingPoint: gamma_sq must be non-negative");
}

LiftingPoint LiftingPoint::make(int level, std::vector<double> p,
                                std::vector<double> q_s,
                                std::vector<double> c_s, double gamma_sq) {
  LiftingPoint pt;
  pt.level = level;
  pt.p = Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<int>(p.size()));
  pt.q_s =
      Eigen::Map<Eigen::VectorXd>(q_s.data(), static_cast<int>(q_s.size()));
  pt.c_s =
      Eigen::Map<Eigen::VectorXd>(c_s.data(), static_cast<int>(c_s.size()));
  pt.gamma_sq = gamma_sq;
  pt.validate();
  return pt;
}

Eigen::VectorXd diff_sqrt_chain(const Eigen::VectorXd& xs) {
  const int n = static_cast<int>(xs.size());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const double next = (i + 1 < n) ? xs[i + 1] : 0.0;
    double d = xs[i] - next;
    if (d < 0.0) {
      if (d < -1e-14)
        throw invariant_error("diff_sqrt_chain: list is not non-increasing");
      d = 0.0;
    }
    out[i] = std::sqrt(d);
  }
  return out;
}

CascadeCoefficients cascade(const Eigen::VectorXd& p,
                            const Eigen::VectorXd& q) {
  auto with_head = [](const Eigen::VectorXd& xs) {
    Eigen::VectorXd full(xs.size() + 1);
    full[0] = 1.0;
    full.tail(xs.size()) = xs;
    return full;
  };
  CascadeCoefficients cc;
  cc.b = diff_sqrt_chain(with_head(p));
  cc.c = diff_sqrt_chain(with_head(q));
  return cc;
}

OrderingReport c_ordering_report(const LiftingPoint& point) {
  OrderingReport rep;
  // implied sequence starts at c_2^(s) = 1, subscripts 2,3,...,r
  double prev = 1.0;
  for (int i = 0; i < point.c_s.size(); ++i) {
    if (point.c_s[i] > prev) {
      rep.decreasing = false;
      rep.violations.emplace_back(i + 2, i + 3);
    }
    prev = point.c_s[i];
  }
  return rep;
}

}  // namespace sbp
