#include "sbp/quadrature.hpp"

#include <Eigen/Eigenvalues>

namespace sbp {

namespace {

// Restore the exact symmetry the eigensolver loses at the last ulp.
void symmetrize(QuadratureRule& r) {
  const int n = static_cast<int>(r.nodes.size());
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    const double x = 0.5 * (r.nodes[j] - r.nodes[i]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    const double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.weights[i] = w;
    r.weights[j] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  r.weights /= r.weights.sum();
}

}  // namespace

namespace {

// Christoffel weight 1 / sum_{k<n} p_k(x)^2 for the orthonormal probabilists'
// Hermite polynomials, evaluated with running rescaling. The eigenvector
// route loses the far-tail weights (absolute eigenvector error ~1e-16 swamps
// true components ~e^{-x^2/4}), which silently corrupts integrands with
// exponential growth; the recurrence keeps full relative accuracy.
double hermite_weight(double x, int n) {
  double p_prev = 1.0, p_cur = x;
  double sum = 1.0 + x * x;
  double log_scale = 0.0;
  for (int k = 1; k + 1 < n; ++k) {
    const double p_next =
        (x * p_cur - std::sqrt(static_cast<double>(k)) * p_prev) /
        std::sqrt(static_cast<double>(k + 1));
    p_prev = p_cur;
    p_cur = p_next;
    sum += p_cur * p_cur;
    if (std::abs(p_cur) > 1e150) {
      const double r = 1e-150;
      p_prev *= r;
      p_cur *= r;
      sum *= r * r;
      log_scale += std::log(1e150);
    }
  }
  const double log_w = -(std::log(sum) + 2.0 * log_scale);
  // true weights below the double range are clamped to the smallest normal
  if (log_w < -707.0) return std::numeric_limits<double>::min();
  return std::exp(log_w);
}

}  // namespace

QuadratureRule gauss_hermite_rule(int order) {
  if (order < 2 || order > 512)
    throw parameter_error("gauss_hermite_rule: order must be in [2, 512]");

  // Nodes: eigenvalues of the Jacobi matrix of the monic probabilists'
  // Hermite recurrence x He_k = He_{k+1} + k He_{k-1}.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw evaluation_error("gauss_hermite_rule: eigensolver failed");

  QuadratureRule r;
  r.order = order;
  r.nodes = es.eigenvalues();
  r.weights.resize(order);
  for (int i = 0; i < order; ++i)
    r.weights[i] = hermite_weight(r.nodes[i], order);
  symmetrize(r);
  return r;
}

QuadratureRule normal_panel_rule(int panels, int points_per_panel,
                                 double halfwidth) {
  if (panels < 1 || points_per_panel < 2 || points_per_panel > 32 ||
      halfwidth <= 0.0)
    throw parameter_error("normal_panel_rule: bad panel layout");

  // Gauss-Legendre nodes/weights on [-1,1] via Golub-Welsch.
  const int m = points_per_panel;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd xg = es.eigenvalues();
  Eigen::VectorXd wg(m);
  for (int i = 0; i < m; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    wg[i] = 2.0 * v0 * v0;
  }

  const double inv_sqrt2pi = 0.3989422804014326779;
  QuadratureRule r;
  r.order = panels * m;
  r.nodes.resize(r.order);
  r.weights.resize(r.order);
  const double h = 2.0 * halfwidth / panels;
  int idx = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = -halfwidth + (p + 0.5) * h;
    for (int i = 0; i < m; ++i, ++idx) {
      const double x = mid + 0.5 * h * xg[i];
      r.nodes[idx] = x;
      r.weights[idx] = 0.5 * h * wg[i] * inv_sqrt2pi * std::exp(-0.5 * x * x);
    }
  }
  symmetrize(r);
  return r;
}

}  // namespace sbp
