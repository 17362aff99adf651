#include "sbp/asymptotics.hpp"

#include <cmath>
#include <vector>

#include "sbp/errors.hpp"
#include "sbp/flrdt.hpp"
#include "sbp/optimize.hpp"
#include "sbp/quadrature.hpp"
#include "sbp/roots.hpp"
#include "sbp/special.hpp"

namespace sbp {

namespace {

constexpr double kSqrtPi = 1.7724538509055160;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

double kappa_x_lhs(double k) {
  const double e = std::erf(k);
  return -std::log(e) - k * std::exp(-k * k) / (kSqrtPi * e);
}

}  // namespace

double solve_kappa_x() {
  return bisect_root(kappa_x_lhs, 0.5, 1.0, 1e-14, 1e-12).root;
}

double small_alpha_constant() {
  const double kx = solve_kappa_x();
  return kx * std::sqrt(-8.0 * std::log(std::erf(kx)));
}

namespace {

// inner stationarity: -1/4 log((1-p2)/4) = alpha kappa e^{-kappa^2/(2(1-p2))}
//                     / (sqrt(2 pi) erf(kappa/sqrt(2(1-p2))) (1-p2)^{3/2})
// returns the smallest root in x = 1-p2, or a negative value if none exists
double inner_x_residual(double x, double alpha, double kappa) {
  const double lhs = -0.25 * std::log(0.25 * x);
  const double rhs = alpha * kappa * std::exp(-kappa * kappa / (2.0 * x)) /
                     (kSqrt2Pi * std::erf(kappa / std::sqrt(2.0 * x)) *
                      x * std::sqrt(x));
  return lhs - rhs;
}

double solve_inner_x(double alpha, double kappa) {
  const int n_grid = 2400;
  const double l_lo = 2.0 * std::log(kappa) - 60.0;
  const double l_hi = std::log(0.99999);
  double prev_l = l_lo;
  double prev_f = inner_x_residual(std::exp(l_lo), alpha, kappa);
  for (int i = 1; i <= n_grid; ++i) {
    const double l = l_lo + (l_hi - l_lo) * i / n_grid;
    const double f = inner_x_residual(std::exp(l), alpha, kappa);
    if (std::signbit(f) != std::signbit(prev_f)) {
      auto fn = [&](double ll) {
        return inner_x_residual(std::exp(ll), alpha, kappa);
      };
      return std::exp(bisect_root(fn, prev_l, l, 1e-14).root);
    }
    prev_l = l;
    prev_f = f;
  }
  return -1.0;  // no stationary p2 at this alpha
}

double psi_sk3(double alpha, double kappa, double* x_out = nullptr) {
  const double x = solve_inner_x(alpha, kappa);
  if (x_out) *x_out = x;
  if (x <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 0.25 * x * std::log(0.25 * x) - 0.25 * x -
         alpha * std::log(std::erf(kappa / std::sqrt(2.0 * x)));
}

}  // namespace

SmallKappaLevel3 level3_small_kappa(double kappa, double cutoff) {
  if (!(kappa > 0.0) || kappa > cutoff)
    throw parameter_error("level3_small_kappa: kappa outside (0, cutoff]");

  // psi is increasing in alpha; the level sequence keeps the root at or below
  // the level-2 threshold scale, so walk down from there until the sign flips
  double hi = alpha_level2(kappa) * 1.4;
  double fhi = psi_sk3(hi, kappa);
  int guard = 0;
  while (std::isnan(fhi) || fhi < 0.0) {
    hi *= 1.25;
    fhi = psi_sk3(hi, kappa);
    if (++guard > 60)
      throw bracket_error("level3_small_kappa: no positive endpoint", fhi, hi);
  }
  double lo = hi;
  double flo = fhi;
  guard = 0;
  while (flo > 0.0) {
    lo *= 0.93;
    flo = psi_sk3(lo, kappa);
    if (std::isnan(flo))
      throw bracket_error(
          "level3_small_kappa: inner system lost before sign change", flo, lo);
    if (++guard > 600)
      throw bracket_error("level3_small_kappa: no sign change found", flo, lo);
  }
  auto fn = [&](double a) { return psi_sk3(a, kappa); };
  const double a = bisect_root(fn, lo, lo / 0.93, 1e-13 * hi).root;

  SmallKappaLevel3 out;
  out.alpha = a;
  double x = 0.0;
  out.psi_residual = psi_sk3(a, kappa, &x);
  out.p2_hat = 1.0 - x;
  out.inner_residual = inner_x_residual(x, a, kappa);
  out.p_x = x * (-std::log(a)) / a;
  out.c_x = -0.5 * std::log(0.25 * x);
  out.q2_bar = out.c_x / (-std::log(a));
  return out;
}

double level3_small_kappa_alpha(double kappa, double cutoff) {
  return level3_small_kappa(kappa, cutoff).alpha;
}

AsymptoticSolution asymptotic_solution(double kappa) {
  const SmallKappaLevel3 l3 = level3_small_kappa(kappa);
  AsymptoticSolution s;
  s.kappa_x = solve_kappa_x();
  s.constant = small_alpha_constant();
  s.p2_hat = l3.p2_hat;
  s.p_x = l3.p_x;
  s.c_x = l3.c_x;
  s.q2_bar = l3.q2_bar;
  return s;
}

// ---------------------------------------------------------------------------
// level 4, reduced functional with the outer h-saddle solved per evaluation

namespace {

struct OmegaQ {
  const QuadratureRule& rule;
  double q2s, c3s;

  double log_omega(double x) const {
    const double rq = std::sqrt(q2s);
    return log_expect_exp(
        [&](double z) { return c3s * log2cosh(rq * z + x); }, rule);
  }
  // E[(2cosh)^c tanh] / E[(2cosh)^c]
  double tanh_ratio(double x) const {
    const double rq = std::sqrt(q2s);
    double m = -std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(rule.nodes.size());
    std::vector<double> lv(n);
    for (int i = 0; i < n; ++i) {
      lv[i] = c3s * log2cosh(rq * rule.nodes[i] + x);
      m = std::max(m, lv[i]);
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = rule.weights[i] * std::exp(lv[i] - m);
      num += w * std::tanh(rq * rule.nodes[i] + x);
      den += w;
    }
    return num / den;
  }
};

double solve_h_star(const OmegaQ& oq, double c_x) {
  auto f = [&](double h) { return c_x * oq.tanh_ratio(h) - h; };
  const double h_lo = 1e-7 * (1.0 + c_x);
  if (f(h_lo) <= 0.0) return 0.0;  // degenerate: the symmetric point wins
  double h_hi = c_x + 5.0 * std::sqrt(oq.q2s) * oq.c3s + 1.0;
  int guard = 0;
  while (f(h_hi) > 0.0 && ++guard < 60) h_hi *= 1.5;
  return bisect_root(f, h_lo, h_hi, 1e-12).root;
}

struct ReducedLevel4 {
  double kappa;
  const QuadratureRule& rule;

  // params: p2, p3, q2s, c3s, c_x
  double psi(const Eigen::VectorXd& v, double alpha, double* h_out = nullptr,
             double* slope = nullptr) const {
    const double p2 = v[0], p3 = v[1], q2s = v[2], c3s = v[3], c_x = v[4];
    const OmegaQ oq{rule, q2s, c3s};
    const double h = solve_h_star(oq, c_x);
    if (h_out) *h_out = h;
    const double sq = oq.log_omega(h) / c3s - 0.5 * h * h / c_x;

    const double b3 = std::sqrt(std::max(p2 - p3, 0.0));
    const double s = std::sqrt(1.0 - p2);
    const double inv = 1.0 / (kSqrt2 * s);
    const double k = kappa;
    const double log_omega_p = log_expect_exp(
        [&](double u) {
          const double eta = b3 * u;
          return c3s * log_erfc_diff_half(-(eta + k) * inv, -(eta - k) * inv);
        },
        rule);
    if (slope) *slope = -log_omega_p / c3s;
    return 0.5 * (1.0 - p2) * q2s + 0.5 * p2 * q2s * c3s + 0.5 * p3 * c_x -
           sq - alpha * log_omega_p / c3s;
  }
};

Eigen::VectorXd pack_sk4(const Eigen::VectorXd& v) {
  Eigen::VectorXd th(5);
  auto logit = [](double x) {
    const double c = std::clamp(x, 1e-12, 1.0 - 1e-12);
    return std::log(c / (1.0 - c));
  };
  th[0] = logit(v[0]);
  th[1] = logit(v[1] / v[0]);
  th[2] = std::log(std::max(v[2], 1e-300));
  th[3] = std::log(std::max(v[3], 1e-300));
  th[4] = std::log(std::max(v[4], 1e-300));
  return th;
}

Eigen::VectorXd unpack_sk4(const Eigen::VectorXd& th) {
  Eigen::VectorXd v(5);
  auto sig = [](double t) { return 1.0 / (1.0 + std::exp(-t)); };
  v[0] = sig(th[0]);
  v[1] = v[0] * sig(th[1]);
  v[2] = std::exp(th[2]);
  v[3] = std::exp(th[3]);
  v[4] = std::exp(th[4]);
  return v;
}

}  // namespace

SmallKappaLevel4 level4_small_kappa(double kappa, double cutoff) {
  if (!(kappa > 0.0) || kappa > cutoff)
    throw parameter_error("level4_small_kappa: kappa outside (0, cutoff]");

  const QuadratureRule rule = gauss_hermite_rule(80);
  const ReducedLevel4 red{kappa, rule};
  const SmallKappaLevel3 l3 = level3_small_kappa(kappa, cutoff);
  const double x3 = 1.0 - l3.p2_hat;
  const double cx3 = l3.c_x;

  auto gradnorm = [&](double alpha) {
    return [&red, alpha](const Eigen::VectorXd& th) -> double {
      auto f = [&](const Eigen::VectorXd& t) {
        try {
          return red.psi(unpack_sk4(t), alpha);
        } catch (const std::exception&) {
          return std::numeric_limits<double>::quiet_NaN();
        }
      };
      double acc = 0.0;
      Eigen::VectorXd tp = th, tm = th;
      for (int i = 0; i < 5; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(th[i]));
        tp[i] = th[i] + h;
        tm[i] = th[i] - h;
        const double g = (f(tp) - f(tm)) / (2.0 * h);
        if (!std::isfinite(g)) return std::numeric_limits<double>::infinity();
        acc += g * g;
        tp[i] = th[i];
        tm[i] = th[i];
      }
      return acc;
    };
  };

  // seeds split the level-3 scale c_x^{(3)} between q2s c3s and c_x
  std::vector<Eigen::VectorXd> starts;
  for (double c3s0 : {2.0, 4.0, 8.0}) {
    for (double frac : {0.3, 0.5, 0.7}) {
      Eigen::VectorXd v(5);
      v << 1.0 - x3, 1.0 - 2.0 * x3, cx3 * frac / c3s0, c3s0,
          cx3 * (1.0 - frac);
      starts.push_back(pack_sk4(v));
    }
  }

  Box box;
  box.lo = Eigen::VectorXd::Constant(5, -60.0);
  box.hi = Eigen::VectorXd::Constant(5, 60.0);
  NmOptions nm;
  nm.max_evals = 8000;
  nm.target_value = 1e-24;

  double alpha = l3.alpha;
  MinimizeResult best = minimize_multistart(gradnorm(alpha), starts, box, nm);

  // track the branch while alpha moves to the zero of psi
  NmOptions nm_warm = nm;
  nm_warm.max_evals = 4000;
  Eigen::VectorXd th = best.point;
  double f = red.psi(unpack_sk4(th), alpha);
  double slope = 0.0;
  red.psi(unpack_sk4(th), alpha, nullptr, &slope);
  for (int it = 0; it < 80; ++it) {
    if (std::abs(f) < 1e-11) break;
    double step = -f / slope;
    step = std::clamp(step, -0.1 * alpha, 0.1 * alpha);
    alpha += step;
    best = nelder_mead(gradnorm(alpha), th, box, nm_warm);
    th = best.point;
    f = red.psi(unpack_sk4(th), alpha, nullptr, &slope);
  }
  if (!(std::abs(f) < 1e-8))
    throw solver_error("level4_small_kappa: alpha iteration did not converge",
                       std::abs(f));

  SmallKappaLevel4 out;
  const Eigen::VectorXd v = unpack_sk4(th);
  out.alpha = alpha;
  out.p2 = v[0];
  out.p3 = v[1];
  out.q2s = v[2];
  out.c3s = v[3];
  out.c_x = v[4];
  out.psi_residual = red.psi(v, alpha, &out.h_star);
  const OmegaQ oq{rule, out.q2s, out.c3s};
  out.saddle_residual = out.c_x * oq.tanh_ratio(out.h_star) - out.h_star;
  out.grad_sq = best.value;
  return out;
}

double level4_small_kappa_alpha(double kappa, double cutoff) {
  return level4_small_kappa(kappa, cutoff).alpha;
}

}  // namespace sbp
