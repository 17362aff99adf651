#include "sbp/flrdt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sbp/roots.hpp"
#include "sbp/special.hpp"

namespace sbp {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kTwoOverPi = 0.6366197723675814;

double phi_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

}  // namespace

double excess_square_moment(double kappa) {
  if (kappa < 0.0) throw parameter_error("excess_square_moment: kappa < 0");
  return (kappa * kappa + 1.0) * std::erfc(kappa / kSqrt2) -
         2.0 * kappa * phi_pdf(kappa);
}

double alpha_level1(double kappa, double* gamma_sq_hat) {
  const double e2 = excess_square_moment(kappa);
  const double alpha = kTwoOverPi / e2;
  if (gamma_sq_hat) *gamma_sq_hat = 0.5 * std::sqrt(alpha * e2);
  return alpha;
}

double alpha_level2(double kappa) {
  if (!(kappa > 0.0))
    throw parameter_error("alpha_level2: kappa must be positive");
  return std::log(2.0) / (-std::log(std::erf(kappa / kSqrt2)));
}

const EvalScheme& default_scheme() {
  static const EvalScheme s{gauss_hermite_rule(80), gauss_hermite_rule(120),
                            gauss_hermite_rule(96),
                            normal_panel_rule(64, 16)};
  return s;
}

const EvalScheme& search_scheme() {
  static const EvalScheme s{gauss_hermite_rule(64), gauss_hermite_rule(80),
                            gauss_hermite_rule(64),
                            normal_panel_rule(40, 12)};
  return s;
}

EvalScheme scaled_scheme(int order) {
  if (order < 8 || order > 512)
    throw parameter_error("scaled_scheme: order must be in [8, 512]");
  auto at_least = [](int v, int lo) { return std::max(v, lo); };
  return EvalScheme{gauss_hermite_rule(at_least(order * 80 / 96, 8)),
                    gauss_hermite_rule(at_least(order * 120 / 96, 8)),
                    gauss_hermite_rule(order),
                    normal_panel_rule(at_least(order * 64 / 96, 4), 16)};
}

namespace {

// Nested dual cascade over one side (cosh or erfc). With innermost log-value
// g and exponents e_k = c_k^(s) the chain is
//   S_2(t) = g(t)
//   S_k(t) = (1/e_k) log E_x exp(e_k S_{k-1}(a_k x + t)),  k = 3..r
//   T      = E_x S_r(a_{r+1} x)
// Layers with a_k = 0 contribute nothing and are skipped exactly; at t = 0
// evenness of the chain lets the node loop run over half the rule.
template <class G>
class Cascade {
 public:
  Cascade(const G& g, const Eigen::VectorXd& coef, const Eigen::VectorXd& expo,
          std::vector<const QuadratureRule*> rules)
      : g_(g), coef_(coef), expo_(expo), rules_(std::move(rules)) {}

  double top(int r) const {
    const int i = r - 2;  // layer r+1
    const double a = coef_[i];
    if (a == 0.0) return S(r, 0.0);
    const QuadratureRule& rule = *rules_[i];
    const int n = static_cast<int>(rule.nodes.size());
    double acc = 0.0;
    for (int j = n / 2; j < n; ++j) {
      const double w =
          (n % 2 == 1 && j == n / 2) ? rule.weights[j] : 2.0 * rule.weights[j];
      acc += w * S(r, a * rule.nodes[j]);
    }
    if (std::isnan(acc))
      throw evaluation_error("psi_level_r: non-finite expectation at layer " +
                             std::to_string(r + 1));
    return acc;
  }

 private:
  double S(int k, double t) const {
    if (k == 2) return g_(t);
    const int i = k - 3;
    const double a = coef_[i];
    if (a == 0.0) return S(k - 1, t);
    const double e = expo_[i];
    const QuadratureRule& rule = *rules_[i];
    const int n = static_cast<int>(rule.nodes.size());
    const bool fold = (t == 0.0);
    const int start = fold ? n / 2 : 0;
    double m = -std::numeric_limits<double>::infinity();
    if (static_cast<int>(scratch_.size()) <= i) scratch_.resize(i + 1);
    std::vector<double>& buf = scratch_[i];  // one buffer per recursion depth
    buf.resize(n);
    for (int j = start; j < n; ++j) {
      buf[j] = e * S(k - 1, a * rule.nodes[j] + t);
      m = std::max(m, buf[j]);
    }
    if (!std::isfinite(m)) {
      if (std::isnan(m))
        throw evaluation_error(
            "psi_level_r: non-finite expectation at layer " + std::to_string(k));
      return m / e;  // all -inf
    }
    double acc = 0.0;
    for (int j = start; j < n; ++j) {
      const double w = (fold && !(n % 2 == 0) && j == n / 2)
                           ? rule.weights[j]
                           : (fold ? 2.0 * rule.weights[j] : rule.weights[j]);
      acc += w * std::exp(buf[j] - m);
    }
    return (m + std::log(acc)) / e;
  }

  const G& g_;
  const Eigen::VectorXd& coef_;
  const Eigen::VectorXd& expo_;
  std::vector<const QuadratureRule*> rules_;
  mutable std::vector<std::vector<double>> scratch_;
};

struct ClampedPoint {
  Eigen::VectorXd p, q, c;
};

ClampedPoint clamp_point(const LiftingPoint& pt) {
  if (pt.p.size() > 0 && pt.p[0] >= 1.0)
    throw domain_error("psi_level_r: p2 >= 1 is singular");
  ClampedPoint cp{pt.p, pt.q_s, pt.c_s};
  const double cap = 1.0 - 1e-10;
  for (int i = 0; i < cp.p.size(); ++i) cp.p[i] = std::min(cp.p[i], cap);
  return cp;
}

}  // namespace

PsiParts psi_level_r_parts(const LiftingPoint& pt, double alpha, double kappa,
                           const EvalScheme& s) {
  pt.validate();
  const int r = pt.level;
  if (r < 2) throw parameter_error("psi_level_r: level must be >= 2");
  if (!(kappa > 0.0)) throw parameter_error("psi_level_r: kappa must be > 0");
  const ClampedPoint cp = clamp_point(pt);

  double sum = 0.5 * (1.0 - cp.p[0]) * cp.q[0];
  for (int k = 3; k <= r; ++k)
    sum += 0.5 *
           (cp.p[k - 3] * cp.q[k - 3] - cp.p[k - 2] * cp.q[k - 2]) *
           cp.c[k - 3];

  const Eigen::VectorXd a = diff_sqrt_chain(cp.q);
  const Eigen::VectorXd b = diff_sqrt_chain(cp.p);

  std::vector<const QuadratureRule*> rules_cosh(r - 1, &s.cosh_inner);
  rules_cosh[r - 2] = &s.cosh_outer;
  std::vector<const QuadratureRule*> rules_erfc(r - 1, &s.erfc_inner);
  int sharp = -1;
  for (int i = 0; i < b.size(); ++i)
    if (b[i] > 0.0) sharp = i;
  if (sharp >= 0) rules_erfc[sharp] = &s.erfc_sharp;

  const auto g_cosh = [](double t) { return log2cosh(t); };
  const double sp = std::sqrt(1.0 - cp.p[0]);
  const double inv = 1.0 / (kSqrt2 * sp);
  const auto g_erfc = [kappa, inv](double eta) {
    return log_erfc_diff_half(-(eta + kappa) * inv, -(eta - kappa) * inv);
  };

  const double t_cosh = Cascade(g_cosh, a, cp.c, rules_cosh).top(r);
  const double t_erfc = Cascade(g_erfc, b, cp.c, rules_erfc).top(r);
  return {sum - t_cosh - alpha * t_erfc, -t_erfc};
}

double psi_level_r(const LiftingPoint& pt, double alpha, double kappa,
                   const EvalScheme& s) {
  return psi_level_r_parts(pt, alpha, kappa, s).value;
}

double psi_level_r(const LiftingPoint& pt, double alpha, double kappa,
                   const QuadratureRule& rule) {
  return psi_level_r_parts(pt, alpha, kappa, EvalScheme{rule, rule, rule, rule})
      .value;
}

double psi_level2(double p2, double q2s, double alpha, double kappa,
                  const EvalScheme& s) {
  LiftingPoint pt;
  pt.level = 2;
  pt.p = Eigen::VectorXd::Constant(1, p2);
  pt.q_s = Eigen::VectorXd::Constant(1, q2s);
  return psi_level_r_parts(pt, alpha, kappa, s).value;
}

double psi_level2(double p2, double q2s, double alpha, double kappa,
                  const QuadratureRule& rule) {
  return psi_level2(p2, q2s, alpha, kappa, EvalScheme{rule, rule, rule, rule});
}

// ---------------------------------------------------------------------------
// stationary solving: free coordinates in an unconstrained parameterization

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }
double logit(double v) {
  const double c = std::clamp(v, 1e-12, 1.0 - 1e-12);
  return std::log(c / (1.0 - c));
}
double safe_log(double v) { return std::log(std::max(v, 1e-300)); }

// free dims: r=2 -> (p2, q2s); r>=3 -> (p_2..p_{r-1}, q_2..q_{r-1}, c_3..c_r)
int free_dim(int r) { return r == 2 ? 2 : 3 * (r - 2); }

LiftingPoint unpack_theta(const Eigen::VectorXd& th, int r) {
  const int m = (r == 2) ? 1 : r - 2;
  LiftingPoint pt;
  pt.level = r;
  pt.p = Eigen::VectorXd::Zero(r - 1);
  pt.q_s = Eigen::VectorXd::Zero(r - 1);
  pt.c_s = Eigen::VectorXd::Zero(std::max(0, r - 2));
  double prev = 1.0;
  for (int i = 0; i < m; ++i) {
    prev *= sigmoid(th[i]);
    pt.p[i] = prev;
  }
  double q = 0.0;
  for (int i = m - 1; i >= 0; --i) {
    q += std::exp(th[m + i]);
    pt.q_s[i] = q;
  }
  for (int j = 0; j < r - 2 && r >= 3; ++j) pt.c_s[j] = std::exp(th[2 * m + j]);
  return pt;
}

Eigen::VectorXd pack_theta(const LiftingPoint& pt) {
  const int r = pt.level;
  const int m = (r == 2) ? 1 : r - 2;
  Eigen::VectorXd th(free_dim(r));
  double prev = 1.0;
  for (int i = 0; i < m; ++i) {
    th[i] = logit(pt.p[i] / prev);
    prev = std::max(pt.p[i], 1e-12);
  }
  for (int i = 0; i < m; ++i) {
    const double next = (i + 1 < m) ? pt.q_s[i + 1] : 0.0;
    th[m + i] = safe_log(pt.q_s[i] - next);
  }
  for (int j = 0; j < r - 2 && r >= 3; ++j) th[2 * m + j] = safe_log(pt.c_s[j]);
  return th;
}

}  // namespace

std::vector<LiftingPoint> multistart_pattern(const LiftingPoint& init, int cap) {
  const int r = init.level;
  const int m = (r == 2) ? 1 : r - 2;
  std::vector<LiftingPoint> out{init};

  auto push = [&](LiftingPoint pt) {
    // repair into the invariant cone
    double prev = 1.0;
    for (int i = 0; i < m; ++i) {
      pt.p[i] = std::clamp(pt.p[i], 1e-9, prev - 1e-12);
      prev = pt.p[i];
    }
    for (int i = m - 1; i >= 0; --i) {
      const double next = (i + 1 < m) ? pt.q_s[i + 1] : 0.0;
      pt.q_s[i] = std::max(pt.q_s[i], next + 1e-12);
    }
    for (int j = 0; j < pt.c_s.size(); ++j)
      pt.c_s[j] = std::max(pt.c_s[j], 1e-9);
    if (static_cast<int>(out.size()) < cap) out.push_back(std::move(pt));
  };

  for (double mag : {0.05, 0.20}) {
    for (double sgn : {1.0, -1.0}) {
      const double f = 1.0 + sgn * mag;
      for (int i = 0; i < m; ++i) {
        LiftingPoint pt = init;
        pt.p[i] *= f;
        if (pt.p[i] != init.p[i]) push(pt);
      }
      for (int i = 0; i < m; ++i) {
        LiftingPoint pt = init;
        pt.q_s[i] *= f;
        if (pt.q_s[i] != init.q_s[i]) push(pt);
      }
      for (int j = 0; j < init.c_s.size(); ++j) {
        LiftingPoint pt = init;
        pt.c_s[j] *= f;
        push(pt);
      }
    }
  }
  // joint +-20% rescalings round out the pattern
  for (double f : {1.2, 0.8, 1.4, 0.6}) {
    LiftingPoint pt = init;
    pt.q_s *= f;
    pt.c_s *= f;
    push(pt);
  }
  if (static_cast<int>(out.size()) > cap) out.resize(cap);
  return out;
}

namespace {

Objective gradnorm_objective(double alpha, double kappa, int r,
                             const EvalScheme& scheme) {
  return [alpha, kappa, r, &scheme](const Eigen::VectorXd& th) -> double {
    auto psi = [&](const Eigen::VectorXd& t) {
      try {
        return psi_level_r(unpack_theta(t, r), alpha, kappa, scheme);
      } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    const int n = static_cast<int>(th.size());
    double acc = 0.0;
    Eigen::VectorXd xp = th, xm = th;
    for (int i = 0; i < n; ++i) {
      const double step = 1e-6 * (1.0 + std::abs(th[i]));
      xp[i] = th[i] + step;
      xm[i] = th[i] - step;
      const double g = (psi(xp) - psi(xm)) / (2.0 * step);
      if (!std::isfinite(g)) return std::numeric_limits<double>::infinity();
      acc += g * g;
      xp[i] = th[i];
      xm[i] = th[i];
    }
    return acc;
  };
}

Box theta_box(int dim) {
  Box b;
  b.lo = Eigen::VectorXd::Constant(dim, -60.0);
  b.hi = Eigen::VectorXd::Constant(dim, 60.0);
  return b;
}

}  // namespace

StationaryResult stationary_point(double alpha, double kappa, int r,
                                  const LiftingPoint& init,
                                  const StationaryOptions& opts) {
  if (r < 2 || r > 5)
    throw parameter_error("stationary_point: level must be in [2, 5]");
  init.validate();
  if (init.level != r)
    throw parameter_error("stationary_point: init level mismatch");

  const EvalScheme& search =
      opts.use_search_scheme ? search_scheme() : default_scheme();
  const Objective obj_search = gradnorm_objective(alpha, kappa, r, search);

  std::vector<LiftingPoint> pattern =
      opts.n_starts <= 1 ? std::vector<LiftingPoint>{init}
                         : multistart_pattern(init, opts.n_starts);
  std::vector<Eigen::VectorXd> starts;
  starts.reserve(pattern.size());
  for (const auto& pt : pattern) starts.push_back(pack_theta(pt));

  NmOptions nm;
  nm.max_evals = opts.max_evals;
  nm.diameter_tol = opts.diameter_tol;
  nm.target_value = opts.target_sq;
  const Box box = theta_box(free_dim(r));

  // The gradient system has several roots (including collapsed corners), and
  // converged residuals are all at the noise floor, so "lowest value" does
  // not identify a branch. Among starts that reach accept_sq we keep the
  // point closest to the seed (the branch being certified); ties and the
  // no-convergence fallback go by lowest start index / lowest residual.
  const Eigen::VectorXd th_init = pack_theta(init);
  MinimizeResult best;
  bool have_converged = false;
  double best_dist = 0.0;
  for (size_t s = 0; s < starts.size(); ++s) {
    MinimizeResult cand = nelder_mead(obj_search, starts[s], box, nm);
    cand.start_index = static_cast<int>(s);
    if (!std::isfinite(cand.value)) continue;
    const bool ok = cand.value <= opts.accept_sq;
    const double dist = (cand.point - th_init).squaredNorm();
    bool take = false;
    if (best.start_index < 0) {
      take = true;
    } else if (ok && !have_converged) {
      take = true;
    } else if (ok == have_converged) {
      take = ok ? (dist < best_dist) : (cand.value < best.value);
    }
    if (take) {
      best = cand;
      best_dist = dist;
      have_converged = have_converged || ok;
    }
  }
  if (best.start_index < 0)
    throw solver_error("stationary_point: every start failed to evaluate",
                       std::numeric_limits<double>::infinity());

  if (opts.use_search_scheme && opts.polish) {
    // polish on the accurate scheme so the reported residual refers to it
    const Objective obj_full = gradnorm_objective(alpha, kappa, r,
                                                  default_scheme());
    NmOptions nm2 = nm;
    nm2.max_evals = std::min(opts.max_evals, opts.polish_evals);
    nm2.initial_step = 1e-3;
    MinimizeResult polished = nelder_mead(obj_full, best.point, box, nm2);
    polished.start_index = best.start_index;
    best = polished;
  }

  if (!(best.value <= opts.accept_sq))
    throw solver_error("stationary_point: no start reached the residual target",
                       best.value);

  StationaryResult res;
  res.point = unpack_theta(best.point, r);
  res.point.validate();
  res.grad_sq = best.value;
  res.evaluations = best.evaluations;
  res.start_index = best.start_index;

  // maximization-type diagnostic: second difference along each c coordinate
  res.c_second_diff.resize(res.point.c_s.size());
  for (int j = 0; j < res.point.c_s.size(); ++j) {
    LiftingPoint up = res.point, dn = res.point;
    const double h = 1e-3 * (1.0 + res.point.c_s[j]);
    up.c_s[j] += h;
    dn.c_s[j] -= h;
    const double f0 = psi_level_r(res.point, alpha, kappa, default_scheme());
    res.c_second_diff[j] =
        (psi_level_r(up, alpha, kappa, default_scheme()) - 2.0 * f0 +
         psi_level_r(dn, alpha, kappa, default_scheme())) /
        (h * h);
  }
  return res;
}

// ---------------------------------------------------------------------------
// capacity estimates

LiftingPoint table_seed(int r) {
  switch (r) {
    case 2:
      return LiftingPoint::make(2, {1e-6}, {1e-6}, {});
    case 3:
      return LiftingPoint::make(3, {0.9852, 0.0}, {0.8794, 0.0}, {4.2629});
    case 4:
      return LiftingPoint::make(4, {0.9988, 0.9729, 0.0},
                                {1.1211, 0.0760, 0.0}, {4.1522, 12.0687});
    case 5:
      return LiftingPoint::make(5, {0.99853, 0.99655, 0.96270, 0.0},
                                {1.2800, 0.0796, 0.0103, 0.0},
                                {4.3528, 12.7310, 29.6479});
    default:
      throw parameter_error("table_seed: level must be in [2, 5]");
  }
}

double table_alpha(int r) {
  switch (r) {
    case 1: return 4.2250;
    case 2: return 1.8159;
    case 3: return 1.6576;
    case 4: return 1.6218;
    case 5: return 1.6093;
    default: throw parameter_error("table_alpha: level must be in [1, 5]");
  }
}

namespace {

CapacityEstimate closed_form_estimate(double kappa, int r) {
  CapacityEstimate est;
  est.kappa = kappa;
  est.level = r;
  if (r == 1) {
    double gam = 0.0;
    est.alpha = alpha_level1(kappa, &gam);
    est.point.level = 1;
    est.point.gamma_sq = gam;
    est.psi_residual = -std::sqrt(kTwoOverPi) +
                       std::sqrt(est.alpha * excess_square_moment(kappa));
    est.grad_residual = 0.0;
    return est;
  }
  // r == 2: the optimum sits on the partial second level, p2 = q2s = 0
  est.alpha = alpha_level2(kappa);
  est.point = LiftingPoint::make(2, {0.0}, {0.0}, {});
  est.psi_residual = psi_level2(0.0, 0.0, est.alpha, kappa);
  // gradient vanishes in the corner limit; report it just inside
  const LiftingPoint near = LiftingPoint::make(2, {1e-9}, {1e-9}, {});
  const Objective obj = gradnorm_objective(est.alpha, kappa, 2,
                                           default_scheme());
  est.grad_residual = std::sqrt(obj(pack_theta(near)));
  est.quadrature_order = default_scheme().erfc_sharp.order;
  return est;
}

struct TrackState {
  LiftingPoint point;
  double alpha;
  double psi;
  double slope;
};

// Re-solve the stationary system at a new alpha, guarding against branch
// jumps: if the point moves too much, retry with a halved alpha step. All
// walk/bisection work runs on the cheap search scheme for speed; the final
// estimate is re-polished on the accurate scheme by the caller.
class BranchTracker {
 public:
  BranchTracker(double kappa, int r, const EvalScheme& scheme,
                const StationaryOptions& opts)
      : kappa_(kappa), r_(r), scheme_(scheme), opts_(opts) {}

  TrackState solve(double alpha, const LiftingPoint& seed, int n_starts) {
    StationaryOptions o = opts_;
    o.n_starts = n_starts;
    o.polish = false;
    o.accept_sq = 1e-10;  // residual on the search scheme; tightened at polish
    StationaryResult st = stationary_point(alpha, kappa_, r_, seed, o);
    const PsiParts parts = psi_level_r_parts(st.point, alpha, kappa_, scheme_);
    last_grad_sq_ = st.grad_sq;
    return {st.point, alpha, parts.value, parts.dvalue_dalpha};
  }

  // step from s to alpha, shrinking the step if the branch is lost
  TrackState step(const TrackState& s, double alpha) {
    double target = alpha;
    for (int attempt = 0; attempt < 5; ++attempt) {
      TrackState t = solve(target, s.point, 1);
      if (close_branch(s.point, t.point)) return t;
      target = 0.5 * (s.alpha + target);
    }
    throw solver_error("alpha_c: lost the stationary branch while stepping",
                       last_grad_sq_);
  }

  double last_grad_sq() const { return last_grad_sq_; }

 private:
  static bool close_branch(const LiftingPoint& a, const LiftingPoint& b) {
    auto rel = [](double x, double y) {
      return std::abs(x - y) / (0.05 + std::max(std::abs(x), std::abs(y)));
    };
    for (int i = 0; i < a.p.size(); ++i)
      if (rel(a.p[i], b.p[i]) > 0.35) return false;
    for (int i = 0; i < a.q_s.size(); ++i)
      if (rel(a.q_s[i], b.q_s[i]) > 0.35) return false;
    for (int i = 0; i < a.c_s.size(); ++i)
      if (rel(a.c_s[i], b.c_s[i]) > 0.35) return false;
    return true;
  }

  double kappa_;
  int r_;
  const EvalScheme& scheme_;
  StationaryOptions opts_;
  double last_grad_sq_ = 0.0;
};

}  // namespace

CapacityEstimate alpha_c(double kappa, int r,
                         std::optional<std::pair<double, double>> bracket,
                         const AlphaCOptions& opts) {
  if (r < 1 || r > 5) throw parameter_error("alpha_c: level must be in [1, 5]");
  if (!(kappa > 0.0) && r >= 2)
    throw parameter_error("alpha_c: kappa must be positive");
  if (r <= 2) return closed_form_estimate(kappa, r);

  const EvalScheme scheme_override =
      opts.order_override > 0 ? scaled_scheme(opts.order_override) : EvalScheme{};
  const EvalScheme& full =
      opts.order_override > 0 ? scheme_override : default_scheme();
  const EvalScheme& search = search_scheme();

  double lo = 0.0, hi = 0.0;
  if (bracket) {
    lo = bracket->first;
    hi = bracket->second;
  } else if (std::abs(kappa - 1.0) < 1e-12) {
    lo = (r == 3) ? 1.5 : (r == 4 ? 1.5 : 1.45);
    hi = (r == 3) ? 1.8 : (r == 4 ? 1.7 : 1.7);
  } else {
    lo = 1e-4;
    hi = alpha_level2(kappa);  // monotone level sequence bounds from above
  }
  if (!(lo < hi)) throw parameter_error("alpha_c: empty bracket");

  StationaryOptions sopts;
  BranchTracker tracker(kappa, r, search, sopts);

  // seed: kappa = 1 table values, continued in kappa when needed
  LiftingPoint seed = table_seed(r);
  double a0 = std::clamp(table_alpha(r), lo, hi);
  if (std::abs(kappa - 1.0) > 1e-12) {
    const int steps = std::max(
        1, static_cast<int>(std::ceil(std::abs(std::log(kappa)) /
                                      std::log(1.2))));
    double a_cur = table_alpha(r);
    TrackState s{seed, a_cur, 0.0, 1.0};
    for (int i = 1; i <= steps; ++i) {
      const double kap_i = std::exp(std::log(1.0) +
                                    (std::log(kappa)) * i / steps);
      BranchTracker walk(kap_i, r, search, sopts);
      s = walk.solve(a_cur, s.point, i == 1 ? opts.init_starts : 1);
      // one clamped Newton correction keeps alpha near the branch root
      double step = -s.psi / s.slope;
      step = std::clamp(step, -0.15 * std::abs(a_cur), 0.15 * std::abs(a_cur));
      a_cur = std::clamp(a_cur + step, 0.5 * lo, 1.2 * hi);
      s = walk.step(s, a_cur);
    }
    seed = s.point;
    a0 = std::clamp(a_cur, lo, hi);
  }

  TrackState cur = tracker.solve(a0, seed, opts.init_starts);

  // walk alpha in clamped Newton steps until the root is bracketed
  double blo = 0.0, bhi = 0.0, flo = 0.0;
  bool bracketed = false;
  for (int it = 0; it < opts.max_steps; ++it) {
    if (std::abs(cur.psi) < opts.psi_tol) break;
    const double hop = opts.hop_rel * std::max(std::abs(cur.alpha), 0.5);
    double step = -cur.psi / cur.slope;
    step = std::clamp(step, -hop, hop);
    double a_next = cur.alpha + step;
    if (a_next < lo || a_next > hi)
      throw bracket_error("alpha_c: walk left the bracket", cur.psi, step);
    TrackState nxt = tracker.step(cur, a_next);
    if (std::signbit(nxt.psi) != std::signbit(cur.psi)) {
      blo = std::min(cur.alpha, nxt.alpha);
      bhi = std::max(cur.alpha, nxt.alpha);
      flo = (cur.alpha < nxt.alpha) ? cur.psi : nxt.psi;
      cur = nxt;
      bracketed = true;
      break;
    }
    cur = nxt;
  }

  if (bracketed) {
    const double tol = opts.alpha_tol * std::max(1.0, std::abs(bhi));
    while (bhi - blo > tol && std::abs(cur.psi) >= opts.psi_tol) {
      const double mid = 0.5 * (blo + bhi);
      cur = tracker.step(cur, mid);
      if (std::signbit(cur.psi) == std::signbit(flo)) {
        blo = mid;
        flo = cur.psi;
      } else {
        bhi = mid;
      }
    }
  }

  // switch to the accurate scheme: re-polish the stationary point and apply
  // Newton touch-ups in alpha until the accurate residual is at tolerance
  StationaryOptions fin;
  fin.n_starts = 1;
  double alpha_f = cur.alpha;
  StationaryResult st = stationary_point(alpha_f, kappa, r, cur.point, fin);
  PsiParts parts = psi_level_r_parts(st.point, alpha_f, kappa, full);
  for (int it = 0; it < 6 && std::abs(parts.value) >= opts.psi_tol; ++it) {
    const double step =
        std::clamp(-parts.value / parts.dvalue_dalpha, -0.01 * alpha_f,
                   0.01 * alpha_f);
    alpha_f += step;
    fin.polish_evals = 1500;
    st = stationary_point(alpha_f, kappa, r, st.point, fin);
    parts = psi_level_r_parts(st.point, alpha_f, kappa, full);
  }

  CapacityEstimate est;
  est.kappa = kappa;
  est.level = r;
  est.alpha = alpha_f;
  est.point = st.point;
  est.psi_residual = parts.value;
  est.grad_residual = std::sqrt(st.grad_sq);
  est.quadrature_order = full.erfc_sharp.order;
  return est;
}

}  // namespace sbp
