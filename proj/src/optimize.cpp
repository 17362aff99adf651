#include "sbp/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "sbp/errors.hpp"

namespace sbp {

Box Box::unbounded(int dim) {
  const double inf = std::numeric_limits<double>::infinity();
  Box b;
  b.lo = Eigen::VectorXd::Constant(dim, -inf);
  b.hi = Eigen::VectorXd::Constant(dim, inf);
  return b;
}

bool Box::contains(const Eigen::VectorXd& x) const {
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

Eigen::VectorXd Box::clamp(const Eigen::VectorXd& x) const {
  return x.array().max(lo.array()).min(hi.array());
}

namespace {

double simplex_diameter(const std::vector<Eigen::VectorXd>& v) {
  double d = 0.0;
  for (size_t i = 1; i < v.size(); ++i) d = std::max(d, (v[i] - v[0]).norm());
  return d;
}

}  // namespace

MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                           const Box& bounds, const NmOptions& opts) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw parameter_error("nelder_mead: empty start point");
  if (!bounds.contains(x0))
    throw parameter_error("nelder_mead: start outside bounds");

  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };

  std::vector<Eigen::VectorXd> v(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p = x0;
    const double step = opts.initial_step * (1.0 + std::abs(x0[i]));
    p[i] += step;
    if (!bounds.contains(p)) p[i] = x0[i] - step;
    v[i + 1] = bounds.clamp(p);
  }
  for (int i = 0; i <= n; ++i) fv[i] = eval(v[i]);

  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<Eigen::VectorXd> v2(n + 1);
    std::vector<double> f2(n + 1);
    for (int i = 0; i <= n; ++i) {
      v2[i] = v[idx[i]];
      f2[i] = fv[idx[i]];
    }
    v.swap(v2);
    fv.swap(f2);
  };
  order();

  // standard coefficients; shrink adapts to dimension (Gao-Han)
  const double rho = 1.0, chi = 2.0, gam = 0.5;
  const double sig = 1.0 - 1.0 / n;

  while (evals < opts.max_evals) {
    if (fv[0] <= opts.target_value) break;
    if (simplex_diameter(v) < opts.diameter_tol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += v[i];
    centroid /= n;

    Eigen::VectorXd xr = bounds.clamp(centroid + rho * (centroid - v[n]));
    const double fr = eval(xr);
    if (fr < fv[0]) {
      Eigen::VectorXd xe = bounds.clamp(centroid + chi * (xr - centroid));
      const double fe = eval(xe);
      if (fe < fr) {
        v[n] = xe;
        fv[n] = fe;
      } else {
        v[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      v[n] = xr;
      fv[n] = fr;
    } else {
      if (fr < fv[n]) {  // outside contraction
        Eigen::VectorXd xc = bounds.clamp(centroid + gam * (xr - centroid));
        const double fc = eval(xc);
        if (fc <= fr) {
          v[n] = xc;
          fv[n] = fc;
        } else {
          for (int i = 1; i <= n; ++i) {
            v[i] = bounds.clamp(v[0] + sig * (v[i] - v[0]));
            fv[i] = eval(v[i]);
          }
        }
      } else {  // inside contraction
        Eigen::VectorXd xc = bounds.clamp(centroid - gam * (centroid - v[n]));
        const double fc = eval(xc);
        if (fc < fv[n]) {
          v[n] = xc;
          fv[n] = fc;
        } else {
          for (int i = 1; i <= n; ++i) {
            v[i] = bounds.clamp(v[0] + sig * (v[i] - v[0]));
            fv[i] = eval(v[i]);
          }
        }
      }
    }
    order();
  }

  MinimizeResult r;
  r.point = v[0];
  r.value = fv[0];
  r.evaluations = evals;
  return r;
}

MinimizeResult minimize_multistart(const Objective& f,
                                   const std::vector<Eigen::VectorXd>& starts,
                                   const Box& bounds, const NmOptions& opts) {
  if (starts.empty()) throw parameter_error("minimize_multistart: no starts");
  MinimizeResult best;
  bool any_finite = false;
  for (size_t s = 0; s < starts.size(); ++s) {
    MinimizeResult r = nelder_mead(f, starts[s], bounds, opts);
    r.start_index = static_cast<int>(s);
    if (!std::isfinite(r.value)) continue;
    // lowest value wins; exact ties resolved by lowest start index
    if (!any_finite || r.value < best.value) {
      best = r;
      any_finite = true;
    }
  }
  if (!any_finite)
    throw solver_error("minimize_multistart: no start produced a finite value");
  return best;
}

Eigen::VectorXd finite_diff_grad(const Objective& f, const Eigen::VectorXd& x,
                                 double h) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x, xm = x;
  for (int i = 0; i < n; ++i) {
    const double step = h * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    g[i] = (f(xp) - f(xm)) / (2.0 * step);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

}  // namespace sbp
