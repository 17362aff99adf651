#include "sbp/instance.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sbp/errors.hpp"
#include "sbp/rng.hpp"

namespace sbp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

SbpInstance gen_instance(int n, double alpha, double kappa,
                         std::uint64_t seed) {
  if (n < 1) throw parameter_error("gen_instance: n must be >= 1");
  if (!(alpha > 0.0)) throw parameter_error("gen_instance: alpha must be > 0");
  const int m = static_cast<int>(std::floor(alpha * n + 0.5));  // round half up
  if (m == 0) throw parameter_error("gen_instance: alpha*n rounds to zero rows");

  SbpInstance inst;
  inst.n = n;
  inst.m = m;
  inst.kappa = kappa;
  inst.alpha = alpha;
  inst.seed = seed;
  inst.G.resize(m, n);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::uint64_t k =
          static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(n) + i;
      const double u1 = unit_from_bits(splitmix64_value(seed, 2 * k));
      const double u2 = unit_from_bits(splitmix64_value(seed, 2 * k + 1));
      inst.G(j, i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }
  }
  return inst;
}

Feasibility is_feasible_sign(const Eigen::VectorXi& x_sign,
                             const SbpInstance& inst) {
  if (x_sign.size() != inst.n)
    throw parameter_error("is_feasible_sign: sign vector length mismatch");
  Eigen::VectorXd x(inst.n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(inst.n));
  for (int i = 0; i < inst.n; ++i) {
    if (x_sign[i] != 1 && x_sign[i] != -1)
      throw parameter_error("is_feasible_sign: entries must be +-1");
    x[i] = scale * x_sign[i];
  }
  const double kh = (inst.G * x).cwiseAbs().maxCoeff();
  return {kh <= inst.kappa, kh};
}

namespace {

// lexicographic comparison with -1 < +1
bool lex_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

Eigen::VectorXi canonical_pair_min(const Eigen::VectorXi& s) {
  Eigen::VectorXi neg = -s;
  return lex_less(neg, s) ? neg : s;
}

}  // namespace

OracleResult brute_force(const SbpInstance& inst) {
  if (inst.n > 26)
    throw scale_error("brute_force: n > 26 exceeds the enumeration budget");
  const int n = inst.n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  // Gray-code walk over the half cube with s[0] = +1 fixed (x <-> -x symmetry)
  Eigen::VectorXi s = Eigen::VectorXi::Ones(n);
  Eigen::VectorXd y = inst.G.rowwise().sum() * scale;

  double best = y.cwiseAbs().maxCoeff();
  Eigen::VectorXi best_sign = s;
  const std::uint64_t total = (n == 1) ? 1ULL : (1ULL << (n - 1));
  for (std::uint64_t k = 1; k < total; ++k) {
    const int bit = std::countr_zero(k);  // flips s[1 + bit]
    const int idx = 1 + bit;
    s[idx] = -s[idx];
    y += inst.G.col(idx) * (2.0 * scale * s[idx]);
    const double v = y.cwiseAbs().maxCoeff();
    if (v < best) {
      best = v;
      best_sign = s;
    } else if (v == best &&
               lex_less(canonical_pair_min(s), canonical_pair_min(best_sign))) {
      best_sign = s;
    }
  }

  OracleResult res;
  res.xi_star = best;
  res.argmin_sign = canonical_pair_min(best_sign);
  res.feasible = best <= inst.kappa;
  res.enumerated = total;
  return res;
}

void save_instance(const std::string& path, const SbpInstance& inst) {
  std::ofstream out(path);
  if (!out) throw parameter_error("save_instance: cannot open " + path);
  char buf[64];
  out << "sbp-instance v1\n";
  std::snprintf(buf, sizeof buf, "%a", inst.kappa);
  out << "n " << inst.n << " m " << inst.m << " kappa " << buf;
  std::snprintf(buf, sizeof buf, "%a", inst.alpha);
  out << " alpha " << buf << " seed " << inst.seed
      << " generator splitmix64-boxmuller-v1\n";
  for (int j = 0; j < inst.m; ++j) {
    for (int i = 0; i < inst.n; ++i) {
      std::snprintf(buf, sizeof buf, "%a", inst.G(j, i));
      out << buf << (i + 1 == inst.n ? '\n' : ' ');
    }
  }
}

SbpInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parameter_error("load_instance: cannot open " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "sbp-instance" || version != "v1")
    throw parameter_error("load_instance: unrecognized header");
  SbpInstance inst;
  std::string key, gen;
  std::string kappa_s, alpha_s;
  in >> key >> inst.n >> key >> inst.m >> key >> kappa_s >> key >> alpha_s >>
      key >> inst.seed >> key >> gen;
  if (gen != "splitmix64-boxmuller-v1")
    throw parameter_error("load_instance: unknown generator id " + gen);
  inst.kappa = std::strtod(kappa_s.c_str(), nullptr);
  inst.alpha = std::strtod(alpha_s.c_str(), nullptr);
  if (inst.n < 1 || inst.m < 1)
    throw parameter_error("load_instance: bad dimensions");
  inst.G.resize(inst.m, inst.n);
  std::string tok;
  for (int j = 0; j < inst.m; ++j)
    for (int i = 0; i < inst.n; ++i) {
      if (!(in >> tok)) throw parameter_error("load_instance: truncated file");
      inst.G(j, i) = std::strtod(tok.c_str(), nullptr);
    }
  return inst;
}

}  // namespace sbp
