#include "sbp/special.hpp"

#include <cmath>
#include <limits>

#include "sbp/errors.hpp"

namespace sbp {

double log2cosh(double z) {
  const double az = std::abs(z);
  return az + std::log1p(std::exp(-2.0 * az));
}

double erfcx(double x) {
  if (x < 0.0) {
    // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows for x < -26.6
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < 20.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series erfcx(x) ~ (1/(x sqrt(pi))) sum_k (-1)^k (2k-1)!!/(2x^2)^k.
  // At x = 20 the truncation after 8 terms is below 1e-17 relative.
  const double inv_sqrt_pi = 0.5641895835477562869;
  const double r = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * r;
    sum += term;
  }
  return inv_sqrt_pi / x * sum;
}

double log_erfc_diff_half(double a, double b) {
  if (!(a < b)) throw domain_error("log_erfc_diff_half: requires a < b");
  if (b <= 0.0) return log_erfc_diff_half(-b, -a);  // reflection symmetry
  if (a >= 0.0) {
    // 0.5(erfc(a)-erfc(b)) = 0.5 e^{-a^2} (erfcx(a) - e^{a^2-b^2} erfcx(b))
    const double t = (a - b) * (a + b);  // <= 0, exp does not overflow
    const double d = erfcx(a) - std::exp(t) * erfcx(b);
    return -a * a + std::log(0.5 * d);
  }
  // a < 0 < b: both erf terms add with the same sign, no cancellation
  return std::log(0.5 * (std::erf(b) - std::erf(a)));
}

}  // namespace sbp
