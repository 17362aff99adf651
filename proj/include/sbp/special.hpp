#pragma once

namespace sbp {

/// Scaled complementary error function exp(x^2) * erfc(x).
/// Accurate for all x >= -26; overflows (returns inf) below that.
double erfcx(double x);

/// log(0.5*erfc(a) - 0.5*erfc(b)) for a < b, computed without catastrophic
/// cancellation. The result stays finite (as a log) arbitrarily deep into the
/// tails, e.g. a=26, b=28 gives about -677 even though the difference itself
/// underflows double precision.
double log_erfc_diff_half(double a, double b);

/// log(2 cosh(z)), overflow-safe.
double log2cosh(double z);

}  // namespace sbp
