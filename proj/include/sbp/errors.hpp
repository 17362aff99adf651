#pragma once

#include <stdexcept>
#include <string>

namespace sbp {

// Bad argument values (wrong range, wrong size). CLI maps these to exit code 2.
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Inputs outside a function's mathematical domain.
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// A numerical evaluation produced a non-finite value.
struct evaluation_error : std::runtime_error {
  double where;
  explicit evaluation_error(const std::string& msg, double at = 0.0)
      : std::runtime_error(msg), where(at) {}
};

// Root bracketing failed; carries the endpoint values.
struct bracket_error : std::runtime_error {
  double f_lo, f_hi;
  explicit bracket_error(const std::string& msg, double flo = 0.0, double fhi = 0.0)
      : std::runtime_error(msg), f_lo(flo), f_hi(fhi) {}
};

// An iterative solver failed; carries the best residual seen.
struct solver_error : std::runtime_error {
  double best_residual;
  explicit solver_error(const std::string& msg, double res = 0.0)
      : std::runtime_error(msg), best_residual(res) {}
};

// A structural invariant of a domain type is violated.
struct invariant_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Problem size exceeds what an exact method can handle.
struct scale_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sbp
