#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace sbp {

/// A Gaussian constraint matrix with margin kappa and density alpha = m/n.
struct SbpInstance {
  int n = 0;
  int m = 0;
  double kappa = 0.0;
  double alpha = 0.0;  // recorded requested density; m = round(alpha * n)
  std::uint64_t seed = 0;
  Eigen::MatrixXd G;  // m x n, iid standard normals
};

/// Deterministic instance generation. Entry (j, i) of G is the Box-Muller
/// transform z = sqrt(-2 ln u1) cos(2 pi u2) of the counter stream values
/// u1 = unit(seed, 2k), u2 = unit(seed, 2k+1) with k = j*n + i (row-major);
/// see rng.hpp for the stream definition. Identical (n, alpha, kappa, seed)
/// reproduce G exactly on the same platform.
SbpInstance gen_instance(int n, double alpha, double kappa,
                         std::uint64_t seed);

struct Feasibility {
  bool feasible = false;
  double kappa_hat = 0.0;  // max_j |(G x)_j| with x = sign/sqrt(n)
};

/// Checks a sign vector (entries +-1) against |G x| <= kappa.
Feasibility is_feasible_sign(const Eigen::VectorXi& x_sign,
                             const SbpInstance& inst);

struct OracleResult {
  double xi_star = 0.0;        // min over the sign cube of max_j |(Gx)_j|
  Eigen::VectorXi argmin_sign; // lexicographically smallest minimizer (-1 < +1)
  bool feasible = false;       // xi_star <= kappa
  std::uint64_t enumerated = 0;
};

/// Exact minimum discrepancy by enumeration of half the sign cube (the x
/// and -x halves give identical objectives). n <= 26.
OracleResult brute_force(const SbpInstance& inst);

/// Plain-text serialization with hexfloat entries so instances round-trip
/// bit-exactly. Format:
///   sbp-instance v1
///   n <n> m <m> kappa <hexfloat> alpha <hexfloat> seed <u64> generator <id>
///   <m rows of n hexfloat entries>
void save_instance(const std::string& path, const SbpInstance& inst);
SbpInstance load_instance(const std::string& path);

}  // namespace sbp
