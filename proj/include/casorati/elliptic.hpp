#pragma once

#include <cstddef>
#include <functional>

namespace casorati::elliptic {

/// Values of the Jacobi elliptic functions at argument u for modulus k
/// (k is the modulus; the parameter is m = k*k).
struct EllipticTriple {
  double u = 0.0;
  double k = 0.0;
  double sn = 0.0;
  double cn = 1.0;
  double dn = 1.0;
};

/// sn, cn, dn by the descending Landen (arithmetic-geometric mean) recursion.
/// Accepts any finite real u; the argument is reduced modulo the real period 4K
/// before the recursion. Throws InvalidArgument unless 0 <= k < 1.
EllipticTriple jacobi_elliptic(double u, double k);

/// sd(u, k) = sn(u, k) / dn(u, k).
double jacobi_sd(double u, double k);

/// Complete elliptic integral of the first kind K(k) = pi / (2 agm(1, sqrt(1 - k^2))).
double complete_K(double k);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Adaptive Simpson quadrature of f over [a, b]. The error estimate is the sum
/// of the interval-local Richardson estimates |S2 - S1| / 15. When the depth
/// limit is hit before the tolerance is met the result is returned with
/// converged == false. b < a integrates in reverse; a == b yields 0.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double tol,
                           int max_depth = 48);

}  // namespace casorati::elliptic
