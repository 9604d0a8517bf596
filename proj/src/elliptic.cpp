#include "casorati/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "casorati/error.hpp"

namespace casorati::elliptic {
namespace {

constexpr int kMaxAgmSteps = 32;
constexpr std::size_t kMaxEvaluations = 20'000'000;

void check_modulus(double k) {
  if (!(std::isfinite(k) && k >= 0.0 && k < 1.0))
    fail(ErrorKind::InvalidArgument, "elliptic modulus must lie in [0, 1), got " + std::to_string(k));
}

// Descending AGM table: a[0] = 1, b[0] = k', c[0] = k, stopped once c[N] is
// negligible against a[N]. Returns N.
struct AgmTable {
  std::array<double, kMaxAgmSteps + 1> a{};
  std::array<double, kMaxAgmSteps + 1> c{};
  int steps = 0;
};

AgmTable agm_table(double k) {
  AgmTable t;
  t.a[0] = 1.0;
  t.c[0] = k;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  const double eps = std::numeric_limits<double>::epsilon();
  int n = 0;
  while (std::abs(t.c[n]) > eps * t.a[n] && n < kMaxAgmSteps) {
    const double an = t.a[n];
    t.a[n + 1] = 0.5 * (an + b);
    t.c[n + 1] = 0.5 * (an - b);
    b = std::sqrt(an * b);
    ++n;
  }
  t.steps = n;
  return t;
}

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  QuadratureResult out;

  double eval(double x) {
    ++out.evaluations;
    const double y = f(x);
    if (!std::isfinite(y)) fail(ErrorKind::NumericalFailure, "integrand is not finite at x = " + std::to_string(x));
    return y;
  }

  // [a, b] with fa, fm, fb at a, (a+b)/2, b and the whole-interval Simpson value.
  double step(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    // Rounded midpoints need not bisect exactly; use the true half widths.
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    // Below the rounding floor of the panel sums further splitting cannot help.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
    const bool resolved = std::abs(diff) <= std::max(15.0 * tol, floor) && depth >= 3;
    if (resolved || depth >= max_depth || out.evaluations >= kMaxEvaluations || m == a || m == b) {
      if (!resolved) out.converged = false;
      out.error_estimate += std::abs(diff) / 15.0;
      return left + right + diff / 15.0;
    }
    return step(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           step(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

EllipticTriple jacobi_elliptic(double u, double k) {
  check_modulus(k);
  if (!std::isfinite(u)) fail(ErrorKind::InvalidArgument, "elliptic argument must be finite");

  EllipticTriple r;
  r.u = u;
  r.k = k;
  if (k == 0.0) {
    r.sn = std::sin(u);
    r.cn = std::cos(u);
    r.dn = 1.0;
    return r;
  }

  const AgmTable t = agm_table(k);
  const int n = t.steps;
  const double quarter = std::numbers::pi / (2.0 * t.a[n]);
  // sn and cn have real period 4K; remainder() maps into [-2K, 2K].
  const double reduced = std::remainder(u, 4.0 * quarter);

  double phi = std::ldexp(t.a[n] * reduced, n);
  for (int j = n; j > 0; --j) phi = 0.5 * (phi + std::asin(t.c[j] / t.a[j] * std::sin(phi)));

  r.sn = std::sin(phi);
  r.cn = std::cos(phi);
  // dn >= k' > 0, so the square root is well conditioned for every k < 1.
  r.dn = std::sqrt((1.0 - k * r.sn) * (1.0 + k * r.sn));
  return r;
}

double jacobi_sd(double u, double k) {
  const EllipticTriple e = jacobi_elliptic(u, k);
  return e.sn / e.dn;
}

double complete_K(double k) {
  check_modulus(k);
  const AgmTable t = agm_table(k);
  return std::numbers::pi / (2.0 * t.a[t.steps]);
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  if (!(std::isfinite(a) && std::isfinite(b))) fail(ErrorKind::InvalidArgument, "integration limits must be finite");
  if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "quadrature tolerance must be positive");
  if (max_depth < 3) fail(ErrorKind::InvalidArgument, "quadrature depth limit must be at least 3");
  if (a == b) return {};
  if (b < a) {
    QuadratureResult r = integrate(f, b, a, tol, max_depth);
    r.value = -r.value;
    return r;
  }

  Simpson s{f, max_depth, {}};
  const double fa = s.eval(a);
  const double fm = s.eval(0.5 * (a + b));
  const double fb = s.eval(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  s.out.value = s.step(a, b, fa, fm, fb, whole, tol, 0);
  return s.out;
}

}  // namespace casorati::elliptic
