// Independent reference computations used only by the tests. Nothing here
// calls into the library's numerical routines.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Arithmetic-geometric mean by plain iteration.
inline double agm(double a, double b) {
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-17 * a; ++i) {
    const double next = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next;
  }
  return a;
}

inline double complete_K_agm(double k) { return std::numbers::pi / (2.0 * agm(1.0, std::sqrt(1.0 - k * k))); }

// K(k) = pi/2 sum_m [ (2m)! / (2^(2m) m!^2) ]^2 k^(2m)
inline double complete_K_series(double k) {
  long double term = 1.0L, sum = 1.0L;
  const long double m = static_cast<long double>(k) * k;
  for (int j = 1; j < 4000; ++j) {
    const long double ratio = (2.0L * j - 1.0L) / (2.0L * j);
    term *= ratio * ratio * m;
    sum += term;
    if (term < 1e-21L * sum) break;
  }
  return static_cast<double>(std::numbers::pi_v<long double> / 2.0L * sum);
}

// Composite Simpson with a fixed even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Incomplete integral F(phi, k) by fine fixed-step Simpson; sn(F(phi)) = sin(phi).
inline double incomplete_F(double phi, double k) {
  return simpson([k](double t) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t)); }, 0.0, phi, 20000);
}

// sd(u, k) by inverting F(phi, k) = u with Newton steps; sn is even about K.
inline double sd_by_inversion(double u, double k) {
  const double K = complete_K_agm(k);
  const double period = 4.0 * K;
  double r = std::fmod(u, period);
  if (r < 0.0) r += period;
  double sign = 1.0;
  if (r > 2.0 * K) {
    r -= 2.0 * K;
    sign = -1.0;
  }
  if (r > K) r = 2.0 * K - r;
  double phi = r;
  for (int it = 0; it < 30; ++it) {
    const double step = (incomplete_F(phi, k) - r) * std::sqrt(1.0 - k * k * std::sin(phi) * std::sin(phi));
    phi -= step;
    if (std::abs(step) < 1e-15) break;
  }
  const double sn = sign * std::sin(phi);
  return sn / std::sqrt(1.0 - k * k * sn * sn);
}

// Direct projector evaluation of C(u-perp).
inline double hyperplane_casorati(const std::vector<Mat>& h, const Vec& u) {
  const int n = static_cast<int>(u.size());
  const Mat p = Mat::Identity(n, n) - u * u.transpose() / u.squaredNorm();
  double s = 0.0;
  for (const Mat& m : h) s += (p * m * p).squaredNorm();
  return s / (n - 1);
}

// Dense Fibonacci hemisphere in R^3 followed by two zoomed local grids around
// the best node. Returns the best value found.
inline double dense_sphere_extremum(const std::vector<Mat>& h, bool minimize, int nodes = 1'000'000) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double sign = minimize ? 1.0 : -1.0;
  double best = std::numeric_limits<double>::infinity();
  Vec best_u(3);
  for (int i = 0; i < nodes; ++i) {
    const double z = (i + 0.5) / nodes;
    const double r = std::sqrt(1.0 - z * z);
    Vec u(3);
    u << r * std::cos(golden * i), r * std::sin(golden * i), z;
    const double v = sign * hyperplane_casorati(h, u);
    if (v < best) {
      best = v;
      best_u = u;
    }
  }
  // Local zoom: tangent-plane grids of shrinking radius.
  double radius = 4.0 * std::sqrt(2.0 * std::numbers::pi / nodes);
  for (int level = 0; level < 3; ++level) {
    const Eigen::Vector3d c3 = best_u;
    const Eigen::Vector3d a3 = c3.unitOrthogonal();
    const Vec a = a3;
    const Vec b = Eigen::Vector3d(c3.cross(a3));
    const Vec center = best_u;
    const int m = 200;
    for (int i = -m; i <= m; ++i)
      for (int j = -m; j <= m; ++j) {
        Vec u = center + radius * (i * a + j * b) / m;
        u.normalize();
        const double v = sign * hyperplane_casorati(h, u);
        if (v < best) {
          best = v;
          best_u = u;
        }
      }
    radius *= 0.02;
  }
  return sign * best;
}

// Both extrema of C(u-perp) for one 3x3 shape operator: a dense Fibonacci
// hemisphere pass with fixed-size projectors, then zoomed tangent-plane grids
// around each best node.
inline std::pair<double, double> dense_sphere_extrema3(const Eigen::Matrix3d& h, int nodes = 1'000'000) {
  using V3 = Eigen::Vector3d;
  auto value = [&h](const V3& u) {
    const Eigen::Matrix3d p = Eigen::Matrix3d::Identity() - u * u.transpose();
    return (p * h * p).squaredNorm() / 2.0;
  };
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  V3 lo_u = V3::UnitZ(), hi_u = V3::UnitZ();
  for (int i = 0; i < nodes; ++i) {
    const double z = (i + 0.5) / nodes;
    const double r = std::sqrt(1.0 - z * z);
    const V3 u(r * std::cos(golden * i), r * std::sin(golden * i), z);
    const double v = value(u);
    if (v < lo) {
      lo = v;
      lo_u = u;
    }
    if (v > hi) {
      hi = v;
      hi_u = u;
    }
  }
  auto zoom = [&](V3 best_u, double best, double sign) {
    double radius = 4.0 * std::sqrt(2.0 * std::numbers::pi / nodes);
    for (int level = 0; level < 3; ++level) {
      const V3 center = best_u;
      const V3 a = center.unitOrthogonal();
      const V3 b = center.cross(a);
      const int m = 100;
      for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j) {
          const V3 u = (center + radius * (i * a + j * b) / m).normalized();
          const double v = sign * value(u);
          if (v < best) {
            best = v;
            best_u = u;
          }
        }
      radius *= 0.04;
    }
    return sign * best;
  };
  return {zoom(lo_u, lo, 1.0), zoom(hi_u, -hi, -1.0)};
}

// Hessian of a homogeneous quadratic f(x) = x^T H x / 2 by polarization.
inline Mat polarized_hessian(const std::function<double(const Vec&)>& f, int n) {
  Mat h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = 2.0 * f(Vec::Unit(n, i));
    for (int j = 0; j < i; ++j) {
      h(i, j) = h(j, i) = f(Vec::Unit(n, i) + Vec::Unit(n, j)) - f(Vec::Unit(n, i)) - f(Vec::Unit(n, j));
    }
  }
  return h;
}

// Projected gradient descent for min f on {sum x = k}, f a homogeneous quadratic.
inline Vec projected_descent(const std::function<double(const Vec&)>& f, int n, double k, int iterations = 100000) {
  const Mat hess = polarized_hessian(f, n);
  Vec x = Vec::Constant(n, k / n);
  const double lmax = hess.cwiseAbs().rowwise().sum().maxCoeff();  // Gershgorin bound
  const double step = 1.0 / lmax;
  for (int it = 0; it < iterations; ++it) {
    Vec g = hess * x;
    g.array() -= g.mean();
    if (g.norm() < 1e-14 * (1.0 + std::abs(k))) break;
    x -= step * g;
  }
  return x;
}

inline Mat random_symmetric(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = U(rng);
  return 0.5 * (m + m.transpose());
}

inline Vec random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  Vec u(n);
  for (int i = 0; i < n; ++i) u[i] = N(rng);
  return u.normalized();
}

// Principal curvatures of a rotational hypersurface with unit-speed profile
// (r(t), z(t)): meridian r'z'' - r''z', rotational z'/r (multiplicity n-1).
struct RotationalCurvatures {
  double meridian;
  double rotational;
};

inline RotationalCurvatures unit_speed_profile_curvatures(double r, double dr, double ddr, double dz, double ddz) {
  return {dr * ddz - ddr * dz, dz / r};
}

}  // namespace oracle
