#include "casorati/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "casorati/error.hpp"

namespace casorati {

std::string to_string(IdealKind kind) {
  switch (kind) {
    case IdealKind::TotallyGeodesic: return "TotallyGeodesic";
    case IdealKind::Umbilical: return "Umbilical";
    case IdealKind::Ideal11: return "Ideal11";
    case IdealKind::Ideal41: return "Ideal41";
    case IdealKind::Generic: return "Generic";
  }
  return "Generic";
}

namespace {

void require_hyperplane_dim(const SecondForm& h) {
  if (h.n() < 3)
    fail(ErrorKind::InvalidArgument, "hyperplane Casorati curvatures need n >= 3, got n = " + std::to_string(h.n()));
}

void require_unit(const Vec& u, int n) {
  require(u.size() == n, "hyperplane normal has wrong dimension");
  if (!(std::abs(u.norm() - 1.0) <= 1e-10)) fail(ErrorKind::InvalidArgument, "hyperplane normal must be a unit vector");
}

// ---------------------------------------------------------------------------
// Hyperplane Casorati curvature as a quartic on the sphere:
//   (n-1) C(u-perp) = |h|^2 + F(u),  F(u) = -2 u^T S u + sum_r (u^T A_r u)^2,
// with S = sum_r A_r^2.

struct SphereQuartic {
  int n = 0;
  std::vector<Mat> a;
  Mat s;
  double trace = 0.0;

  explicit SphereQuartic(const SecondForm& h) : n(h.n()), a(h.matrices()), s(Mat::Zero(h.n(), h.n())) {
    for (const Mat& m : a) s += m * m;
    trace = s.trace();
  }

  double value(const Vec& u) const {
    double f = -2.0 * u.dot(s * u);
    for (const Mat& m : a) {
      const double q = u.dot(m * u);
      f += q * q;
    }
    return f;
  }

  double to_casorati(double f) const { return (trace + f) / (n - 1); }

  void derivatives(const Vec& u, Vec& grad, Mat& hess) const {
    grad = -4.0 * (s * u);
    hess = -4.0 * s;
    for (const Mat& m : a) {
      const Vec au = m * u;
      const double q = u.dot(au);
      grad += 4.0 * q * au;
      hess += 4.0 * q * m + 8.0 * au * au.transpose();
    }
  }
};

// Quasi-uniform nodes on the half-sphere (u and -u describe the same hyperplane),
// stored with the packed monomials u_i u_j (i <= j) for fast quadratic forms.
struct SphereGrid {
  int n = 0;
  Mat nodes;      // count x n
  Mat monomials;  // count x n(n+1)/2
};

Mat fibonacci_hemisphere(int count) {
  Mat nodes(count, 3);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    nodes.row(i) << r * std::cos(phi), r * std::sin(phi), z;
  }
  return nodes;
}

// Additive recurrence with generalized golden-ratio increments (root of
// x^(n+1) = x + 1), rejection to the unit ball shell, projection to the sphere.
Mat kronecker_hemisphere(int n, int count) {
  double phi = 2.0;
  for (int it = 0; it < 100; ++it) phi = std::pow(1.0 + phi, 1.0 / (n + 1));
  Vec alpha(n);
  for (int j = 0; j < n; ++j) alpha[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);

  Mat nodes(count, n);
  int filled = 0;
  for (long long i = 1; filled < count; ++i) {
    Vec y(n);
    for (int j = 0; j < n; ++j) y[j] = 2.0 * std::fmod(0.5 + static_cast<double>(i) * alpha[j], 1.0) - 1.0;
    const double norm = y.norm();
    if (norm > 1.0 || norm < 0.1) continue;
    y /= norm;
    if (y[n - 1] < 0.0) y = -y;
    nodes.row(filled++) = y.transpose();
  }
  return nodes;
}

std::shared_ptr<const SphereGrid> sphere_grid(int n, int count) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const SphereGrid>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, count}];
  if (!slot) {
    auto g = std::make_shared<SphereGrid>();
    g->n = n;
    g->nodes = n == 3 ? fibonacci_hemisphere(count) : kronecker_hemisphere(n, count);
    g->monomials.resize(count, n * (n + 1) / 2);
    for (int r = 0; r < count; ++r) {
      int c = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) g->monomials(r, c++) = g->nodes(r, i) * g->nodes(r, j);
    }
    slot = std::move(g);
  }
  return slot;
}

// Coefficients so that monomials * packed(M) = u^T M u.
Vec packed(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  Vec v(n * (n + 1) / 2);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v[c++] = i == j ? m(i, i) : 2.0 * m(i, j);
  return v;
}

int default_grid_nodes(int n) { return n == 3 ? 4096 : std::min(16384, 4096 * (n - 2)); }

Mat tangent_basis(const Vec& u) {
  Eigen::HouseholderQR<Mat> qr(u);
  const Mat q = qr.householderQ();
  return q.rightCols(u.size() - 1);
}

// Saddle-free Newton iterations on the sphere for sign * F (sign = +1 minimizes).
Vec refine_on_sphere(const SphereQuartic& quartic, Vec u, double sign, int max_steps, int& iterations) {
  const double scale = std::max(quartic.trace, std::numeric_limits<double>::min());
  u.normalize();
  double f = sign * quartic.value(u);
  Vec grad;
  Mat hess;
  for (int step = 0; step < max_steps; ++step) {
    ++iterations;
    quartic.derivatives(u, grad, hess);
    const Mat basis = tangent_basis(u);
    const Vec g = sign * (basis.transpose() * grad);
    if (g.norm() <= 1e-15 * scale) break;
    const Mat riem = sign * (basis.transpose() * (hess - u.dot(grad) * Mat::Identity(u.size(), u.size())) * basis);
    Eigen::SelfAdjointEigenSolver<Mat> eig(riem);
    const Vec& mu = eig.eigenvalues();
    const double floor = 1e-10 * std::max(mu.cwiseAbs().maxCoeff(), scale);
    Vec coeff = eig.eigenvectors().transpose() * g;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] /= std::max(std::abs(mu[i]), floor);
    Vec s = -(eig.eigenvectors() * coeff);
    if (s.norm() > 0.3) s *= 0.3 / s.norm();

    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      Vec trial = u + basis * s;
      trial.normalize();
      const double ft = sign * quartic.value(trial);
      if (ft <= f) {
        accepted = ft < f || (trial - u).norm() > 0.0;
        u = trial;
        f = ft;
        break;
      }
      s *= 0.5;
    }
    // Newton converges quadratically, so a tiny step leaves a negligible value error.
    if (!accepted || s.norm() < 1e-9) break;
  }
  return u;
}

constexpr int kProbeSteps = 4;
constexpr int kLeaders = 4;

}  // namespace

double casorati_total(const SecondForm& h) { return h.frobenius_squared() / h.n(); }

double casorati_hyperplane(const SecondForm& h, const Vec& u) {
  require_hyperplane_dim(h);
  require_unit(u, h.n());
  const Mat proj = Mat::Identity(h.n(), h.n()) - u * u.transpose();
  double sum = 0.0;
  for (const Mat& m : h.matrices()) sum += (proj * m * proj).squaredNorm();
  return sum / (h.n() - 1);
}

std::pair<HyperplaneExtremum, HyperplaneExtremum> hyperplane_extrema(const SecondForm& h, const ExtremizerOptions& opts) {
  require_hyperplane_dim(h);
  require(opts.grid_nodes >= 0 && opts.refine_steps >= 0 && opts.grid_candidates >= 1, "invalid extremizer options");
  const int n = h.n();
  const SphereQuartic quartic(h);
  const int count = opts.grid_nodes > 0 ? opts.grid_nodes : default_grid_nodes(n);
  const auto grid = sphere_grid(n, count);

  Mat coeffs(grid->monomials.cols(), h.p() + 1);
  coeffs.col(0) = packed(quartic.s);
  for (int r = 0; r < h.p(); ++r) coeffs.col(r + 1) = packed(h[r]);
  const Mat forms = grid->monomials * coeffs;
  Vec values = -2.0 * forms.col(0);
  for (int r = 0; r < h.p(); ++r) values += forms.col(r + 1).cwiseAbs2();

  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  const int keep = std::min(count, opts.grid_candidates);
  auto by_value = [&](int x, int y) { return values[x] < values[y] || (values[x] == values[y] && x < y); };

  // Eigenvectors of S and of every A_r are critical points in many structured
  // cases (and the exact optimum for diagonal single-normal input).
  std::vector<Vec> seeds;
  auto add_eigenvectors = [&](const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(m);
    for (int i = 0; i < n; ++i) seeds.push_back(eig.eigenvectors().col(i));
  };
  add_eigenvectors(quartic.s);
  for (const Mat& m : h.matrices()) add_eigenvectors(m);

  auto search = [&](ExtremumMode mode) {
    const double sign = mode == ExtremumMode::Inf ? 1.0 : -1.0;
    std::vector<int> ranked = order;
    if (mode == ExtremumMode::Inf)
      std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(), by_value);
    else
      std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(), [&](int x, int y) { return by_value(y, x); });

    HyperplaneExtremum best;
    best.mode = mode;
    best.certificate.grid_nodes = count;
    best.certificate.grid_value = quartic.to_casorati(values[ranked[0]]);

    std::vector<Vec> starts;
    for (int i = 0; i < keep; ++i) starts.emplace_back(grid->nodes.row(ranked[static_cast<std::size_t>(i)]).transpose());
    starts.insert(starts.end(), seeds.begin(), seeds.end());
    best.certificate.starts = static_cast<int>(starts.size());

    // A few steps from every start, then the full budget for the leaders.
    const int probe = std::min(opts.refine_steps, kProbeSteps);
    std::vector<std::pair<double, Vec>> probed;
    for (const Vec& start : starts) {
      Vec u = refine_on_sphere(quartic, start, sign, probe, best.certificate.refine_iterations);
      probed.emplace_back(sign * quartic.value(u), std::move(u));
    }
    std::stable_sort(probed.begin(), probed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    const std::size_t leaders = std::min(probed.size(), static_cast<std::size_t>(kLeaders));
    double best_f = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < leaders; ++i) {
      Vec u = refine_on_sphere(quartic, probed[i].second, sign, opts.refine_steps - probe,
                               best.certificate.refine_iterations);
      const double f = sign * quartic.value(u);
      if (f < best_f) {
        best_f = f;
        best.u = u;
      }
    }
    // Canonical representative of +-u: first nonzero component positive.
    for (Eigen::Index i = 0; i < best.u.size(); ++i) {
      if (std::abs(best.u[i]) > 1e-12) {
        if (best.u[i] < 0.0) best.u = -best.u;
        break;
      }
    }
    best.value = casorati_hyperplane(h, best.u);
    return best;
  };

  return {search(ExtremumMode::Inf), search(ExtremumMode::Sup)};
}

HyperplaneExtremum extremize_hyperplane(const SecondForm& h, ExtremumMode mode, const ExtremizerOptions& opts) {
  auto both = hyperplane_extrema(h, opts);
  return mode == ExtremumMode::Inf ? both.first : both.second;
}

double mean_curvature_norm(const SecondForm& h) {
  double s = 0.0;
  for (const Mat& m : h.matrices()) {
    const double mean = m.trace() / h.n();
    s += mean * mean;
  }
  return std::sqrt(s);
}

double tau_from_h(const SecondForm& h, double c_tilde) {
  require(std::isfinite(c_tilde), "ambient curvature must be finite");
  const int n = h.n();
  double trace_sq = 0.0;
  for (const Mat& m : h.matrices()) trace_sq += m.trace() * m.trace();
  // 2 tau = n^2 |H|^2 - n C + n(n-1) c
  const double via_mean = 0.5 * (trace_sq - h.frobenius_squared() + n * (n - 1) * c_tilde);

  double via_pairs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double k = c_tilde;
      for (const Mat& m : h.matrices()) k += m(i, i) * m(j, j) - m(i, j) * m(i, j);
      via_pairs += k;
    }
  const double scale = std::max(1.0, trace_sq + h.frobenius_squared() + n * n * std::abs(c_tilde));
  if (!(std::abs(via_mean - via_pairs) <= 1e-12 * scale)) {
    std::ostringstream os;
    os << "scalar curvature routes disagree: " << via_mean << " vs " << via_pairs;
    fail(ErrorKind::NumericalFailure, os.str());
  }
  return via_mean;
}

double tau_subspace(const SecondForm& h, const Mat& basis, double c_tilde) {
  const int l = static_cast<int>(basis.cols());
  require(basis.rows() == h.n(), "subspace basis vectors must live in the tangent space");
  require(l >= 2 && l <= h.n(), "subspace dimension must satisfy 2 <= l <= n");
  const double defect = (basis.transpose() * basis - Mat::Identity(l, l)).cwiseAbs().maxCoeff();
  if (!(defect <= 1e-10)) fail(ErrorKind::InvalidArgument, "subspace basis is not orthonormal");

  double tau = 0.0;
  for (int mu = 0; mu < l; ++mu)
    for (int nu = mu + 1; nu < l; ++nu) {
      double k = c_tilde;
      for (const Mat& m : h.matrices()) {
        const Vec am = m * basis.col(mu);
        const double hmm = basis.col(mu).dot(am);
        const double hnn = basis.col(nu).dot(m * basis.col(nu));
        const double hmn = basis.col(nu).dot(am);
        k += hmm * hnn - hmn * hmn;
      }
      tau += k;
    }
  return tau;
}

DeltaCurvatures delta_curvatures(const SecondForm& h, const HyperplaneExtremum& inf, const HyperplaneExtremum& sup) {
  require_hyperplane_dim(h);
  const double n = h.n();
  const double c = casorati_total(h);
  DeltaCurvatures d;
  d.delta_hat = 2.0 * c - (2.0 * n - 1.0) / (2.0 * n) * sup.value;
  d.delta_C = 0.5 * c + (n + 1.0) / (2.0 * n) * inf.value;
  d.delta_c_legacy = 0.5 * c + (n + 1.0) / (2.0 * n * (n - 1.0)) * inf.value;
  return d;
}

DeltaCurvatures delta_curvatures(const SecondForm& h, const ExtremizerOptions& opts) {
  const auto [inf, sup] = hyperplane_extrema(h, opts);
  return delta_curvatures(h, inf, sup);
}

double proof_polynomial(const SecondForm& h, const Vec& u, QPVariant variant) {
  require_hyperplane_dim(h);
  const double n = h.n();
  const double c = casorati_total(h);
  const double cl = casorati_hyperplane(h, u);
  const double two_tau = 2.0 * tau_from_h(h, 0.0);
  if (variant == QPVariant::P) return 2.0 * n * (n - 1.0) * c + (n - 1.0) * (1.0 - 2.0 * n) / 2.0 * cl - two_tau;
  return 0.5 * n * (n - 1.0) * c + 0.5 * (n - 1.0) * (n + 1.0) * cl - two_tau;
}

double qp_objective(QPVariant variant, const Vec& x) {
  const int n = static_cast<int>(x.size());
  require(n >= 3, "the trace-constrained program needs n >= 3");
  const double head = variant == QPVariant::P ? (2.0 * n - 3.0) / 2.0 : static_cast<double>(n);
  const double tail = variant == QPVariant::P ? 2.0 * (n - 1.0) : (n - 1.0) / 2.0;
  double f = head * x.head(n - 1).squaredNorm() + tail * x[n - 1] * x[n - 1];
  double cross = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) cross += x[i] * x[j];
  return f - 2.0 * cross;
}

Mat qp_hessian(QPVariant variant, int n) {
  require(n >= 3, "the trace-constrained program needs n >= 3");
  Mat hess = Mat::Constant(n, n, -2.0);
  for (int i = 0; i + 1 < n; ++i) hess(i, i) = variant == QPVariant::P ? 2.0 * n - 3.0 : 2.0 * n;
  hess(n - 1, n - 1) = variant == QPVariant::P ? 4.0 * (n - 1.0) : n - 1.0;
  return hess;
}

double restricted_min_eigenvalue(const Mat& hessian) {
  const int n = static_cast<int>(hessian.rows());
  require(n >= 2 && hessian.cols() == n, "Hessian must be square");
  const Mat basis = tangent_basis(Vec::Constant(n, 1.0 / std::sqrt(static_cast<double>(n))));
  Eigen::SelfAdjointEigenSolver<Mat> eig(basis.transpose() * hessian * basis, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

QPSolution oprea_qp(QPVariant variant, int n, double k) {
  require(n >= 3, "the trace-constrained program needs n >= 3");
  require(std::isfinite(k), "trace constraint must be finite");
  QPSolution s;
  s.variant = variant;
  s.n = n;
  s.k = k;
  s.point = Vec(n);
  if (variant == QPVariant::P) {
    s.t = k / (2.0 * n - 1.0);
    s.point.setConstant(2.0 * s.t);
    s.point[n - 1] = s.t;
  } else {
    s.t = k / (n + 1.0);
    s.point.setConstant(s.t);
    s.point[n - 1] = 2.0 * s.t;
  }
  s.value = qp_objective(variant, s.point);
  s.min_restricted_hessian_eig = restricted_min_eigenvalue(qp_hessian(variant, n));
  return s;
}

Vec ricci_values(const SecondForm& h, double c_tilde) {
  const int n = h.n();
  Vec ric = Vec::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double k = c_tilde;
      for (const Mat& m : h.matrices()) k += m(i, i) * m(j, j) - m(i, j) * m(i, j);
      ric[i] += k;
    }
  return ric;
}

Mat ricci_tensor(const SecondForm& h, double c_tilde) {
  const int n = h.n();
  Mat ric = (n - 1.0) * c_tilde * Mat::Identity(n, n);
  for (const Mat& m : h.matrices()) ric += m.trace() * m - m * m;
  return ric;
}

double einstein_residual(const SecondForm& h, double c_tilde) {
  const Vec ric = ricci_values(h, c_tilde);
  return ric.maxCoeff() - ric.minCoeff();
}

double weyl_norm(const SecondForm& h, double c_tilde) {
  const int n = h.n();
  if (n <= 3) return 0.0;
  const RiemannTensor R = gauss_riemann(h, c_tilde);
  const Mat ric = ricci_tensor(h, c_tilde);
  const double scalar = 2.0 * tau_from_h(h, c_tilde);
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  const double a = 1.0 / (n - 2.0);
  const double b = scalar / ((n - 1.0) * (n - 2.0));
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double w = R(i, j, k, l) -
                           a * (ric(i, k) * d(j, l) - ric(i, l) * d(j, k) + ric(j, l) * d(i, k) - ric(j, k) * d(i, l)) +
                           b * (d(i, k) * d(j, l) - d(i, l) * d(j, k));
          sum += w * w;
        }
  return std::sqrt(sum);
}

namespace {

// Eigenvalues ascending of a symmetric matrix, flipped so the trace is >= 0.
Vec normalized_spectrum(const Mat& a, Mat* vectors = nullptr) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(a);
  Vec ev = eig.eigenvalues();
  Mat vec = eig.eigenvectors();
  if (ev.sum() < 0.0) {
    ev = (-ev).reverse().eval();
    vec = vec.rowwise().reverse().eval();
  }
  if (vectors != nullptr) *vectors = vec;
  return ev;
}

bool all_near(const Vec& v, double target, double tol) { return ((v.array() - target).abs() <= tol).all(); }

// Distinguished direction of an operator with an (n-1)-fold eigenvalue, or an
// empty vector when the operator is umbilical or not quasi-umbilical.
struct QuasiUmbilical {
  bool ok = false;
  Vec direction;
};

QuasiUmbilical quasi_umbilical_direction(const Mat& a, double tol) {
  Mat vec;
  const Vec ev = normalized_spectrum(a, &vec);
  const int n = static_cast<int>(ev.size());
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double t = tol * scale;
  const bool low = all_near(ev.head(n - 1), ev.head(n - 1).mean(), t);
  const bool high = all_near(ev.tail(n - 1), ev.tail(n - 1).mean(), t);
  QuasiUmbilical q;
  q.ok = low || high;
  if (low && high) return q;  // umbilical: any direction works
  if (low) q.direction = vec.col(n - 1);
  if (high) q.direction = vec.col(0);
  return q;
}

}  // namespace

IdealClassification classify_ideal(const SecondForm& h, double tol) {
  require(tol > 0.0, "classification tolerance must be positive");
  const int n = h.n();
  const int p = h.p();
  IdealClassification out;

  double largest = 0.0;
  for (const Mat& m : h.matrices()) largest = std::max(largest, m.cwiseAbs().maxCoeff());
  if (largest <= tol) {
    out.kind = IdealKind::TotallyGeodesic;
    out.single_normal = true;
    out.quasi_umbilical = true;
    return out;
  }

  // Principal normal directions: eigenvectors of the Gram matrix <A_r, A_s>.
  Mat gram(p, p);
  for (int r = 0; r < p; ++r)
    for (int s = 0; s < p; ++s) gram(r, s) = (h[r].array() * h[s].array()).sum();
  Eigen::SelfAdjointEigenSolver<Mat> geig(gram);
  const Vec mu = geig.eigenvalues().reverse();
  const Mat dirs = geig.eigenvectors().rowwise().reverse();
  auto combined = [&](int col) {
    Mat a = Mat::Zero(n, n);
    for (int r = 0; r < p; ++r) a += dirs(r, col) * h[r];
    return a;
  };

  const double top = std::sqrt(std::max(mu[0], 0.0));
  const double rest = std::sqrt(std::max(0.0, mu.tail(p - 1).sum()));
  out.single_normal = rest <= tol * std::max(1.0, top);

  // Quasi-umbilical: every principal shape operator has an (n-1)-fold
  // eigenvalue and the distinguished directions agree.
  out.quasi_umbilical = true;
  Vec common;
  for (int c = 0; c < p && out.quasi_umbilical; ++c) {
    if (std::sqrt(std::max(mu[c], 0.0)) <= tol * std::max(1.0, top)) break;
    const QuasiUmbilical q = quasi_umbilical_direction(combined(c), tol);
    if (!q.ok) {
      out.quasi_umbilical = false;
    } else if (q.direction.size() > 0) {
      if (common.size() == 0)
        common = q.direction;
      else if (std::abs(std::abs(common.dot(q.direction)) - 1.0) > std::sqrt(tol))
        out.quasi_umbilical = false;
    }
  }

  if (!out.single_normal) return out;

  const Vec ev = normalized_spectrum(combined(0));
  const double mean = ev.mean();
  if (all_near(ev, mean, tol * std::max(1.0, std::abs(mean)))) {
    out.kind = IdealKind::Umbilical;
    out.lambda = mean;
    return out;
  }
  // {lambda x (n-1), 2 lambda}
  const double low = ev.head(n - 1).mean();
  const double tl = tol * std::max(1.0, std::abs(low));
  if (all_near(ev.head(n - 1), low, tl) && std::abs(ev[n - 1] - 2.0 * low) <= tl) {
    out.kind = IdealKind::Ideal41;
    out.lambda = low;
    return out;
  }
  // {2 lambda x (n-1), lambda}
  const double lam = 0.5 * ev.tail(n - 1).mean();
  const double th = tol * std::max(1.0, std::abs(lam));
  if (all_near(ev.tail(n - 1), 2.0 * lam, th) && std::abs(ev[0] - lam) <= th) {
    out.kind = IdealKind::Ideal11;
    out.lambda = lam;
  }
  return out;
}

InvariantReport inequality_report(const SecondForm& h, double c_tilde, double classification_tol,
                                  const ExtremizerOptions& opts) {
  require_hyperplane_dim(h);
  require(std::isfinite(c_tilde), "ambient curvature must be finite");
  InvariantReport r;
  r.n = h.n();
  r.p = h.p();
  r.c_tilde = c_tilde;
  r.C = casorati_total(h);
  std::tie(r.infCL, r.supCL) = hyperplane_extrema(h, opts);
  r.meanH = mean_curvature_norm(h);
  r.tau = tau_from_h(h, c_tilde);
  r.rho = 2.0 * r.tau / (r.n * (r.n - 1.0));
  const DeltaCurvatures d = delta_curvatures(h, r.infCL, r.supCL);
  r.delta_hat = d.delta_hat;
  r.delta_C = d.delta_C;
  r.delta_c_legacy = d.delta_c_legacy;
  r.slack11 = r.delta_hat + c_tilde - r.rho;
  r.slack41 = r.delta_C + c_tilde - r.rho;
  r.classification = classify_ideal(h, classification_tol);
  return r;
}

}  // namespace casorati
