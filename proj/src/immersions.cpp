#include "casorati/immersions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "casorati/elliptic.hpp"
#include "casorati/error.hpp"

namespace casorati {

namespace detail {

struct Surface {
  int n = 0;
  int p = 0;
  Box domain;
  std::vector<std::string> coords;

  virtual ~Surface() = default;
  virtual Vec position(const Vec& x) const = 0;
  virtual Jet2 jet(const Vec& x) const = 0;
  virtual Mat d1(const Vec& x) const { return jet(x).d1; }
  virtual double singularity_margin(const Vec&) const { return std::numeric_limits<double>::infinity(); }
};

}  // namespace detail

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kIdealModulus = 1.0 / std::numbers::sqrt2;

// Value and first two derivatives of a one-variable factor.
struct Univariate {
  double v = 1.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

Univariate sin_factor(double x) { return {std::sin(x), std::cos(x), -std::sin(x)}; }
Univariate cos_factor(double x) { return {std::cos(x), -std::sin(x), -std::cos(x)}; }

// Jet of a map whose c-th coordinate is prod_k factors[c][k](x_k).
Jet2 separable_jet(const std::vector<std::vector<Univariate>>& factors, int n) {
  const int m = static_cast<int>(factors.size());
  Jet2 jet;
  jet.position = Vec::Zero(m);
  jet.d1 = Mat::Zero(m, n);
  jet.d2.assign(static_cast<std::size_t>(n * n), Vec::Zero(m));
  for (int c = 0; c < m; ++c) {
    const auto& f = factors[static_cast<std::size_t>(c)];
    // Products skip the differentiated slots so zeros never get divided out.
    auto product_except = [&](int i, int j) {
      double prod = 1.0;
      for (int k = 0; k < n; ++k)
        if (k != i && k != j) prod *= f[static_cast<std::size_t>(k)].v;
      return prod;
    };
    jet.position[c] = product_except(-1, -1);
    for (int i = 0; i < n; ++i) {
      const auto& fi = f[static_cast<std::size_t>(i)];
      jet.d1(c, i) = fi.d1 * product_except(i, -1);
      jet.d2[static_cast<std::size_t>(i * n + i)][c] = fi.d2 * product_except(i, -1);
      for (int j = i + 1; j < n; ++j) {
        const double mixed = fi.d1 * f[static_cast<std::size_t>(j)].d1 * product_except(i, j);
        jet.d2[static_cast<std::size_t>(i * n + j)][c] = mixed;
        jet.d2[static_cast<std::size_t>(j * n + i)][c] = mixed;
      }
    }
  }
  return jet;
}

Box make_box(std::vector<double> lo, std::vector<double> hi) {
  Box b;
  b.lower = Eigen::Map<Vec>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  b.upper = Eigen::Map<Vec>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  return b;
}

// Round n-sphere of radius R in E^(n+1), hyperspherical coordinates
// (theta_1..theta_{n-1}, phi).
struct Hypersphere final : detail::Surface {
  double radius;

  Hypersphere(double r, int dim, double eps) : radius(r) {
    n = dim;
    p = 1;
    std::vector<double> lo(static_cast<std::size_t>(n), eps), hi(static_cast<std::size_t>(n), std::numbers::pi - eps);
    hi.back() = kTwoPi - eps;
    domain = make_box(lo, hi);
    for (int k = 1; k < n; ++k) coords.push_back("theta" + std::to_string(k));
    coords.push_back("phi");
  }

  std::vector<std::vector<Univariate>> factors(const Vec& x) const {
    std::vector<std::vector<Univariate>> f(static_cast<std::size_t>(n + 1),
                                           std::vector<Univariate>(static_cast<std::size_t>(n)));
    for (int c = 0; c <= n; ++c) {
      auto& row = f[static_cast<std::size_t>(c)];
      for (int k = 0; k < n; ++k) {
        if (c == n)
          row[static_cast<std::size_t>(k)] = sin_factor(x[k]);
        else if (k < c)
          row[static_cast<std::size_t>(k)] = sin_factor(x[k]);
        else if (k == c)
          row[static_cast<std::size_t>(k)] = cos_factor(x[k]);
      }
      auto& first = row[0];
      first.v *= radius;
      first.d1 *= radius;
      first.d2 *= radius;
    }
    return f;
  }

  Vec position(const Vec& x) const override { return separable_jet(factors(x), n).position; }
  Jet2 jet(const Vec& x) const override { return separable_jet(factors(x), n); }
  double singularity_margin(const Vec& x) const override {
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < n; ++k) m = std::min(m, std::abs(std::sin(x[k])));
    return m;
  }
};

// S^1(r1) x S^1(r2) in E^4.
struct FlatTorus final : detail::Surface {
  double r1, r2;

  FlatTorus(double a, double b) : r1(a), r2(b) {
    n = 2;
    p = 2;
    domain = make_box({0.0, 0.0}, {kTwoPi, kTwoPi});
    coords = {"alpha", "beta"};
  }

  Jet2 jet(const Vec& x) const override {
    auto scaled = [](Univariate f, double r) { return Univariate{r * f.v, r * f.d1, r * f.d2}; };
    const Univariate one{};
    return separable_jet({{scaled(cos_factor(x[0]), r1), one},
                          {scaled(sin_factor(x[0]), r1), one},
                          {one, scaled(cos_factor(x[1]), r2)},
                          {one, scaled(sin_factor(x[1]), r2)}},
                         2);
  }
  Vec position(const Vec& x) const override { return jet(x).position; }
};

// Graph x -> (x, c |x|^2) over (-1, 1)^n.
struct Paraboloid final : detail::Surface {
  double c;

  Paraboloid(double curv, int dim) : c(curv) {
    n = dim;
    p = 1;
    domain = make_box(std::vector<double>(static_cast<std::size_t>(n), -1.0),
                      std::vector<double>(static_cast<std::size_t>(n), 1.0));
    for (int k = 1; k <= n; ++k) coords.push_back("x" + std::to_string(k));
  }

  Vec position(const Vec& x) const override {
    Vec pos(n + 1);
    pos.head(n) = x;
    pos[n] = c * x.squaredNorm();
    return pos;
  }
  Jet2 jet(const Vec& x) const override {
    Jet2 jet;
    jet.position = position(x);
    jet.d1 = Mat::Zero(n + 1, n);
    jet.d1.topRows(n).setIdentity();
    jet.d1.row(n) = 2.0 * c * x.transpose();
    jet.d2.assign(static_cast<std::size_t>(n * n), Vec::Zero(n + 1));
    for (int i = 0; i < n; ++i) jet.d2[static_cast<std::size_t>(i * n + i)][n] = 2.0 * c;
    return jet;
  }
};

// Rotational hypersurface of E^4 with profile r(t) = sd(at, 1/sqrt2)/a,
// z(t) = 1/2 int_0^t sd^2(as, 1/sqrt2) ds, rotated by the 2-sphere in (u, v).
struct ChenIdeal final : detail::Surface {
  double a;
  double quarter_period;  // K(1/sqrt2)

  ChenIdeal(double scale, double eps) : a(scale), quarter_period(elliptic::complete_K(kIdealModulus)) {
    n = 3;
    p = 1;
    const double half_pi = 0.5 * std::numbers::pi;
    domain = make_box({eps, -half_pi + eps, 0.0}, {2.0 * quarter_period / a - eps, half_pi - eps, kTwoPi});
    coords = {"t", "u", "v"};
  }

  double height(double t) const {
    const auto r = elliptic::integrate(
        [this](double s) {
          const double sd = elliptic::jacobi_sd(a * s, kIdealModulus);
          return sd * sd;
        },
        0.0, t, 1e-13);
    if (!r.converged) fail(ErrorKind::NumericalFailure, "chen_ideal height quadrature did not converge at t = " + std::to_string(t));
    return 0.5 * r.value;
  }

  // Profile factors; the height factor value is only evaluated on request.
  void profile(double t, bool with_height, Univariate& radial, Univariate& vertical) const {
    const auto e = elliptic::jacobi_elliptic(a * t, kIdealModulus);
    const double k2 = kIdealModulus * kIdealModulus;
    const double sd = e.sn / e.dn;
    const double dn2 = e.dn * e.dn;
    radial.v = sd / a;
    radial.d1 = e.cn / dn2;
    radial.d2 = a * (-e.sn / e.dn + 2.0 * k2 * e.sn * e.cn * e.cn / (dn2 * e.dn));
    vertical.v = with_height ? height(t) : 0.0;
    vertical.d1 = 0.5 * sd * sd;
    vertical.d2 = a * sd * e.cn / dn2;
  }

  Jet2 jet_impl(const Vec& x, bool with_height) const {
    Univariate r, z;
    profile(x[0], with_height, r, z);
    const Univariate one{};
    return separable_jet({{r, sin_factor(x[1]), one},
                          {r, cos_factor(x[1]), sin_factor(x[2])},
                          {r, cos_factor(x[1]), cos_factor(x[2])},
                          {z, one, one}},
                         3);
  }

  Jet2 jet(const Vec& x) const override { return jet_impl(x, true); }
  Mat d1(const Vec& x) const override { return jet_impl(x, false).d1; }
  Vec position(const Vec& x) const override {
    const double r = elliptic::jacobi_sd(a * x[0], kIdealModulus) / a;
    Vec pos(4);
    pos << r * std::sin(x[1]), r * std::cos(x[1]) * std::sin(x[2]), r * std::cos(x[1]) * std::cos(x[2]), height(x[0]);
    return pos;
  }
  double singularity_margin(const Vec& x) const override {
    return std::min(std::abs(std::cos(x[1])), std::abs(elliptic::jacobi_sd(a * x[0], kIdealModulus)));
  }
};

double param_or(const ParamMap& params, const ParamMap& defaults, const std::string& key) {
  if (auto it = params.find(key); it != params.end()) return it->second;
  return defaults.at(key);
}

int integer_param(double v, const std::string& key) {
  if (!(std::isfinite(v) && v == std::floor(v) && v >= 2.0 && v <= 64.0))
    fail(ErrorKind::InvalidArgument, "parameter " + key + " must be an integer in [2, 64]");
  return static_cast<int>(v);
}

void require_positive(double v, const std::string& key) {
  if (!(std::isfinite(v) && v > 0.0)) fail(ErrorKind::InvalidArgument, "parameter " + key + " must be positive");
}

}  // namespace

bool Box::contains(const Vec& x) const {
  if (x.size() != lower.size()) return false;
  return ((x.array() > lower.array()) && (x.array() < upper.array())).all();
}

double Box::boundary_distance(const Vec& x) const {
  if (x.size() != lower.size()) return -std::numeric_limits<double>::infinity();
  return std::min((x - lower).minCoeff(), (upper - x).minCoeff());
}

Chart::Chart(std::string name, ParamMap params, JetMode mode, std::shared_ptr<const detail::Surface> surface)
    : name_(std::move(name)), params_(std::move(params)), mode_(mode), surface_(std::move(surface)) {}

int Chart::dim() const { return surface_->n; }
int Chart::codim() const { return surface_->p; }
const Box& Chart::domain() const { return surface_->domain; }
const std::vector<std::string>& Chart::coordinate_names() const { return surface_->coords; }

Chart Chart::with_jet_mode(JetMode mode) const { return Chart(name_, params_, mode, surface_); }

Vec Chart::position(const Vec& x) const {
  require(x.size() == dim(), "parameter point has wrong dimension");
  return surface_->position(x);
}

Jet2 Chart::analytic_jet(const Vec& x) const {
  require(x.size() == dim(), "parameter point has wrong dimension");
  return surface_->jet(x);
}

double first_derivative_step(double xi) {
  static const double base = std::pow(std::numeric_limits<double>::epsilon(), 0.2);
  return base * std::max(1.0, std::abs(xi));
}

double second_derivative_step(double xi) {
  static const double base = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0);
  return base * std::max(1.0, std::abs(xi));
}

namespace {

// Step adjusted so that x + h is exactly representable.
double exact_step(double x, double h) {
  volatile double shifted = x + h;
  return shifted - x;
}

Vec shifted(const Vec& x, int i, double hi, int j = -1, double hj = 0.0) {
  Vec y = x;
  y[i] += hi;
  if (j >= 0) y[j] += hj;
  return y;
}

}  // namespace

Mat Chart::first_partials(const Vec& x) const {
  require(x.size() == dim(), "parameter point has wrong dimension");
  if (mode_ == JetMode::Analytic) return surface_->d1(x);
  const int n = dim();
  Mat d1(ambient_dim(), n);
  for (int i = 0; i < n; ++i) {
    const double h = exact_step(x[i], first_derivative_step(x[i]));
    const double h2 = 0.5 * h;
    const Vec coarse = (surface_->position(shifted(x, i, h)) - surface_->position(shifted(x, i, -h))) / (2.0 * h);
    const Vec fine = (surface_->position(shifted(x, i, h2)) - surface_->position(shifted(x, i, -h2))) / (2.0 * h2);
    d1.col(i) = (4.0 * fine - coarse) / 3.0;
  }
  return d1;
}

Jet2 Chart::numeric_jet(const Vec& x) const {
  require(x.size() == dim(), "parameter point has wrong dimension");
  const int n = dim();
  auto f = [this](const Vec& y) { return surface_->position(y); };

  Jet2 jet;
  jet.position = f(x);
  jet.d1 = mode_ == JetMode::Numeric ? first_partials(x) : with_jet_mode(JetMode::Numeric).first_partials(x);
  jet.d2.assign(static_cast<std::size_t>(n * n), Vec());

  std::vector<double> steps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) steps[static_cast<std::size_t>(i)] = exact_step(x[i], second_derivative_step(x[i]));

  for (int i = 0; i < n; ++i) {
    const double h = steps[static_cast<std::size_t>(i)];
    auto diag = [&](double s) { return Vec((f(shifted(x, i, s)) - 2.0 * jet.position + f(shifted(x, i, -s))) / (s * s)); };
    jet.d2[static_cast<std::size_t>(i * n + i)] = (4.0 * diag(0.5 * h) - diag(h)) / 3.0;
    for (int j = i + 1; j < n; ++j) {
      const double hj = steps[static_cast<std::size_t>(j)];
      auto mixed = [&](double s) {
        const double a = s * h, b = s * hj;
        return Vec((f(shifted(x, i, a, j, b)) - f(shifted(x, i, a, j, -b)) - f(shifted(x, i, -a, j, b)) +
                    f(shifted(x, i, -a, j, -b))) /
                   (4.0 * a * b));
      };
      const Vec d = (4.0 * mixed(0.5) - mixed(1.0)) / 3.0;
      jet.d2[static_cast<std::size_t>(i * n + j)] = d;
      jet.d2[static_cast<std::size_t>(j * n + i)] = d;
    }
  }
  return jet;
}

double Chart::singularity_margin(const Vec& x) const {
  require(x.size() == dim(), "parameter point has wrong dimension");
  return surface_->singularity_margin(x);
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"hypersphere", "round n-sphere of radius R in E^(n+1), hyperspherical coordinates", {{"R", 1.0}, {"n", 3.0}, {"eps", 0.0}}},
      {"chen_ideal", "Casorati ideal rotational hypersurface of E^4 built from sd(at, 1/sqrt2)", {{"a", 1.0}, {"eps", 1e-3}}},
      {"flat_torus", "product of circles S^1(r1) x S^1(r2) in E^4", {{"r1", 1.0}, {"r2", 1.0}}},
      {"paraboloid", "graph of c|x|^2 over (-1, 1)^n in E^(n+1)", {{"c", 1.0}, {"n", 3.0}}},
  };
  return entries;
}

Chart make_chart(std::string_view name, const ParamMap& params, JetMode mode) {
  const CatalogEntry* entry = nullptr;
  for (const auto& e : catalog())
    if (e.name == name) entry = &e;
  if (entry == nullptr) fail(ErrorKind::InvalidArgument, "unknown chart '" + std::string(name) + "'");
  for (const auto& [key, value] : params) {
    if (!entry->defaults.contains(key))
      fail(ErrorKind::InvalidArgument, "chart " + entry->name + " has no parameter '" + key + "'");
    if (!std::isfinite(value)) fail(ErrorKind::InvalidArgument, "parameter " + key + " must be finite");
  }
  ParamMap resolved = entry->defaults;
  for (const auto& [key, value] : params) resolved[key] = value;
  auto get = [&](const std::string& key) { return param_or(params, entry->defaults, key); };

  std::shared_ptr<const detail::Surface> surface;
  if (name == "hypersphere") {
    const double r = get("R");
    require_positive(r, "R");
    const double eps = get("eps");
    require(eps >= 0.0 && eps < 0.5, "parameter eps must lie in [0, 0.5)");
    surface = std::make_shared<Hypersphere>(r, integer_param(get("n"), "n"), eps);
  } else if (name == "chen_ideal") {
    const double a = get("a");
    require_positive(a, "a");
    const double eps = get("eps");
    require(eps > 0.0 && eps < 0.5, "parameter eps must lie in (0, 0.5)");
    require(eps < elliptic::complete_K(kIdealModulus) / a, "parameter eps leaves an empty t-domain");
    surface = std::make_shared<ChenIdeal>(a, eps);
  } else if (name == "flat_torus") {
    require_positive(get("r1"), "r1");
    require_positive(get("r2"), "r2");
    surface = std::make_shared<FlatTorus>(get("r1"), get("r2"));
  } else {
    const double c = get("c");
    require(std::isfinite(c), "parameter c must be finite");
    surface = std::make_shared<Paraboloid>(c, integer_param(get("n"), "n"));
  }
  return Chart(entry->name, std::move(resolved), mode, std::move(surface));
}

DomainVerdict domain_check(const Chart& chart, const Vec& x) {
  DomainVerdict v;
  if (x.size() != chart.dim()) {
    v.boundary_distance = -std::numeric_limits<double>::infinity();
    v.reason = "point has dimension " + std::to_string(x.size()) + ", chart expects " + std::to_string(chart.dim());
    return v;
  }
  if (!x.allFinite()) {
    v.boundary_distance = -std::numeric_limits<double>::infinity();
    v.reason = "point is not finite";
    return v;
  }
  v.boundary_distance = chart.domain().boundary_distance(x);
  v.inside = chart.domain().contains(x);
  const double margin = chart.singularity_margin(x);
  if (!v.inside) {
    std::ostringstream os;
    os << "outside domain";
    if (margin < 1e-12) os << " (coordinate singularity)";
    v.reason = os.str();
  } else if (margin < 1e-12) {
    v.reason = "coordinate singularity";
  }
  v.admissible = v.reason.empty();
  return v;
}

Jet2 jet2(const Chart& chart, const Vec& x) {
  const DomainVerdict v = domain_check(chart, x);
  if (!v.admissible) fail(ErrorKind::IllConditioned, "inadmissible point for " + chart.name() + ": " + v.reason);
  return chart.jet_mode() == JetMode::Analytic ? chart.analytic_jet(x) : chart.numeric_jet(x);
}

}  // namespace casorati
