#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace casorati {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ParamMap = std::map<std::string, double, std::less<>>;

enum class JetMode { Analytic, Numeric };

/// Position plus first and second partial derivatives of an immersion into
/// Euclidean space at one parameter point.
struct Jet2 {
  Vec position;             // ambient point
  Mat d1;                   // ambient_dim x n, column i = d/dx_i
  std::vector<Vec> d2;      // n*n entries, d2[i*n + j] = d^2/dx_i dx_j

  int dim() const { return static_cast<int>(d1.cols()); }
  const Vec& second(int i, int j) const { return d2[static_cast<std::size_t>(i * dim() + j)]; }
};

/// Open axis-aligned parameter box.
struct Box {
  Vec lower;
  Vec upper;

  bool contains(const Vec& x) const;
  /// Smallest distance from x to a face; negative when x is outside.
  double boundary_distance(const Vec& x) const;
  Vec center() const { return 0.5 * (lower + upper); }
};

struct DomainVerdict {
  bool inside = false;
  bool admissible = false;
  double boundary_distance = 0.0;
  std::string reason;  // empty when admissible
};

namespace detail {
struct Surface;
}

/// Immutable parametrized immersion of an n-box into E^(n+p).
class Chart {
 public:
  Chart(std::string name, ParamMap params, JetMode mode, std::shared_ptr<const detail::Surface> surface);

  const std::string& name() const { return name_; }
  const ParamMap& params() const { return params_; }
  JetMode jet_mode() const { return mode_; }
  int dim() const;
  int codim() const;
  int ambient_dim() const { return dim() + codim(); }
  const Box& domain() const;
  const std::vector<std::string>& coordinate_names() const;

  /// Same immersion with a different jet provider.
  Chart with_jet_mode(JetMode mode) const;

  Vec position(const Vec& x) const;
  /// Closed-form 2-jet, independent of jet_mode().
  Jet2 analytic_jet(const Vec& x) const;
  /// Jet from Richardson-extrapolated central differences of position().
  Jet2 numeric_jet(const Vec& x) const;
  /// First partials only (ambient_dim x n) through the configured provider.
  Mat first_partials(const Vec& x) const;

  /// Distance to the nearest known coordinate singularity, in chart-specific
  /// units (|sin theta| for polar angles, |cos u| and the profile radius for
  /// rotational charts). +infinity for charts without singularities.
  double singularity_margin(const Vec& x) const;

 private:
  std::string name_;
  ParamMap params_;
  JetMode mode_;
  std::shared_ptr<const detail::Surface> surface_;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  ParamMap defaults;
};

/// hypersphere(R, n), chen_ideal(a, eps), flat_torus(r1, r2), paraboloid(c, n).
const std::vector<CatalogEntry>& catalog();

/// Builds a catalog chart. Missing parameters take their defaults; unknown
/// names, unknown keys and invalid values throw InvalidArgument.
Chart make_chart(std::string_view name, const ParamMap& params = {}, JetMode mode = JetMode::Analytic);

/// 2-jet through the chart's configured provider. Throws IllConditioned when
/// x is not strictly inside the domain.
Jet2 jet2(const Chart& chart, const Vec& x);

DomainVerdict domain_check(const Chart& chart, const Vec& x);

/// Richardson-extrapolated finite-difference steps. The first-derivative step
/// is eps^(1/5) and the second-derivative step eps^(1/6), each scaled by
/// max(1, |x_i|).
double first_derivative_step(double xi);
double second_derivative_step(double xi);

}  // namespace casorati
