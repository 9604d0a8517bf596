#include "casorati/geometry.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "casorati/error.hpp"

namespace casorati {

SecondForm::SecondForm(std::vector<Mat> h, double sym_tol) : h_(std::move(h)) {
  require(!h_.empty(), "second fundamental form needs at least one normal direction");
  n_ = static_cast<int>(h_.front().rows());
  require(n_ >= 1, "second fundamental form needs a positive dimension");
  for (const Mat& m : h_) {
    require(m.rows() == n_ && m.cols() == n_, "every shape operator must be n x n with a common n");
    require(m.allFinite(), "second fundamental form entries must be finite");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > sym_tol * scale) {
      std::ostringstream os;
      os << "shape operator is not symmetric (max |h_ij - h_ji| = " << asym << ")";
      fail(ErrorKind::InvalidArgument, os.str());
    }
  }
}

SecondForm SecondForm::zero(int n, int p) {
  require(n >= 1 && p >= 1, "dimensions must be positive");
  return SecondForm(std::vector<Mat>(static_cast<std::size_t>(p), Mat::Zero(n, n)));
}

SecondForm SecondForm::diagonal(const std::vector<double>& d) {
  Vec v = Eigen::Map<const Vec>(d.data(), static_cast<Eigen::Index>(d.size()));
  return single(v.asDiagonal().toDenseMatrix());
}

double SecondForm::frobenius_squared() const {
  double s = 0.0;
  for (const Mat& m : h_) s += m.squaredNorm();
  return s;
}

SecondForm SecondForm::scaled(double s) const {
  std::vector<Mat> out = h_;
  for (Mat& m : out) m *= s;
  return SecondForm(std::move(out));
}

double RiemannTensor::scalar_tau() const {
  double tau = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) tau += (*this)(i, j, i, j);
  return tau;
}

double RiemannTensor::symmetry_defect() const {
  double worst = 0.0;
  const auto& R = *this;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          worst = std::max(worst, std::abs(R(i, j, k, l) + R(j, i, k, l)));
          worst = std::max(worst, std::abs(R(i, j, k, l) + R(i, j, l, k)));
          worst = std::max(worst, std::abs(R(i, j, k, l) - R(k, l, i, j)));
          worst = std::max(worst, std::abs(R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l)));
        }
  return worst;
}

namespace {

FramedPoint frame_from_partials(const Mat& d1, const Vec& x, double max_condition) {
  const int m = static_cast<int>(d1.rows());
  const int n = static_cast<int>(d1.cols());
  FramedPoint fp;
  fp.x = x;
  fp.induced_metric = d1.transpose() * d1;

  Eigen::SelfAdjointEigenSolver<Mat> eig(fp.induced_metric, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  fp.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(fp.condition <= max_condition)) {
    std::ostringstream os;
    os << "ill-conditioned point: induced metric condition number " << fp.condition << " exceeds " << max_condition;
    fail(ErrorKind::IllConditioned, os.str());
  }

  // Modified Gram-Schmidt, two passes; diagonal of the triangular factor is positive.
  Mat q = d1;
  Mat r = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < j; ++i) {
        const double c = q.col(i).dot(q.col(j));
        r(i, j) += c;
        q.col(j) -= c * q.col(i);
      }
    const double norm = q.col(j).norm();
    r(j, j) = norm;
    q.col(j) /= norm;
  }
  fp.tangent = q;
  fp.coord_to_frame = r.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));

  // Complete with standard basis vectors, most independent first, lowest index on ties.
  Mat basis(m, m);
  basis.leftCols(n) = q;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (int col = n; col < m; ++col) {
    int best = -1;
    double best_norm = -1.0;
    Vec best_vec;
    for (int c = 0; c < m; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      Vec v = Vec::Unit(m, c);
      for (int pass = 0; pass < 2; ++pass) v -= basis.leftCols(col) * (basis.leftCols(col).transpose() * v);
      const double nv = v.norm();
      if (nv > best_norm + 1e-14) {
        best = c;
        best_norm = nv;
        best_vec = v;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    basis.col(col) = best_vec / best_norm;
  }
  fp.normal = basis.rightCols(m - n);
  return fp;
}

// Metric and its derivatives. First derivatives come straight from the jet,
// dg_ij/dx_k = <f_ki, f_j> + <f_i, f_kj>; second derivatives are
// Richardson-extrapolated central differences of that field.
struct MetricDerivatives {
  Mat g;
  std::vector<Mat> d1;  // d1[k] = d g / dx_k
  std::vector<Mat> d2;  // d2[k*n + l]
};

std::vector<Mat> metric_gradient(const Jet2& jet) {
  const int n = jet.dim();
  std::vector<Mat> d(static_cast<std::size_t>(n), Mat(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[static_cast<std::size_t>(k)](i, j) = jet.second(k, i).dot(jet.d1.col(j)) + jet.d1.col(i).dot(jet.second(k, j));
  return d;
}

MetricDerivatives metric_derivatives(const Chart& chart, const Vec& x) {
  const int n = chart.dim();
  const double room = chart.domain().boundary_distance(x);
  if (!(room > 1e-6)) fail(ErrorKind::IllConditioned, "point too close to the domain boundary for metric differences");

  const Jet2 base = jet2(chart, x);
  MetricDerivatives md;
  md.g = base.d1.transpose() * base.d1;
  md.d1 = metric_gradient(base);
  md.d2.assign(static_cast<std::size_t>(n * n), Mat::Zero(n, n));

  for (int l = 0; l < n; ++l) {
    const double h = std::min(first_derivative_step(x[l]), 0.9 * room);
    auto gradient_at = [&](double s) {
      Vec y = x;
      y[l] += s;
      return metric_gradient(jet2(chart, y));
    };
    const auto p1 = gradient_at(h), m1 = gradient_at(-h), p2 = gradient_at(0.5 * h), m2 = gradient_at(-0.5 * h);
    for (int k = 0; k < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const Mat coarse = (p1[kk] - m1[kk]) / (2.0 * h);
      const Mat fine = (p2[kk] - m2[kk]) / h;
      md.d2[static_cast<std::size_t>(k * n + l)] = (4.0 * fine - coarse) / 3.0;
    }
  }
  // Mixed partials commute; average the two difference directions.
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      const Mat avg = 0.5 * (md.d2[static_cast<std::size_t>(k * n + l)] + md.d2[static_cast<std::size_t>(l * n + k)]);
      md.d2[static_cast<std::size_t>(k * n + l)] = avg;
      md.d2[static_cast<std::size_t>(l * n + k)] = avg;
    }
  return md;
}

}  // namespace

FramedPoint frame_from_jet(const Jet2& jet, const Vec& x, double max_condition) {
  return frame_from_partials(jet.d1, x, max_condition);
}

FramedPoint frame_at(const Chart& chart, const Vec& x, double max_condition) {
  const DomainVerdict v = domain_check(chart, x);
  if (!v.admissible) fail(ErrorKind::IllConditioned, "inadmissible point for " + chart.name() + ": " + v.reason);
  return frame_from_partials(chart.first_partials(x), x, max_condition);
}

SecondForm second_form(const Jet2& jet, const FramedPoint& frame) {
  const int n = jet.dim();
  const int p = static_cast<int>(frame.normal.cols());
  require(frame.tangent.cols() == n, "frame does not match the jet dimension");
  std::vector<Mat> h;
  h.reserve(static_cast<std::size_t>(p));
  for (int r = 0; r < p; ++r) {
    Mat coord(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) coord(i, j) = frame.normal.col(r).dot(jet.second(i, j));
    Mat framed = frame.coord_to_frame.transpose() * coord * frame.coord_to_frame;
    h.emplace_back(0.5 * (framed + framed.transpose()));
  }
  return SecondForm(std::move(h));
}

SecondForm second_form(const Chart& chart, const Vec& x, const FramedPoint& frame) {
  require(frame.x.size() == x.size() && frame.x == x, "frame was built at a different point");
  return second_form(jet2(chart, x), frame);
}

RiemannTensor intrinsic_riemann(const Chart& chart, const Vec& x, double max_condition) {
  const FramedPoint frame = frame_at(chart, x, max_condition);
  const int n = chart.dim();
  const MetricDerivatives md = metric_derivatives(chart, x);
  const Mat ginv = md.g.inverse();
  auto dg = [&](int k, int i, int j) { return md.d1[static_cast<std::size_t>(k)](i, j); };
  auto ddg = [&](int k, int l, int i, int j) { return md.d2[static_cast<std::size_t>(k * n + l)](i, j); };

  // gamma[m][k][l] = Gamma^m_kl
  std::vector<double> gamma(static_cast<std::size_t>(n * n * n), 0.0);
  auto G = [&](int m, int k, int l) -> double& { return gamma[static_cast<std::size_t>((m * n + k) * n + l)]; };
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += ginv(m, i) * (dg(k, i, l) + dg(l, i, k) - dg(i, k, l));
        G(m, k, l) = 0.5 * s;
      }

  RiemannTensor coord(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          double v = 0.5 * (ddg(k, l, i, m) + ddg(i, m, k, l) - ddg(k, m, i, l) - ddg(i, l, k, m));
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) v += md.g(a, b) * (G(a, k, l) * G(b, i, m) - G(a, k, m) * G(b, i, l));
          coord(i, k, l, m) = v;
        }

  // Contract each slot with E, one index at a time.
  const Mat& E = frame.coord_to_frame;
  RiemannTensor cur = coord;
  for (int slot = 0; slot < 4; ++slot) {
    RiemannTensor next(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int q = 0; q < n; ++q) {
              switch (slot) {
                case 0: s += E(q, i) * cur(q, j, k, l); break;
                case 1: s += E(q, j) * cur(i, q, k, l); break;
                case 2: s += E(q, k) * cur(i, j, q, l); break;
                default: s += E(q, l) * cur(i, j, k, q); break;
              }
            }
            next(i, j, k, l) = s;
          }
    cur = std::move(next);
  }
  return cur;
}

RiemannTensor gauss_riemann(const SecondForm& h, double c_tilde) {
  const int n = h.n();
  RiemannTensor R(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = c_tilde * ((i == k && j == l ? 1.0 : 0.0) - (i == l && j == k ? 1.0 : 0.0));
          for (int r = 0; r < h.p(); ++r) v += h[r](i, k) * h[r](j, l) - h[r](i, l) * h[r](j, k);
          R(i, j, k, l) = v;
        }
  return R;
}

double gauss_residual(const SecondForm& h, const RiemannTensor& riemann, double c_tilde) {
  if (h.n() != riemann.n()) fail(ErrorKind::InvalidArgument, "dimension mismatch between second form and curvature tensor");
  const RiemannTensor predicted = gauss_riemann(h, c_tilde);
  const int n = h.n();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) worst = std::max(worst, std::abs(riemann(i, j, k, l) - predicted(i, j, k, l)));
  return worst;
}

}  // namespace casorati
