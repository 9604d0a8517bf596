#pragma once

#include <vector>

#include "casorati/immersions.hpp"

namespace casorati {

/// Adapted orthonormal frame at a chart point.
struct FramedPoint {
  Vec x;
  Mat tangent;          // ambient_dim x n, columns e_1..e_n
  Mat normal;           // ambient_dim x p, columns e_{n+1}..e_{n+p}
  Mat induced_metric;   // n x n, chart coordinates
  Mat coord_to_frame;   // n x n upper triangular E with tangent = d1 * E
  double condition = 1.0;
};

/// Components h[r](i, j) = h^r_ij of the second fundamental form in an
/// orthonormal adapted frame. Since the frame is orthonormal each h[r] is also
/// the matrix of the shape operator A_r.
class SecondForm {
 public:
  SecondForm() = default;
  /// Throws InvalidArgument on empty input, mismatched sizes, non-finite
  /// entries or asymmetry beyond sym_tol * max(1, max|h|).
  explicit SecondForm(std::vector<Mat> h, double sym_tol = 1e-12);

  static SecondForm zero(int n, int p);
  static SecondForm single(const Mat& a) { return SecondForm(std::vector<Mat>{a}); }
  static SecondForm diagonal(const std::vector<double>& d);

  int n() const { return n_; }
  int p() const { return static_cast<int>(h_.size()); }
  const Mat& operator[](int r) const { return h_[static_cast<std::size_t>(r)]; }
  const std::vector<Mat>& matrices() const { return h_; }
  double frobenius_squared() const;

  SecondForm scaled(double s) const;

 private:
  int n_ = 0;
  std::vector<Mat> h_;
};

/// R(i,j,k,l) with R(i,j,i,j) the sectional curvature of span(e_i, e_j).
class RiemannTensor {
 public:
  RiemannTensor() = default;
  explicit RiemannTensor(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n * n), 0.0) {}

  int n() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

  /// sum_{i<j} R(i,j,i,j)
  double scalar_tau() const;
  /// Largest violation of antisymmetry, pair symmetry and first Bianchi.
  double symmetry_defect() const;

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l);
  }
  int n_ = 0;
  std::vector<double> data_;
};

constexpr double kDefaultMaxCondition = 1e8;

/// Frame from a jet: modified Gram-Schmidt on the first partials (positive
/// diagonal of the triangular factor), then the normal space is completed by
/// greedily orthogonalizing the ambient standard basis vectors.
FramedPoint frame_from_jet(const Jet2& jet, const Vec& x, double max_condition = kDefaultMaxCondition);
FramedPoint frame_at(const Chart& chart, const Vec& x, double max_condition = kDefaultMaxCondition);

SecondForm second_form(const Jet2& jet, const FramedPoint& frame);
SecondForm second_form(const Chart& chart, const Vec& x, const FramedPoint& frame);

/// Riemann tensor of the induced metric from finite differences of the metric
/// field, converted to the orthonormal tangent frame of frame_at(chart, x).
RiemannTensor intrinsic_riemann(const Chart& chart, const Vec& x, double max_condition = kDefaultMaxCondition);

/// Riemann tensor predicted by the Gauss equation in a space form of curvature c.
RiemannTensor gauss_riemann(const SecondForm& h, double c_tilde);

/// max |R - Gauss(h, c)| over all components.
double gauss_residual(const SecondForm& h, const RiemannTensor& riemann, double c_tilde);

}  // namespace casorati
