#include <cmath>
#include <random>

#include "doctest.h"

#include "casorati/error.hpp"
#include "casorati/invariants.hpp"
#include "oracles.hpp"

using namespace casorati;

namespace {

Mat diag(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v[i++] = x;
  return v.asDiagonal();
}

SecondForm pattern(int n, double head, double tail) {
  std::vector<double> d(static_cast<std::size_t>(n), head);
  d.back() = tail;
  return SecondForm::diagonal(d);
}

SecondForm random_form(std::mt19937_64& rng, int n, int p) {
  std::vector<Mat> h;
  for (int r = 0; r < p; ++r) h.push_back(oracle::random_symmetric(rng, n));
  return SecondForm(h);
}

// Random-sample bracket of the hyperplane curvature for any n.
std::pair<double, double> sampled_range(const SecondForm& h, std::mt19937_64& rng, int samples) {
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < samples; ++i) {
    const double v = oracle::hyperplane_casorati(h.matrices(), oracle::random_unit(rng, h.n()));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("casorati_total") {
  CHECK(casorati_total(SecondForm::zero(3, 2)) == 0.0);
  CHECK(casorati_total(SecondForm::diagonal({1, 1, 2})) == doctest::Approx(2.0).epsilon(1e-15));
  Mat h2 = Mat::Zero(3, 3);
  h2(0, 1) = h2(1, 0) = 1.0;
  CHECK(casorati_total(SecondForm(std::vector<Mat>{diag({1, 0, 0}), h2})) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("casorati_hyperplane") {
  const SecondForm h = SecondForm::diagonal({1, 1, 2});
  CHECK(casorati_hyperplane(h, Vec::Unit(3, 2)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(casorati_hyperplane(h, Vec::Unit(3, 0)) == doctest::Approx(2.5).epsilon(1e-15));
  std::mt19937_64 rng(1);
  const SecondForm umb = SecondForm::single(0.7 * Mat::Identity(4, 4));
  for (int i = 0; i < 20; ++i)
    CHECK(std::abs(casorati_hyperplane(umb, oracle::random_unit(rng, 4)) - 0.49) <= 1e-14);
  // Agrees with the projector oracle on random data.
  for (int i = 0; i < 50; ++i) {
    const SecondForm g = random_form(rng, 5, 2);
    const Vec u = oracle::random_unit(rng, 5);
    CHECK(std::abs(casorati_hyperplane(g, u) - oracle::hyperplane_casorati(g.matrices(), u)) <= 1e-13);
  }
  CHECK_THROWS_AS(casorati_hyperplane(h, Vec::Constant(3, 1.0)), Error);
  CHECK_THROWS_AS(casorati_hyperplane(SecondForm::diagonal({1, 2}), Vec::Unit(2, 0)), Error);
}

TEST_CASE("extremize_hyperplane examples") {
  const SecondForm a = SecondForm::diagonal({1, 1, 2});
  const HyperplaneExtremum inf = extremize_hyperplane(a, ExtremumMode::Inf);
  CHECK(std::abs(inf.value - 1.0) <= 1e-12);
  CHECK(std::abs(std::abs(inf.u[2]) - 1.0) <= 1e-8);
  CHECK(inf.u[2] > 0.0);  // canonical sign
  CHECK(std::abs(inf.value - oracle::dense_sphere_extremum(a.matrices(), true, 200000)) <= 1e-6);

  const SecondForm b = SecondForm::diagonal({2, 2, 1});
  const HyperplaneExtremum sup = extremize_hyperplane(b, ExtremumMode::Sup);
  CHECK(std::abs(sup.value - 4.0) <= 1e-12);
  CHECK(std::abs(std::abs(sup.u[2]) - 1.0) <= 1e-8);
  CHECK(std::abs(sup.value - oracle::dense_sphere_extremum(b.matrices(), false, 200000)) <= 1e-6);

  const SecondForm umb = SecondForm::single(1.5 * Mat::Identity(3, 3));
  const auto [lo, hi] = hyperplane_extrema(umb);
  CHECK(lo.value == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(hi.value == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(lo.certificate.grid_nodes == 4096);
  CHECK(lo.certificate.starts >= 4);

  CHECK_THROWS_AS(extremize_hyperplane(SecondForm::diagonal({1, 2}), ExtremumMode::Inf), Error);
}

TEST_CASE("extremizer against oracles on random input") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const SecondForm h = SecondForm::single(oracle::random_symmetric(rng, 3));
    const auto [lo, hi] = hyperplane_extrema(h);
    CHECK(std::abs(lo.value - oracle::dense_sphere_extremum(h.matrices(), true, 100000)) <= 1e-6);
    CHECK(std::abs(hi.value - oracle::dense_sphere_extremum(h.matrices(), false, 100000)) <= 1e-6);
  }
  for (int n = 4; n <= 6; ++n)
    for (int p = 1; p <= 3; ++p) {
      const SecondForm h = random_form(rng, n, p);
      const auto [lo, hi] = hyperplane_extrema(h);
      const auto [slo, shi] = sampled_range(h, rng, 20000);
      CHECK(lo.value <= slo + 1e-12);
      CHECK(hi.value >= shi - 1e-12);
      CHECK(std::abs(lo.u.norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("extremizer is deterministic and scale covariant") {
  std::mt19937_64 rng(77);
  const SecondForm h = random_form(rng, 4, 2);
  const auto a = hyperplane_extrema(h);
  const auto b = hyperplane_extrema(h);
  CHECK(a.first.value == b.first.value);
  CHECK(a.second.u == b.second.u);
  const auto s = hyperplane_extrema(h.scaled(3.0));
  CHECK(std::abs(s.first.value - 9.0 * a.first.value) <= 1e-10 * (1.0 + s.first.value));
  CHECK(std::abs(s.second.value - 9.0 * a.second.value) <= 1e-10 * (1.0 + s.second.value));
  CHECK(std::abs(std::abs(s.first.u.dot(a.first.u)) - 1.0) <= 1e-6);
}

TEST_CASE("scalar curvature") {
  CHECK(tau_from_h(SecondForm::diagonal({1, 1, 2}), 0.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(tau_from_h(SecondForm::zero(3, 1), 1.0) == 3.0);
  const double lam = 0.3;
  CHECK(tau_from_h(SecondForm::single(lam * Mat::Identity(3, 3)), 0.0) == doctest::Approx(3 * lam * lam).epsilon(1e-14));
  CHECK(inequality_report(SecondForm::zero(3, 1), 1.0).rho == 1.0);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const SecondForm h = random_form(rng, 3 + i % 4, 1 + i % 3);
    CHECK_NOTHROW(tau_from_h(h, -0.5 + (i % 3) * 0.5));
  }
}

TEST_CASE("tau_subspace") {
  const SecondForm h = SecondForm::diagonal({1, 1, 2});
  CHECK(tau_subspace(h, Mat::Identity(3, 3), 0.0) == doctest::Approx(tau_from_h(h, 0.0)).epsilon(1e-14));
  CHECK(tau_subspace(h, Mat::Identity(3, 2), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tau_subspace(SecondForm::zero(3, 1), Mat::Identity(3, 2), 1.0) == 1.0);

  std::mt19937_64 rng(8);
  const SecondForm g = random_form(rng, 4, 2);
  const Mat q = Eigen::HouseholderQR<Mat>(oracle::random_symmetric(rng, 4)).householderQ();
  CHECK(std::abs(tau_subspace(g, q, 0.3) - tau_from_h(g, 0.3)) <= 1e-12);
  CHECK_THROWS_AS(tau_subspace(g, 2.0 * Mat::Identity(4, 2), 0.0), Error);
  CHECK_THROWS_AS(tau_subspace(g, Mat::Identity(4, 1), 0.0), Error);
}

TEST_CASE("delta curvatures") {
  const double lam = 1.3, l2 = lam * lam;
  const DeltaCurvatures u = delta_curvatures(SecondForm::single(lam * Mat::Identity(3, 3)));
  CHECK(std::abs(u.delta_hat - 7.0 / 6.0 * l2) <= 1e-12);
  CHECK(std::abs(u.delta_C - 7.0 / 6.0 * l2) <= 1e-12);
  CHECK(std::abs(u.delta_c_legacy - 5.0 / 6.0 * l2) <= 1e-12);
  CHECK(std::abs(delta_curvatures(pattern(3, lam, 2 * lam)).delta_C - 5.0 / 3.0 * l2) <= 1e-12);
  CHECK(std::abs(delta_curvatures(pattern(3, 2 * lam, lam)).delta_hat - 8.0 / 3.0 * l2) <= 1e-12);
  CHECK_THROWS_AS(delta_curvatures(SecondForm::diagonal({1, 1})), Error);
}

TEST_CASE("proof polynomials") {
  CHECK(proof_polynomial(SecondForm::zero(3, 2), Vec::Unit(3, 0), QPVariant::P) == 0.0);
  CHECK(proof_polynomial(SecondForm::zero(3, 2), Vec::Unit(3, 0), QPVariant::Q) == 0.0);
  CHECK(std::abs(proof_polynomial(SecondForm::diagonal({2, 2, 1}), Vec::Unit(3, 2), QPVariant::P)) <= 1e-13);
  CHECK(std::abs(proof_polynomial(SecondForm::diagonal({1, 1, 2}), Vec::Unit(3, 2), QPVariant::Q)) <= 1e-13);

  std::mt19937_64 rng(99);
  double worst = INFINITY;
  for (int i = 0; i < 20000; ++i) {
    const int n = 3 + i % 4, p = 1 + (i / 4) % 3;
    const SecondForm h = random_form(rng, n, p);
    const Vec u = oracle::random_unit(rng, n);
    const double scale = 1.0 + std::pow(h.frobenius_squared(), 2);
    for (QPVariant v : {QPVariant::P, QPVariant::Q}) worst = std::min(worst, proof_polynomial(h, u, v) / scale);
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("trace-constrained quadratic program") {
  SUBCASE("closed forms") {
    const QPSolution p = oprea_qp(QPVariant::P, 3, 5.0);
    CHECK((p.point - Vec::Map(std::vector<double>{2, 2, 1}.data(), 3)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(p.value) <= 1e-12);
    CHECK(p.min_restricted_hessian_eig == doctest::Approx(5.0).epsilon(1e-13));
    const QPSolution z = oprea_qp(QPVariant::P, 5, 0.0);
    CHECK(z.point.isZero());
    CHECK(z.value == 0.0);
    const QPSolution q = oprea_qp(QPVariant::Q, 3, 4.0);
    CHECK((q.point - Vec::Map(std::vector<double>{1, 1, 2}.data(), 3)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(q.value) <= 1e-12);
    CHECK(q.min_restricted_hessian_eig >= 0.0);
    CHECK_THROWS_AS(oprea_qp(QPVariant::P, 2, 1.0), Error);
  }
  SUBCASE("Hessian matches polarization of the objective") {
    for (QPVariant v : {QPVariant::P, QPVariant::Q})
      for (int n = 3; n <= 7; ++n) {
        const Mat polar = oracle::polarized_hessian([v](const Vec& x) { return qp_objective(v, x); }, n);
        CHECK((polar - qp_hessian(v, n)).cwiseAbs().maxCoeff() <= 1e-12);
      }
  }
  SUBCASE("agrees with projected descent") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> N(3, 8);
    std::uniform_real_distribution<double> K(-10.0, 10.0);
    for (int i = 0; i < 30; ++i) {
      const QPVariant v = i % 2 ? QPVariant::Q : QPVariant::P;
      const int n = N(rng);
      const double k = K(rng);
      const QPSolution s = oprea_qp(v, n, k);
      const Vec ref = oracle::projected_descent([v](const Vec& x) { return qp_objective(v, x); }, n, k);
      CHECK((s.point - ref).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK(std::abs(s.value) <= 1e-12 * (1.0 + k * k));
      CHECK(std::abs(s.point.sum() - k) <= 1e-12 * (1.0 + std::abs(k)));
      if (v == QPVariant::P) CHECK(std::abs(s.min_restricted_hessian_eig - (2.0 * n - 1.0)) <= 1e-12 * n);
    }
  }
}

TEST_CASE("Ricci and Einstein") {
  const Vec r = ricci_values(SecondForm::diagonal({2, 2, 1}), 0.0);
  CHECK(r[0] == 6.0);
  CHECK(r[1] == 6.0);
  CHECK(r[2] == 4.0);
  CHECK(ricci_values(SecondForm::zero(3, 1), 1.0) == Vec::Constant(3, 2.0));
  CHECK((ricci_values(SecondForm::single(0.5 * Mat::Identity(3, 3)), 0.0) - Vec::Constant(3, 0.5)).norm() <= 1e-15);

  CHECK(einstein_residual(SecondForm::diagonal({2, 2, 1}), 0.0) == 2.0);
  CHECK(einstein_residual(SecondForm::zero(4, 2), 0.5) == 0.0);
  CHECK(einstein_residual(SecondForm::single(3.0 * Mat::Identity(4, 4)), 0.0) == 0.0);

  std::mt19937_64 rng(21);
  const SecondForm h = random_form(rng, 5, 2);
  const Mat ric = ricci_tensor(h, -0.4);
  CHECK((ric.diagonal() - ricci_values(h, -0.4)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(ric.trace() - 2.0 * tau_from_h(h, -0.4)) <= 1e-12);
  // Ric_ik = sum_j R_ijkj of the Gauss tensor.
  const RiemannTensor R = gauss_riemann(h, -0.4);
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 5; ++k) {
      double s = 0.0;
      for (int j = 0; j < 5; ++j) s += R(i, j, k, j);
      CHECK(std::abs(s - ric(i, k)) <= 1e-12);
    }
}

TEST_CASE("Weyl tensor") {
  for (double a : {0.0, 0.5, 1.0})
    for (double c : {-1.0, 0.0, 2.0}) CHECK(weyl_norm(pattern(4, 2 * a, a), c) <= 1e-9);
  CHECK(weyl_norm(SecondForm::diagonal({1, 2, 3, 4}), 0.0) > 0.01);
  std::mt19937_64 rng(5);
  CHECK(weyl_norm(random_form(rng, 3, 2), 0.7) == 0.0);
  // Quasi-umbilical hypersurfaces are conformally flat; a generic one is not.
  CHECK(weyl_norm(pattern(5, 0.3, -1.1), 0.4) <= 1e-12);
  CHECK(weyl_norm(random_form(rng, 5, 1), 0.0) > 1e-3);
}

TEST_CASE("classification") {
  for (double lam : {0.1, 1.0, 10.0}) {
    const IdealClassification a = classify_ideal(pattern(3, lam, 2 * lam));
    CHECK(a.kind == IdealKind::Ideal41);
    CHECK(a.lambda == doctest::Approx(lam));
    CHECK(a.single_normal);
    CHECK(a.quasi_umbilical);
    CHECK(classify_ideal(pattern(3, 2 * lam, lam)).kind == IdealKind::Ideal11);
    // h -> -h does not change the pattern.
    CHECK(classify_ideal(pattern(4, -lam, -2 * lam)).kind == IdealKind::Ideal41);
    CHECK(classify_ideal(SecondForm::single(lam * Mat::Identity(3, 3))).kind == IdealKind::Umbilical);
  }
  CHECK(classify_ideal(SecondForm::zero(3, 2)).kind == IdealKind::TotallyGeodesic);
  CHECK(classify_ideal(SecondForm::diagonal({1, 2, 3})).kind == IdealKind::Generic);
  CHECK_FALSE(classify_ideal(SecondForm::diagonal({1, 2, 3})).quasi_umbilical);
  CHECK(to_string(IdealKind::Ideal41) == "Ideal41");

  // The pattern survives a rotation of the tangent frame and a rotation of the normal frame.
  std::mt19937_64 rng(12);
  const Mat q = Eigen::HouseholderQR<Mat>(oracle::random_symmetric(rng, 4)).householderQ();
  const Mat a = q * diag({0.7, 0.7, 0.7, 1.4}) * q.transpose();
  const double c = std::cos(0.4), s = std::sin(0.4);
  const SecondForm rotated(std::vector<Mat>{c * a, s * a});
  const IdealClassification r = classify_ideal(rotated);
  CHECK(r.kind == IdealKind::Ideal41);
  CHECK(r.lambda == doctest::Approx(0.7).epsilon(1e-10));

  // Two independent normals are never single-normal patterns.
  const SecondForm two(std::vector<Mat>{diag({1, 1, 2}), diag({0, 0, 1})});
  const IdealClassification t = classify_ideal(two);
  CHECK_FALSE(t.single_normal);
  CHECK(t.kind == IdealKind::Generic);
  CHECK(t.quasi_umbilical);
  const SecondForm skew(std::vector<Mat>{diag({1, 1, 2}), diag({3, 0, 0})});
  CHECK_FALSE(classify_ideal(skew).quasi_umbilical);

  // Perturbations above the tolerance break the pattern.
  CHECK(classify_ideal(SecondForm::diagonal({1, 1 + 1e-6, 2})).kind == IdealKind::Generic);
  CHECK(classify_ideal(SecondForm::diagonal({1, 1 + 1e-6, 2}), kNumericClassificationTol).kind == IdealKind::Ideal41);
}

TEST_CASE("inequality report") {
  SUBCASE("round sphere") {
    for (double R : {0.5, 1.0, 2.0}) {
      const InvariantReport r = inequality_report(SecondForm::single(Mat::Identity(3, 3) / R), 0.0);
      const double k = 1.0 / (R * R);
      CHECK(std::abs(r.rho - k) <= 1e-12 * k);
      CHECK(std::abs(r.C - k) <= 1e-12 * k);
      CHECK(std::abs(r.delta_C - 7.0 / 6.0 * k) <= 1e-12 * k);
      CHECK(std::abs(r.slack41 - k / 6.0) <= 1e-12 * k);
      CHECK(std::abs(r.meanH - 1.0 / R) <= 1e-14);
      CHECK(r.classification.kind == IdealKind::Umbilical);
    }
  }
  SUBCASE("equality cases") {
    for (int n = 3; n <= 6; ++n)
      for (double lam : {0.1, 1.0, 10.0}) {
        CAPTURE(n);
        CAPTURE(lam);
        const InvariantReport a = inequality_report(pattern(n, lam, 2 * lam), 0.0);
        CHECK(std::abs(a.slack41) <= 1e-10);
        CHECK(a.slack11 >= 0.0);
        CHECK(a.classification.kind == IdealKind::Ideal41);
        const InvariantReport b = inequality_report(pattern(n, 2 * lam, lam), 0.0);
        CHECK(std::abs(b.slack11) <= 1e-10);
        CHECK(b.slack41 >= 0.0);
        CHECK(b.classification.kind == IdealKind::Ideal11);
      }
    const double lam = 0.8;
    const InvariantReport e = inequality_report(pattern(3, lam, 2 * lam), 0.0);
    CHECK(std::abs(e.rho - 5.0 / 3.0 * lam * lam) <= 1e-12);
    CHECK(std::abs(e.delta_C - e.rho) <= 1e-12);
  }
  SUBCASE("totally geodesic in a curved space form") {
    const InvariantReport r = inequality_report(SecondForm::zero(4, 2), -1.0);
    CHECK(r.rho == -1.0);
    CHECK(r.slack11 == 0.0);
    CHECK(r.slack41 == 0.0);
    CHECK(r.classification.kind == IdealKind::TotallyGeodesic);
  }
  SUBCASE("slacks are nonnegative on random input") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> C(-2.0, 2.0);
    double worst = INFINITY;
    for (int i = 0; i < 600; ++i) {
      const SecondForm h = random_form(rng, 3 + i % 4, 1 + (i / 4) % 3);
      const InvariantReport r = inequality_report(h, C(rng));
      worst = std::min({worst, r.slack11, r.slack41});
    }
    CHECK(worst >= -1e-9);
  }
  SUBCASE("homogeneity") {
    std::mt19937_64 rng(41);
    const SecondForm h = random_form(rng, 4, 2);
    const InvariantReport a = inequality_report(h, 0.0);
    const InvariantReport b = inequality_report(h.scaled(2.5), 0.0);
    const double s2 = 6.25;
    for (auto [x, y] : {std::pair{a.C, b.C}, {a.tau, b.tau}, {a.delta_hat, b.delta_hat}, {a.delta_C, b.delta_C},
                        {a.delta_c_legacy, b.delta_c_legacy}, {a.slack11, b.slack11}, {a.slack41, b.slack41},
                        {a.infCL.value, b.infCL.value}, {a.supCL.value, b.supCL.value}})
      CHECK(std::abs(s2 * x - y) <= 1e-10 * (1.0 + std::abs(y)));
  }
  SUBCASE("invalid") {
    CHECK_THROWS_AS(inequality_report(SecondForm::diagonal({1, 2}), 0.0), Error);
    CHECK_THROWS_AS(inequality_report(SecondForm::diagonal({1, 2, 3}), NAN), Error);
  }
}
