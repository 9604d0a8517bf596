#pragma once

#include <string>
#include <vector>

#include "casorati/geometry.hpp"

namespace casorati {

enum class ExtremumMode { Inf, Sup };

/// Search settings for the hyperplane extremizer. grid_nodes == 0 picks the
/// default: 4096 nodes for n = 3, 4096 * (n - 2) capped at 16384 above.
struct ExtremizerOptions {
  int grid_nodes = 0;
  int refine_steps = 20;
  int grid_candidates = 4;  // best grid nodes refined per mode
};

struct ExtremumCertificate {
  int grid_nodes = 0;
  int starts = 0;          // grid candidates plus eigenvector seeds
  int refine_iterations = 0;
  double grid_value = 0.0;  // best raw grid value before refinement
};

struct HyperplaneExtremum {
  ExtremumMode mode = ExtremumMode::Inf;
  double value = 0.0;
  Vec u;  // unit normal of L = u-perp in tangent-frame coordinates
  ExtremumCertificate certificate;
};

enum class IdealKind { TotallyGeodesic, Umbilical, Ideal11, Ideal41, Generic };

std::string to_string(IdealKind kind);

struct IdealClassification {
  IdealKind kind = IdealKind::Generic;
  double lambda = 0.0;  // positive scale of the detected pattern
  bool single_normal = false;
  bool quasi_umbilical = false;
};

enum class QPVariant { P, Q };

struct QPSolution {
  QPVariant variant = QPVariant::P;
  int n = 0;
  double k = 0.0;
  Vec point;
  double t = 0.0;
  double value = 0.0;
  double min_restricted_hessian_eig = 0.0;
};

struct InvariantReport {
  int n = 0;
  int p = 0;
  double c_tilde = 0.0;
  double C = 0.0;
  HyperplaneExtremum infCL;
  HyperplaneExtremum supCL;
  double meanH = 0.0;
  double tau = 0.0;
  double rho = 0.0;
  double delta_hat = 0.0;
  double delta_C = 0.0;
  double delta_c_legacy = 0.0;
  double slack11 = 0.0;
  double slack41 = 0.0;
  IdealClassification classification;
};

struct DeltaCurvatures {
  double delta_hat = 0.0;
  double delta_C = 0.0;
  double delta_c_legacy = 0.0;
};

// Casorati curvatures ------------------------------------------------------

/// C = (1/n) sum_r sum_ij (h^r_ij)^2
double casorati_total(const SecondForm& h);

/// C(u-perp) = (1/(n-1)) sum_r |P h^r P|_F^2 with P = I - u u^T.
double casorati_hyperplane(const SecondForm& h, const Vec& u);

/// Global inf or sup of casorati_hyperplane over unit u. Requires n >= 3.
HyperplaneExtremum extremize_hyperplane(const SecondForm& h, ExtremumMode mode, const ExtremizerOptions& opts = {});

/// Both extrema from a single grid pass.
std::pair<HyperplaneExtremum, HyperplaneExtremum> hyperplane_extrema(const SecondForm& h,
                                                                     const ExtremizerOptions& opts = {});

// Scalar curvature -----------------------------------------------------------

/// tau via 2 tau = n^2 |H|^2 - n C + n(n-1) c, cross-checked against the sum of
/// Gauss-equation sectional curvatures.
double tau_from_h(const SecondForm& h, double c_tilde);

/// Scalar curvature of the l-plane spanned by the orthonormal columns of basis.
double tau_subspace(const SecondForm& h, const Mat& basis, double c_tilde);

double mean_curvature_norm(const SecondForm& h);

DeltaCurvatures delta_curvatures(const SecondForm& h, const ExtremizerOptions& opts = {});
DeltaCurvatures delta_curvatures(const SecondForm& h, const HyperplaneExtremum& inf, const HyperplaneExtremum& sup);

/// Proof polynomial P (variant P) or Q (variant Q) at the hyperplane u-perp.
/// The ambient curvature cancels, so the value depends on (h, u) only.
double proof_polynomial(const SecondForm& h, const Vec& u, QPVariant variant);

// Constrained quadratic program over the trace hyperplane ---------------------

/// Quadratic form f whose trace-constrained minimum bounds the proof polynomial.
double qp_objective(QPVariant variant, const Vec& x);
Mat qp_hessian(QPVariant variant, int n);
/// Smallest eigenvalue of the Hessian restricted to {sum X_i = 0}.
double restricted_min_eigenvalue(const Mat& hessian);
QPSolution oprea_qp(QPVariant variant, int n, double k);

// Ricci, Einstein, Weyl ----------------------------------------------------

/// Ric(e_i) = sum_{j != i} K(e_i ^ e_j)
Vec ricci_values(const SecondForm& h, double c_tilde);
/// Full Ricci tensor Ric_ik = sum_j R_ijkj of the Gauss-equation curvature.
Mat ricci_tensor(const SecondForm& h, double c_tilde);
double einstein_residual(const SecondForm& h, double c_tilde);
/// Frobenius norm of the Weyl tensor; identically 0 for n <= 3.
double weyl_norm(const SecondForm& h, double c_tilde);

// Classification and report ------------------------------------------------

constexpr double kSyntheticClassificationTol = 1e-8;
constexpr double kNumericClassificationTol = 1e-4;

IdealClassification classify_ideal(const SecondForm& h, double tol = kSyntheticClassificationTol);

InvariantReport inequality_report(const SecondForm& h, double c_tilde, double classification_tol = kSyntheticClassificationTol,
                                  const ExtremizerOptions& opts = {});

}  // namespace casorati
