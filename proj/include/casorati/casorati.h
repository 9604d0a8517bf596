/*
 * C interface to the casorati curvature toolkit.
 *
 * Every function returns a casorati_status. On failure the message for the
 * calling thread is available from casorati_last_error() until the next call
 * on that thread. Handles are immutable after creation and may be shared
 * between threads.
 */
#ifndef CASORATI_CASORATI_H
#define CASORATI_CASORATI_H

#include <stddef.h>

#if defined(CASORATI_BUILDING_LIBRARY)
#define CASORATI_API __attribute__((visibility("default")))
#else
#define CASORATI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the command-line exit codes, except NUMERICAL which the CLI
 * folds into 3. */
typedef enum casorati_status {
  CASORATI_OK = 0,
  CASORATI_ERR_INVALID = 2,
  CASORATI_ERR_ILL_CONDITIONED = 3,
  CASORATI_ERR_NUMERICAL = 4,
  CASORATI_ERR_INTERNAL = 5
} casorati_status;

typedef enum casorati_jet_mode { CASORATI_JET_ANALYTIC = 0, CASORATI_JET_NUMERIC = 1 } casorati_jet_mode;

typedef enum casorati_ideal_kind {
  CASORATI_TOTALLY_GEODESIC = 0,
  CASORATI_UMBILICAL = 1,
  CASORATI_IDEAL11 = 2,
  CASORATI_IDEAL41 = 3,
  CASORATI_GENERIC = 4
} casorati_ideal_kind;

typedef enum casorati_qp_variant { CASORATI_QP_P = 0, CASORATI_QP_Q = 1 } casorati_qp_variant;

typedef struct casorati_chart casorati_chart;
typedef struct casorati_second_form casorati_second_form;

typedef struct casorati_domain_verdict {
  int inside;
  int admissible;
  double boundary_distance;
  char reason[128];
} casorati_domain_verdict;

typedef struct casorati_report {
  int n;
  int p;
  double c_tilde;
  double casorati;
  double inf_cl;
  double sup_cl;
  double mean_h;
  double tau;
  double rho;
  double delta_hat;
  double delta_C;
  double delta_c_legacy;
  double slack_11;
  double slack_41;
  casorati_ideal_kind classification;
  double lambda;
  int single_normal;
  int quasi_umbilical;
} casorati_report;

typedef struct casorati_qp_solution {
  casorati_qp_variant variant;
  int n;
  double k;
  double t;
  double value;
  double min_restricted_hessian_eig;
} casorati_qp_solution;

typedef struct casorati_gauss_check {
  double tau_intrinsic;
  double tau_extrinsic;
  double residual;
  double frame_condition;
} casorati_gauss_check;

CASORATI_API const char* casorati_last_error(void);
CASORATI_API const char* casorati_version(void);

/* Catalog ---------------------------------------------------------------- */

CASORATI_API size_t casorati_catalog_size(void);
/* Name, description and default parameters ("R=1,n=3") of entry i. */
CASORATI_API casorati_status casorati_catalog_entry(size_t index, const char** name, const char** description,
                                                    const char** defaults);

/* Charts ----------------------------------------------------------------- */

/* params: comma-separated key=value list, may be NULL or empty. */
CASORATI_API casorati_status casorati_chart_create(const char* name, const char* params, casorati_jet_mode mode,
                                                   casorati_chart** out);
CASORATI_API void casorati_chart_destroy(casorati_chart* chart);
CASORATI_API casorati_status casorati_chart_dims(const casorati_chart* chart, int* n, int* p);
/* lower/upper must hold n doubles. */
CASORATI_API casorati_status casorati_chart_domain(const casorati_chart* chart, double* lower, double* upper);
/* Name of coordinate i (valid for the lifetime of the chart). */
CASORATI_API casorati_status casorati_chart_coordinate(const casorati_chart* chart, int index, const char** name);
/* Resolved value of a chart parameter. */
CASORATI_API casorati_status casorati_chart_param(const casorati_chart* chart, const char* key, double* value);
CASORATI_API casorati_status casorati_chart_domain_check(const casorati_chart* chart, const double* x, int n,
                                                         casorati_domain_verdict* out);
/* Ambient position; out must hold n + p doubles. */
CASORATI_API casorati_status casorati_chart_position(const casorati_chart* chart, const double* x, int n, double* out);
/* Second fundamental form at x in the adapted orthonormal frame. */
CASORATI_API casorati_status casorati_chart_second_form(const casorati_chart* chart, const double* x, int n,
                                                        double max_condition, casorati_second_form** out,
                                                        double* frame_condition);
/* Intrinsic (metric finite differences) versus extrinsic (Gauss equation) curvature. */
CASORATI_API casorati_status casorati_chart_gauss_check(const casorati_chart* chart, const double* x, int n,
                                                        double max_condition, casorati_gauss_check* out);

/* Second fundamental forms ------------------------------------------------ */

/* data holds p row-major n x n matrices back to back. Rejects asymmetric input. */
CASORATI_API casorati_status casorati_second_form_create(int n, int p, const double* data,
                                                         casorati_second_form** out);
CASORATI_API void casorati_second_form_destroy(casorati_second_form* h);
CASORATI_API casorati_status casorati_second_form_dims(const casorati_second_form* h, int* n, int* p);
/* Copies p * n * n values in the create() layout. */
CASORATI_API casorati_status casorati_second_form_data(const casorati_second_form* h, double* out);

/* Invariants -------------------------------------------------------------- */

/* classification_tol <= 0 selects the synthetic default 1e-8. */
CASORATI_API casorati_status casorati_invariant_report(const casorati_second_form* h, double c_tilde,
                                                       double classification_tol, casorati_report* out);
CASORATI_API casorati_status casorati_proof_polynomial(const casorati_second_form* h, const double* u, int n,
                                                       casorati_qp_variant variant, double* out);
CASORATI_API casorati_status casorati_ricci_values(const casorati_second_form* h, double c_tilde, double* out);
CASORATI_API casorati_status casorati_weyl_norm(const casorati_second_form* h, double c_tilde, double* out);
CASORATI_API const char* casorati_ideal_kind_name(casorati_ideal_kind kind);

/* point must hold n doubles. */
CASORATI_API casorati_status casorati_qp_solve(casorati_qp_variant variant, int n, double k,
                                               casorati_qp_solution* out, double* point);

/* Elliptic functions ------------------------------------------------------ */

CASORATI_API casorati_status casorati_jacobi(double u, double k, double* sn, double* cn, double* dn);
CASORATI_API casorati_status casorati_jacobi_sd(double u, double k, double* out);
CASORATI_API casorati_status casorati_complete_k(double k, double* out);

#ifdef __cplusplus
}
#endif

#endif /* CASORATI_CASORATI_H */
