#include "casorati/casorati.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>

#include "casorati/elliptic.hpp"
#include "casorati/error.hpp"
#include "casorati/geometry.hpp"
#include "casorati/immersions.hpp"
#include "casorati/invariants.hpp"

struct casorati_chart {
  casorati::Chart chart;
};

struct casorati_second_form {
  casorati::SecondForm h;
};

namespace {

thread_local std::string last_error;

casorati_status set_error(casorati_status status, const std::string& what) {
  last_error = what;
  return status;
}

// Runs body, translating exceptions into status codes.
template <class F>
casorati_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return CASORATI_OK;
  } catch (const casorati::Error& e) {
    switch (e.kind()) {
      case casorati::ErrorKind::InvalidArgument: return set_error(CASORATI_ERR_INVALID, e.what());
      case casorati::ErrorKind::IllConditioned: return set_error(CASORATI_ERR_ILL_CONDITIONED, e.what());
      case casorati::ErrorKind::NumericalFailure: return set_error(CASORATI_ERR_NUMERICAL, e.what());
    }
    return set_error(CASORATI_ERR_INTERNAL, e.what());
  } catch (const std::exception& e) {
    return set_error(CASORATI_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(CASORATI_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* ptr, const char* what) {
  if (ptr == nullptr) casorati::fail(casorati::ErrorKind::InvalidArgument, std::string(what) + " must not be null");
}

casorati::ParamMap parse_params(const char* text) {
  casorati::ParamMap params;
  if (text == nullptr) return params;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      casorati::fail(casorati::ErrorKind::InvalidArgument, "parameter '" + item + "' is not of the form key=value");
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != raw.size())
      casorati::fail(casorati::ErrorKind::InvalidArgument, "parameter '" + key + "' has a non-numeric value");
    if (params.contains(key)) casorati::fail(casorati::ErrorKind::InvalidArgument, "parameter '" + key + "' given twice");
    params[key] = value;
  }
  return params;
}

casorati::Vec point_of(const casorati_chart* chart, const double* x, int n) {
  need(chart, "chart");
  need(x, "point");
  if (n != chart->chart.dim())
    casorati::fail(casorati::ErrorKind::InvalidArgument,
                   "point has " + std::to_string(n) + " coordinates, chart expects " + std::to_string(chart->chart.dim()));
  return Eigen::Map<const casorati::Vec>(x, n);
}

std::string format_defaults(const casorati::ParamMap& m) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : m) {
    os << (first ? "" : ",") << k << "=" << v;
    first = false;
  }
  return os.str();
}

casorati_ideal_kind to_c(casorati::IdealKind k) {
  switch (k) {
    case casorati::IdealKind::TotallyGeodesic: return CASORATI_TOTALLY_GEODESIC;
    case casorati::IdealKind::Umbilical: return CASORATI_UMBILICAL;
    case casorati::IdealKind::Ideal11: return CASORATI_IDEAL11;
    case casorati::IdealKind::Ideal41: return CASORATI_IDEAL41;
    case casorati::IdealKind::Generic: return CASORATI_GENERIC;
  }
  return CASORATI_GENERIC;
}

casorati::QPVariant to_cpp(casorati_qp_variant v) {
  if (v == CASORATI_QP_P) return casorati::QPVariant::P;
  if (v == CASORATI_QP_Q) return casorati::QPVariant::Q;
  casorati::fail(casorati::ErrorKind::InvalidArgument, "unknown QP variant");
}

}  // namespace

extern "C" {

const char* casorati_last_error(void) { return last_error.c_str(); }

const char* casorati_version(void) { return "1.0.0"; }

size_t casorati_catalog_size(void) { return casorati::catalog().size(); }

casorati_status casorati_catalog_entry(size_t index, const char** name, const char** description, const char** defaults) {
  static const std::vector<std::string> formatted = [] {
    std::vector<std::string> out;
    for (const auto& e : casorati::catalog()) out.push_back(format_defaults(e.defaults));
    return out;
  }();
  return guarded([&] {
    if (index >= casorati::catalog().size()) casorati::fail(casorati::ErrorKind::InvalidArgument, "catalog index out of range");
    const auto& e = casorati::catalog()[index];
    if (name) *name = e.name.c_str();
    if (description) *description = e.description.c_str();
    if (defaults) *defaults = formatted[index].c_str();
  });
}

casorati_status casorati_chart_create(const char* name, const char* params, casorati_jet_mode mode, casorati_chart** out) {
  return guarded([&] {
    need(name, "chart name");
    need(out, "output handle");
    *out = nullptr;
    if (mode != CASORATI_JET_ANALYTIC && mode != CASORATI_JET_NUMERIC)
      casorati::fail(casorati::ErrorKind::InvalidArgument, "unknown jet mode");
    auto chart = casorati::make_chart(name, parse_params(params),
                                      mode == CASORATI_JET_ANALYTIC ? casorati::JetMode::Analytic : casorati::JetMode::Numeric);
    *out = new casorati_chart{std::move(chart)};
  });
}

void casorati_chart_destroy(casorati_chart* chart) { delete chart; }

casorati_status casorati_chart_dims(const casorati_chart* chart, int* n, int* p) {
  return guarded([&] {
    need(chart, "chart");
    if (n) *n = chart->chart.dim();
    if (p) *p = chart->chart.codim();
  });
}

casorati_status casorati_chart_domain(const casorati_chart* chart, double* lower, double* upper) {
  return guarded([&] {
    need(chart, "chart");
    need(lower, "lower");
    need(upper, "upper");
    const auto& box = chart->chart.domain();
    for (int i = 0; i < chart->chart.dim(); ++i) {
      lower[i] = box.lower[i];
      upper[i] = box.upper[i];
    }
  });
}

casorati_status casorati_chart_coordinate(const casorati_chart* chart, int index, const char** name) {
  return guarded([&] {
    need(chart, "chart");
    need(name, "name");
    const auto& names = chart->chart.coordinate_names();
    if (index < 0 || index >= static_cast<int>(names.size()))
      casorati::fail(casorati::ErrorKind::InvalidArgument, "coordinate index out of range");
    *name = names[static_cast<std::size_t>(index)].c_str();
  });
}

casorati_status casorati_chart_param(const casorati_chart* chart, const char* key, double* value) {
  return guarded([&] {
    need(chart, "chart");
    need(key, "key");
    need(value, "value");
    const auto& params = chart->chart.params();
    auto it = params.find(std::string_view(key));
    if (it == params.end()) casorati::fail(casorati::ErrorKind::InvalidArgument, std::string("no chart parameter ") + key);
    *value = it->second;
  });
}

casorati_status casorati_chart_domain_check(const casorati_chart* chart, const double* x, int n, casorati_domain_verdict* out) {
  return guarded([&] {
    need(out, "verdict");
    const casorati::Vec pt = point_of(chart, x, n);
    const auto v = casorati::domain_check(chart->chart, pt);
    out->inside = v.inside ? 1 : 0;
    out->admissible = v.admissible ? 1 : 0;
    out->boundary_distance = v.boundary_distance;
    std::snprintf(out->reason, sizeof out->reason, "%s", v.reason.c_str());
  });
}

casorati_status casorati_chart_position(const casorati_chart* chart, const double* x, int n, double* out) {
  return guarded([&] {
    need(out, "output");
    const casorati::Vec pt = point_of(chart, x, n);
    const casorati::Vec pos = chart->chart.position(pt);
    std::copy(pos.data(), pos.data() + pos.size(), out);
  });
}

casorati_status casorati_chart_second_form(const casorati_chart* chart, const double* x, int n, double max_condition,
                                           casorati_second_form** out, double* frame_condition) {
  return guarded([&] {
    need(out, "output handle");
    *out = nullptr;
    const casorati::Vec pt = point_of(chart, x, n);
    const double cap = max_condition > 0.0 ? max_condition : casorati::kDefaultMaxCondition;
    const auto jet = casorati::jet2(chart->chart, pt);
    const auto frame = casorati::frame_from_jet(jet, pt, cap);
    auto h = casorati::second_form(jet, frame);
    if (frame_condition) *frame_condition = frame.condition;
    *out = new casorati_second_form{std::move(h)};
  });
}

casorati_status casorati_chart_gauss_check(const casorati_chart* chart, const double* x, int n, double max_condition,
                                           casorati_gauss_check* out) {
  return guarded([&] {
    need(out, "output");
    const casorati::Vec pt = point_of(chart, x, n);
    const double cap = max_condition > 0.0 ? max_condition : casorati::kDefaultMaxCondition;
    const auto jet = casorati::jet2(chart->chart, pt);
    const auto frame = casorati::frame_from_jet(jet, pt, cap);
    const auto h = casorati::second_form(jet, frame);
    const auto riemann = casorati::intrinsic_riemann(chart->chart, pt, cap);
    out->tau_intrinsic = riemann.scalar_tau();
    out->tau_extrinsic = casorati::tau_from_h(h, 0.0);
    out->residual = casorati::gauss_residual(h, riemann, 0.0);
    out->frame_condition = frame.condition;
  });
}

casorati_status casorati_second_form_create(int n, int p, const double* data, casorati_second_form** out) {
  return guarded([&] {
    need(out, "output handle");
    *out = nullptr;
    need(data, "data");
    if (n < 1 || p < 1) casorati::fail(casorati::ErrorKind::InvalidArgument, "n and p must be positive");
    std::vector<casorati::Mat> mats;
    for (int r = 0; r < p; ++r) {
      casorati::Mat m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = data[(static_cast<std::size_t>(r) * n + i) * n + j];
      mats.push_back(std::move(m));
    }
    *out = new casorati_second_form{casorati::SecondForm(std::move(mats))};
  });
}

void casorati_second_form_destroy(casorati_second_form* h) { delete h; }

casorati_status casorati_second_form_dims(const casorati_second_form* h, int* n, int* p) {
  return guarded([&] {
    need(h, "second form");
    if (n) *n = h->h.n();
    if (p) *p = h->h.p();
  });
}

casorati_status casorati_second_form_data(const casorati_second_form* h, double* out) {
  return guarded([&] {
    need(h, "second form");
    need(out, "output");
    const int n = h->h.n();
    for (int r = 0; r < h->h.p(); ++r)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[(static_cast<std::size_t>(r) * n + i) * n + j] = h->h[r](i, j);
  });
}

casorati_status casorati_invariant_report(const casorati_second_form* h, double c_tilde, double classification_tol,
                                          casorati_report* out) {
  return guarded([&] {
    need(h, "second form");
    need(out, "output");
    const double tol = classification_tol > 0.0 ? classification_tol : casorati::kSyntheticClassificationTol;
    const auto r = casorati::inequality_report(h->h, c_tilde, tol);
    out->n = r.n;
    out->p = r.p;
    out->c_tilde = r.c_tilde;
    out->casorati = r.C;
    out->inf_cl = r.infCL.value;
    out->sup_cl = r.supCL.value;
    out->mean_h = r.meanH;
    out->tau = r.tau;
    out->rho = r.rho;
    out->delta_hat = r.delta_hat;
    out->delta_C = r.delta_C;
    out->delta_c_legacy = r.delta_c_legacy;
    out->slack_11 = r.slack11;
    out->slack_41 = r.slack41;
    out->classification = to_c(r.classification.kind);
    out->lambda = r.classification.lambda;
    out->single_normal = r.classification.single_normal ? 1 : 0;
    out->quasi_umbilical = r.classification.quasi_umbilical ? 1 : 0;
  });
}

casorati_status casorati_proof_polynomial(const casorati_second_form* h, const double* u, int n, casorati_qp_variant variant,
                                          double* out) {
  return guarded([&] {
    need(h, "second form");
    need(u, "u");
    need(out, "output");
    if (n != h->h.n()) casorati::fail(casorati::ErrorKind::InvalidArgument, "u has the wrong dimension");
    *out = casorati::proof_polynomial(h->h, Eigen::Map<const casorati::Vec>(u, n), to_cpp(variant));
  });
}

casorati_status casorati_ricci_values(const casorati_second_form* h, double c_tilde, double* out) {
  return guarded([&] {
    need(h, "second form");
    need(out, "output");
    const casorati::Vec ric = casorati::ricci_values(h->h, c_tilde);
    std::copy(ric.data(), ric.data() + ric.size(), out);
  });
}

casorati_status casorati_weyl_norm(const casorati_second_form* h, double c_tilde, double* out) {
  return guarded([&] {
    need(h, "second form");
    need(out, "output");
    *out = casorati::weyl_norm(h->h, c_tilde);
  });
}

const char* casorati_ideal_kind_name(casorati_ideal_kind kind) {
  switch (kind) {
    case CASORATI_TOTALLY_GEODESIC: return "TotallyGeodesic";
    case CASORATI_UMBILICAL: return "Umbilical";
    case CASORATI_IDEAL11: return "Ideal11";
    case CASORATI_IDEAL41: return "Ideal41";
    case CASORATI_GENERIC: return "Generic";
  }
  return "Generic";
}

casorati_status casorati_qp_solve(casorati_qp_variant variant, int n, double k, casorati_qp_solution* out, double* point) {
  return guarded([&] {
    need(out, "output");
    need(point, "point");
    const auto s = casorati::oprea_qp(to_cpp(variant), n, k);
    out->variant = variant;
    out->n = s.n;
    out->k = s.k;
    out->t = s.t;
    out->value = s.value;
    out->min_restricted_hessian_eig = s.min_restricted_hessian_eig;
    std::copy(s.point.data(), s.point.data() + s.point.size(), point);
  });
}

casorati_status casorati_jacobi(double u, double k, double* sn, double* cn, double* dn) {
  return guarded([&] {
    const auto e = casorati::elliptic::jacobi_elliptic(u, k);
    if (sn) *sn = e.sn;
    if (cn) *cn = e.cn;
    if (dn) *dn = e.dn;
  });
}

casorati_status casorati_jacobi_sd(double u, double k, double* out) {
  return guarded([&] {
    need(out, "output");
    *out = casorati::elliptic::jacobi_sd(u, k);
  });
}

casorati_status casorati_complete_k(double k, double* out) {
  return guarded([&] {
    need(out, "output");
    *out = casorati::elliptic::complete_K(k);
  });
}

}  // extern "C"
