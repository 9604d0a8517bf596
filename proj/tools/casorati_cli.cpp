// Command-line front end over the C API: reports, sweeps, verification runs
// and the trace-constrained quadratic program.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "casorati/casorati.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;
constexpr long long kMaxGridPoints = 1'000'000;
// Chart-derived forms carry discretization error; see README.
constexpr double kChartClassificationTol = 1e-4;

struct CliError {
  int code;
  std::string message;
};

int exit_code(casorati_status s) {
  switch (s) {
    case CASORATI_OK: return kExitOk;
    case CASORATI_ERR_INVALID: return kExitInvalid;
    default: return kExitNumerical;
  }
}

void check(casorati_status s) {
  if (s != CASORATI_OK) throw CliError{exit_code(s), casorati_last_error()};
}

[[noreturn]] void invalid(const std::string& what) { throw CliError{kExitInvalid, what}; }

struct ChartDeleter {
  void operator()(casorati_chart* c) const { casorati_chart_destroy(c); }
};
struct FormDeleter {
  void operator()(casorati_second_form* h) const { casorati_second_form_destroy(h); }
};
using ChartPtr = std::unique_ptr<casorati_chart, ChartDeleter>;
using FormPtr = std::unique_ptr<casorati_second_form, FormDeleter>;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) invalid(what + ": '" + s + "' is not a finite number");
  return v;
}

// Options -------------------------------------------------------------------

struct Options {
  std::string chart;
  std::string params;
  std::string point;
  std::string jet = "analytic";
  std::string synthetic;
  double c_tilde = 0.0;
  bool c_tilde_given = false;
  std::string format;
  std::string output;
  double tol_algebraic = 1e-8;
  bool tol_algebraic_given = false;
  double tol_geometric = 0.0;  // 0 selects the jet-mode default
  double max_condition = 1e8;
  std::vector<std::string> grids;
  int threads = 0;
  long long random = 0;
  unsigned long long seed = 1;
  std::string variant = "P";
  int qp_n = 3;
  double qp_k = 0.0;
};

casorati_jet_mode jet_mode(const Options& o) {
  if (o.jet == "analytic") return CASORATI_JET_ANALYTIC;
  if (o.jet == "numeric") return CASORATI_JET_NUMERIC;
  invalid("--jet must be analytic or numeric");
}

double geometric_tol(const Options& o) {
  if (o.tol_geometric > 0.0) return o.tol_geometric;
  return jet_mode(o) == CASORATI_JET_NUMERIC ? 1e-5 : 1e-7;
}

int thread_count(const Options& o) {
  if (o.threads > 0) return o.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Charts and points --------------------------------------------------------

struct ChartInfo {
  ChartPtr chart;
  int n = 0, p = 0;
  std::vector<std::string> coords;
  std::vector<double> lower, upper;
};

ChartInfo open_chart(const std::string& name, const std::string& params, casorati_jet_mode mode) {
  ChartInfo info;
  casorati_chart* raw = nullptr;
  check(casorati_chart_create(name.c_str(), params.c_str(), mode, &raw));
  info.chart.reset(raw);
  check(casorati_chart_dims(raw, &info.n, &info.p));
  info.lower.resize(static_cast<std::size_t>(info.n));
  info.upper.resize(static_cast<std::size_t>(info.n));
  check(casorati_chart_domain(raw, info.lower.data(), info.upper.data()));
  for (int i = 0; i < info.n; ++i) {
    const char* c = nullptr;
    check(casorati_chart_coordinate(raw, i, &c));
    info.coords.emplace_back(c);
  }
  return info;
}

std::map<std::string, double> parse_assignments(const std::string& text, const std::string& what);

// Parameter names with their defaults, in catalog order.
std::vector<std::pair<std::string, double>> param_defaults(const std::string& chart) {
  for (size_t i = 0; i < casorati_catalog_size(); ++i) {
    const char *name = nullptr, *desc = nullptr, *defaults = nullptr;
    check(casorati_catalog_entry(i, &name, &desc, &defaults));
    if (chart != name) continue;
    const auto values = parse_assignments(defaults, "defaults");
    std::vector<std::pair<std::string, double>> out;
    for (const auto& kv : split(defaults, ',')) {
      const std::string key = kv.substr(0, kv.find('='));
      out.emplace_back(key, values.at(key));
    }
    return out;
  }
  invalid("unknown chart '" + chart + "'");
}

std::vector<std::string> param_keys(const std::string& chart) {
  std::vector<std::string> keys;
  for (const auto& kv : param_defaults(chart)) keys.push_back(kv.first);
  return keys;
}

std::map<std::string, double> parse_assignments(const std::string& text, const std::string& what) {
  std::map<std::string, double> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) invalid(what + ": expected name=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    if (out.contains(key)) invalid(what + ": '" + key + "' given twice");
    out[key] = parse_number(item.substr(eq + 1), what);
  }
  return out;
}

std::string join_assignments(const std::map<std::string, double>& m) {
  std::string s;
  for (const auto& [k, v] : m) s += (s.empty() ? "" : ",") + k + "=" + fmt(v);
  return s;
}

// "t=0.8,u=0.3" (any subset, named) or "0.8,0.3,1.1" (all, positional).
std::vector<double> resolve_point(const ChartInfo& chart, const std::string& text, bool require_all) {
  std::vector<double> x(static_cast<std::size_t>(chart.n));
  std::vector<bool> set(x.size(), false);
  for (int i = 0; i < chart.n; ++i)
    x[static_cast<std::size_t>(i)] = 0.5 * (chart.lower[static_cast<std::size_t>(i)] + chart.upper[static_cast<std::size_t>(i)]);
  if (!text.empty()) {
    if (text.find('=') == std::string::npos) {
      const auto parts = split(text, ',');
      if (static_cast<int>(parts.size()) != chart.n)
        invalid("--point has " + std::to_string(parts.size()) + " values, chart has " + std::to_string(chart.n) + " coordinates");
      for (std::size_t i = 0; i < parts.size(); ++i) {
        x[i] = parse_number(parts[i], "--point");
        set[i] = true;
      }
    } else {
      for (const auto& [k, v] : parse_assignments(text, "--point")) {
        const auto it = std::find(chart.coords.begin(), chart.coords.end(), k);
        if (it == chart.coords.end()) invalid("--point: chart has no coordinate '" + k + "'");
        const auto i = static_cast<std::size_t>(it - chart.coords.begin());
        x[i] = v;
        set[i] = true;
      }
    }
  }
  if (require_all)
    for (std::size_t i = 0; i < set.size(); ++i)
      if (!set[i]) invalid("--point is missing coordinate '" + chart.coords[i] + "'");
  return x;
}

// Reports ------------------------------------------------------------------

struct Evaluation {
  std::string status = "ok";  // ok | inadmissible | ill_conditioned | numerical_failure | invalid
  std::string message;
  casorati_report report{};
  std::optional<double> frame_condition;
  std::optional<casorati_gauss_check> gauss;
  std::vector<double> h;  // p * n * n, row-major
  double classification_tol = 0.0;
};

std::string status_name(casorati_status s) {
  switch (s) {
    case CASORATI_ERR_INVALID: return "invalid";
    case CASORATI_ERR_ILL_CONDITIONED: return "ill_conditioned";
    default: return "numerical_failure";
  }
}

std::vector<double> form_data(const casorati_second_form* h) {
  int n = 0, p = 0;
  check(casorati_second_form_dims(h, &n, &p));
  std::vector<double> data(static_cast<std::size_t>(p * n * n));
  check(casorati_second_form_data(h, data.data()));
  return data;
}

Evaluation evaluate_chart_point(const casorati_chart* chart, const std::vector<double>& x, double max_condition,
                                bool with_gauss) {
  Evaluation e;
  e.classification_tol = kChartClassificationTol;
  const int n = static_cast<int>(x.size());
  casorati_domain_verdict verdict;
  check(casorati_chart_domain_check(chart, x.data(), n, &verdict));
  if (!verdict.admissible) {
    e.status = "inadmissible";
    e.message = verdict.reason;
    return e;
  }
  casorati_second_form* raw = nullptr;
  double cond = 0.0;
  casorati_status s = casorati_chart_second_form(chart, x.data(), n, max_condition, &raw, &cond);
  FormPtr h(raw);
  if (s == CASORATI_OK) s = casorati_invariant_report(h.get(), 0.0, e.classification_tol, &e.report);
  if (s == CASORATI_OK && with_gauss) {
    casorati_gauss_check g;
    s = casorati_chart_gauss_check(chart, x.data(), n, max_condition, &g);
    if (s == CASORATI_OK) e.gauss = g;
  }
  if (s != CASORATI_OK) {
    e.status = status_name(s);
    e.message = casorati_last_error();
    return e;
  }
  e.frame_condition = cond;
  e.h = form_data(h.get());
  return e;
}

struct SyntheticInput {
  int n = 0, p = 0;
  double c_tilde = 0.0;
  std::vector<double> h;
  std::optional<double> classification_tol;
};

Evaluation evaluate_synthetic(const SyntheticInput& in, double tol) {
  Evaluation e;
  e.classification_tol = tol;
  casorati_second_form* raw = nullptr;
  check(casorati_second_form_create(in.n, in.p, in.h.data(), &raw));
  FormPtr h(raw);
  const casorati_status s = casorati_invariant_report(h.get(), in.c_tilde, tol, &e.report);
  if (s != CASORATI_OK) {
    e.status = status_name(s);
    e.message = casorati_last_error();
    return e;
  }
  e.h = in.h;
  return e;
}

const std::vector<std::string> kReportColumns = {"n",   "p",   "c_tilde",   "C",       "inf_CL",
                                                  "sup_CL", "mean_H", "tau", "rho", "delta_hat",
                                                  "delta_C", "delta_c_legacy", "slack_11", "slack_41",
                                                  "classification", "frame_condition"};

json report_json(const Evaluation& e) {
  const casorati_report& r = e.report;
  json j;
  j["n"] = r.n;
  j["p"] = r.p;
  j["c_tilde"] = r.c_tilde;
  j["C"] = r.casorati;
  j["inf_CL"] = r.inf_cl;
  j["sup_CL"] = r.sup_cl;
  j["mean_H"] = r.mean_h;
  j["tau"] = r.tau;
  j["rho"] = r.rho;
  j["delta_hat"] = r.delta_hat;
  j["delta_C"] = r.delta_C;
  j["delta_c_legacy"] = r.delta_c_legacy;
  j["slack_11"] = r.slack_11;
  j["slack_41"] = r.slack_41;
  j["classification"] = casorati_ideal_kind_name(r.classification);
  j["frame_condition"] = e.frame_condition ? json(*e.frame_condition) : json(nullptr);
  j["lambda"] = r.lambda;
  j["single_normal"] = r.single_normal != 0;
  j["quasi_umbilical"] = r.quasi_umbilical != 0;
  j["classification_tol"] = e.classification_tol;
  if (e.gauss) {
    j["tau_intrinsic"] = e.gauss->tau_intrinsic;
    j["gauss_residual"] = e.gauss->residual;
  }
  json h = json::array();
  const int n = r.n;
  for (int k = 0; k < r.p; ++k) {
    json m = json::array();
    for (int i = 0; i < n; ++i) {
      json row = json::array();
      for (int c = 0; c < n; ++c) row.push_back(e.h[static_cast<std::size_t>((k * n + i) * n + c)]);
      m.push_back(row);
    }
    h.push_back(m);
  }
  j["h"] = h;
  return j;
}

std::vector<std::string> report_cells(const Evaluation& e) {
  if (e.status != "ok") return std::vector<std::string>(kReportColumns.size(), "");
  const casorati_report& r = e.report;
  return {std::to_string(r.n),    std::to_string(r.p),  fmt(r.c_tilde),  fmt(r.casorati),
          fmt(r.inf_cl),          fmt(r.sup_cl),        fmt(r.mean_h),   fmt(r.tau),
          fmt(r.rho),             fmt(r.delta_hat),     fmt(r.delta_C),  fmt(r.delta_c_legacy),
          fmt(r.slack_11),        fmt(r.slack_41),      casorati_ideal_kind_name(r.classification),
          e.frame_condition ? fmt(*e.frame_condition) : ""};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + csv_escape(cells[i]);
  return line + "\n";
}

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) invalid("cannot open output file '" + o.output + "'");
  out << text;
}

// Synthetic input ----------------------------------------------------------

SyntheticInput parse_synthetic(const json& j, std::size_t index) {
  const std::string where = "synthetic input " + std::to_string(index);
  if (!j.is_object()) invalid(where + ": expected an object");
  SyntheticInput in;
  try {
    in.n = j.at("n").get<int>();
    in.p = j.at("p").get<int>();
    in.c_tilde = j.value("c_tilde", 0.0);
    if (j.contains("classification_tol") && j["classification_tol"].is_number())
      in.classification_tol = j["classification_tol"].get<double>();
    const json& h = j.at("h");
    if (!h.is_array() || static_cast<int>(h.size()) != in.p) invalid(where + ": h must hold p matrices");
    for (const json& m : h) {
      if (!m.is_array() || static_cast<int>(m.size()) != in.n) invalid(where + ": each matrix must have n rows");
      for (const json& row : m) {
        if (!row.is_array() || static_cast<int>(row.size()) != in.n) invalid(where + ": each row must have n entries");
        for (const json& v : row) in.h.push_back(v.get<double>());
      }
    }
  } catch (const json::exception& e) {
    invalid(where + ": " + e.what());
  }
  if (in.n < 1 || in.p < 1) invalid(where + ": n and p must be positive");
  if (!std::isfinite(in.c_tilde)) invalid(where + ": c_tilde must be finite");
  return in;
}

std::vector<SyntheticInput> load_synthetic(const std::string& path) {
  std::ifstream file(path);
  if (!file) invalid("cannot read synthetic input '" + path + "'");
  json doc;
  try {
    doc = json::parse(file);
  } catch (const json::exception& e) {
    invalid("synthetic input '" + path + "' is not valid JSON: " + e.what());
  }
  std::vector<SyntheticInput> inputs;
  const json* list = &doc;
  if (doc.is_object() && doc.contains("inputs")) list = &doc["inputs"];
  if (list->is_array()) {
    for (std::size_t i = 0; i < list->size(); ++i) inputs.push_back(parse_synthetic((*list)[i], i));
  } else {
    inputs.push_back(parse_synthetic(*list, 0));
  }
  if (inputs.empty()) invalid("synthetic input '" + path + "' is empty");
  return inputs;
}

void apply_overrides(std::vector<SyntheticInput>& inputs, const Options& o) {
  if (!o.c_tilde_given) return;
  for (auto& in : inputs) in.c_tilde = o.c_tilde;
}

double synthetic_tol(const SyntheticInput& in, const Options& o) {
  if (!o.tol_algebraic_given && in.classification_tol) return *in.classification_tol;
  return o.tol_algebraic;
}

std::vector<SyntheticInput> random_corpus(long long count, unsigned long long seed, double c_tilde) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::vector<SyntheticInput> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    SyntheticInput in;
    in.n = 3 + static_cast<int>(rng() % 4);
    in.p = 1 + static_cast<int>(rng() % 3);
    in.c_tilde = c_tilde;
    in.h.assign(static_cast<std::size_t>(in.p * in.n * in.n), 0.0);
    for (int r = 0; r < in.p; ++r)
      for (int a = 0; a < in.n; ++a)
        for (int b = a; b < in.n; ++b) {
          const double v = entry(rng);
          in.h[static_cast<std::size_t>((r * in.n + a) * in.n + b)] = v;
          in.h[static_cast<std::size_t>((r * in.n + b) * in.n + a)] = v;
        }
    out.push_back(std::move(in));
  }
  return out;
}

// Grids --------------------------------------------------------------------

struct GridAxis {
  std::string name;
  double lo = 0.0, hi = 0.0;
  long long count = 1;
  bool is_param = false;
  double at(long long i) const { return count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1); }
};

std::vector<GridAxis> parse_grids(const Options& o, const ChartInfo& base) {
  const auto keys = param_keys(o.chart);
  std::vector<GridAxis> axes;
  long long total = 1;
  for (const auto& spec : o.grids) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) invalid("--grid: expected name=lo:hi:count, got '" + spec + "'");
    GridAxis a;
    a.name = spec.substr(0, eq);
    const auto parts = split(spec.substr(eq + 1), ':');
    if (parts.size() != 3) invalid("--grid: expected name=lo:hi:count, got '" + spec + "'");
    a.lo = parse_number(parts[0], "--grid " + a.name);
    a.hi = parse_number(parts[1], "--grid " + a.name);
    const double count = parse_number(parts[2], "--grid " + a.name);
    if (count < 1 || count != std::floor(count) || count > static_cast<double>(kMaxGridPoints))
      invalid("--grid " + a.name + ": count must be an integer in [1, 1e6]");
    if (a.hi < a.lo) invalid("--grid " + a.name + ": upper bound below lower bound");
    a.count = static_cast<long long>(count);
    const bool is_coord = std::find(base.coords.begin(), base.coords.end(), a.name) != base.coords.end();
    a.is_param = std::find(keys.begin(), keys.end(), a.name) != keys.end();
    if (!is_coord && !a.is_param) invalid("--grid: '" + a.name + "' is neither a coordinate nor a parameter of " + o.chart);
    for (const auto& other : axes)
      if (other.name == a.name) invalid("--grid: '" + a.name + "' given twice");
    total *= a.count;
    if (total > kMaxGridPoints) invalid("--grid: more than 1e6 points");
    axes.push_back(a);
  }
  if (axes.empty()) invalid("at least one --grid axis is required");
  return axes;
}

long long grid_size(const std::vector<GridAxis>& axes) {
  long long total = 1;
  for (const auto& a : axes) total *= a.count;
  return total;
}

// First axis varies slowest.
std::vector<double> grid_values(const std::vector<GridAxis>& axes, long long index) {
  std::vector<double> v(axes.size());
  for (std::size_t i = axes.size(); i-- > 0;) {
    v[i] = axes[i].at(index % axes[i].count);
    index /= axes[i].count;
  }
  return v;
}

struct GridRow {
  std::map<std::string, double> params;
  std::vector<std::string> coords;
  std::vector<double> x;
  Evaluation eval;
};

template <class F>
void parallel_for(long long count, int threads, F&& body) {
  std::atomic<long long> next{0};
  auto worker = [&] {
    for (long long i = next++; i < count; i = next++) body(i);
  };
  const int t = static_cast<int>(std::min<long long>(threads, std::max<long long>(count, 1)));
  std::vector<std::thread> pool;
  for (int k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

std::vector<GridRow> run_grid(const Options& o, bool with_gauss) {
  const casorati_jet_mode mode = jet_mode(o);
  const auto base_params = parse_assignments(o.params, "--param");
  const ChartInfo base = open_chart(o.chart, join_assignments(base_params), mode);
  const auto axes = parse_grids(o, base);
  const long long total = grid_size(axes);

  // Charts per distinct parameter set, created up front so workers share them.
  std::map<std::map<std::string, double>, std::shared_ptr<ChartInfo>> charts;
  std::vector<GridRow> rows(static_cast<std::size_t>(total));
  for (long long i = 0; i < total; ++i) {
    const auto values = grid_values(axes, i);
    GridRow& row = rows[static_cast<std::size_t>(i)];
    row.params = base_params;
    for (std::size_t a = 0; a < axes.size(); ++a)
      if (axes[a].is_param) row.params[axes[a].name] = values[a];
    auto& slot = charts[row.params];
    if (!slot) {
      try {
        slot = std::make_shared<ChartInfo>(open_chart(o.chart, join_assignments(row.params), mode));
      } catch (const CliError& e) {
        invalid("grid parameters " + join_assignments(row.params) + ": " + e.message);
      }
    }
    const ChartInfo& chart = *slot;
    row.coords = chart.coords;
    row.x = resolve_point(chart, o.point, false);
    for (std::size_t a = 0; a < axes.size(); ++a) {
      if (axes[a].is_param) continue;
      const auto it = std::find(chart.coords.begin(), chart.coords.end(), axes[a].name);
      if (it == chart.coords.end()) invalid("--grid: chart has no coordinate '" + axes[a].name + "'");
      row.x[static_cast<std::size_t>(it - chart.coords.begin())] = values[a];
    }
  }

  parallel_for(total, thread_count(o), [&](long long i) {
    GridRow& row = rows[static_cast<std::size_t>(i)];
    const ChartInfo& chart = *charts.at(row.params);
    try {
      row.eval = evaluate_chart_point(chart.chart.get(), row.x, o.max_condition, with_gauss);
    } catch (const CliError& e) {
      row.eval.status = e.code == kExitInvalid ? "invalid" : "numerical_failure";
      row.eval.message = e.message;
    }
  });
  return rows;
}

// Commands -----------------------------------------------------------------

void require_single_source(const Options& o) {
  if (o.chart.empty() == o.synthetic.empty()) invalid("give exactly one of --chart or --synthetic");
  if (!o.chart.empty() && o.c_tilde_given && o.c_tilde != 0.0)
    invalid("numeric charts live in Euclidean space; --c-tilde must be 0 with --chart");
}

std::string default_format(const Options& o, const std::string& fallback) {
  if (o.format.empty()) return fallback;
  if (o.format != "json" && o.format != "csv") invalid("--format must be json or csv");
  return o.format;
}

int cmd_catalog(const Options& o) {
  const std::string format = default_format(o, "json");
  json list = json::array();
  std::string csv = csv_line({"name", "n", "p", "coordinates", "defaults", "description"});
  for (size_t i = 0; i < casorati_catalog_size(); ++i) {
    const char *name = nullptr, *desc = nullptr, *defaults = nullptr;
    check(casorati_catalog_entry(i, &name, &desc, &defaults));
    const ChartInfo info = open_chart(name, "", CASORATI_JET_ANALYTIC);
    json entry;
    entry["name"] = name;
    entry["n"] = info.n;
    entry["p"] = info.p;
    entry["coordinates"] = info.coords;
    entry["defaults"] = json::object();
    for (const auto& [k, v] : parse_assignments(defaults, "defaults")) entry["defaults"][k] = v;
    entry["description"] = desc;
    list.push_back(entry);
    std::string coords;
    for (const auto& c : info.coords) coords += (coords.empty() ? "" : ";") + c;
    csv += csv_line({name, std::to_string(info.n), std::to_string(info.p), coords, defaults, desc});
  }
  emit(o, format == "json" ? list.dump(2) + "\n" : csv);
  return kExitOk;
}

int cmd_report(const Options& o) {
  require_single_source(o);
  const std::string format = default_format(o, "json");
  std::vector<Evaluation> evals;
  json context;
  if (!o.chart.empty()) {
    const ChartInfo chart = open_chart(o.chart, o.params, jet_mode(o));
    const auto x = resolve_point(chart, o.point, true);
    Evaluation e = evaluate_chart_point(chart.chart.get(), x, o.max_condition, false);
    if (e.status == "inadmissible") throw CliError{kExitNumerical, "inadmissible point: " + e.message};
    if (e.status != "ok") throw CliError{e.status == "invalid" ? kExitInvalid : kExitNumerical, e.message};
    context["chart"] = o.chart;
    context["params"] = json::object();
    for (const auto& [k, v] : parse_assignments(o.params, "--param")) context["params"][k] = v;
    context["jet"] = o.jet;
    context["point"] = json::object();
    for (int i = 0; i < chart.n; ++i) context["point"][chart.coords[static_cast<std::size_t>(i)]] = x[static_cast<std::size_t>(i)];
    evals.push_back(std::move(e));
  } else {
    auto inputs = load_synthetic(o.synthetic);
    apply_overrides(inputs, o);
    for (const auto& in : inputs) {
      Evaluation e = evaluate_synthetic(in, synthetic_tol(in, o));
      if (e.status != "ok") throw CliError{e.status == "invalid" ? kExitInvalid : kExitNumerical, e.message};
      evals.push_back(std::move(e));
    }
  }

  if (format == "csv") {
    std::string out = csv_line(kReportColumns);
    for (const auto& e : evals) out += csv_line(report_cells(e));
    emit(o, out);
    return kExitOk;
  }
  json docs = json::array();
  for (const auto& e : evals) {
    json j = report_json(e);
    if (!context.is_null()) j["source"] = context;
    docs.push_back(j);
  }
  emit(o, (docs.size() == 1 ? docs[0] : docs).dump(2) + "\n");
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  if (o.chart.empty()) invalid("sweep needs --chart");
  require_single_source(o);
  const std::string format = default_format(o, "csv");
  const auto rows = run_grid(o, false);
  const auto defaults = param_defaults(o.chart);

  if (format == "json") {
    json list = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const GridRow& r = rows[i];
      json j;
      j["index"] = i;
      j["params"] = json::object();
      for (const auto& [k, v] : r.params) j["params"][k] = v;
      j["point"] = json::object();
      for (std::size_t c = 0; c < r.coords.size(); ++c) j["point"][r.coords[c]] = r.x[c];
      j["status"] = r.eval.status;
      if (!r.eval.message.empty()) j["message"] = r.eval.message;
      if (r.eval.status == "ok") j["report"] = report_json(r.eval);
      list.push_back(j);
    }
    emit(o, list.dump(2) + "\n");
    return kExitOk;
  }

  // Coordinates keep their names unless a dimension sweep changes them; then they are positional.
  std::size_t width = 0;
  bool same_coords = true;
  for (const auto& r : rows) {
    width = std::max(width, r.x.size());
    same_coords = same_coords && r.coords == rows.front().coords;
  }
  std::vector<std::string> header = {"index"};
  for (const auto& kv : defaults) header.push_back("param_" + kv.first);
  for (std::size_t c = 0; c < width; ++c) header.push_back(same_coords ? rows.front().coords[c] : "x" + std::to_string(c + 1));
  header.push_back("status");
  header.insert(header.end(), kReportColumns.begin(), kReportColumns.end());
  header.push_back("message");
  std::string out = csv_line(header);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const GridRow& r = rows[i];
    std::vector<std::string> cells = {std::to_string(i)};
    for (const auto& [k, v] : defaults) {
      const auto it = r.params.find(k);
      cells.push_back(fmt(it == r.params.end() ? v : it->second));
    }
    for (std::size_t c = 0; c < width; ++c) cells.push_back(c < r.x.size() ? fmt(r.x[c]) : "");
    cells.push_back(r.eval.status);
    const auto rep = report_cells(r.eval);
    cells.insert(cells.end(), rep.begin(), rep.end());
    cells.push_back(r.eval.message);
    out += csv_line(cells);
  }
  emit(o, out);
  return kExitOk;
}

struct Finding {
  std::string label;
  double slack11 = 0.0, slack41 = 0.0, residual = 0.0;
};

int cmd_verify(const Options& o) {
  const int sources = !o.chart.empty() + !o.synthetic.empty() + (o.random > 0);
  if (sources != 1) invalid("give exactly one of --chart, --synthetic or --random");
  if (!o.chart.empty() && o.c_tilde_given && o.c_tilde != 0.0)
    invalid("numeric charts live in Euclidean space; --c-tilde must be 0 with --chart");
  if (o.random < 0) invalid("--random must be positive");

  std::vector<Finding> findings;
  std::size_t skipped = 0;
  std::string first_skip;
  const bool chart_mode = !o.chart.empty();
  const double tol_geo = geometric_tol(o);

  if (chart_mode) {
    std::vector<GridRow> rows;
    if (o.grids.empty()) {
      const ChartInfo chart = open_chart(o.chart, o.params, jet_mode(o));
      GridRow r;
      r.x = resolve_point(chart, o.point, true);
      r.coords = chart.coords;
      r.eval = evaluate_chart_point(chart.chart.get(), r.x, o.max_condition, true);
      if (r.eval.status == "inadmissible") throw CliError{kExitNumerical, "inadmissible point: " + r.eval.message};
      if (r.eval.status != "ok") throw CliError{r.eval.status == "invalid" ? kExitInvalid : kExitNumerical, r.eval.message};
      rows.push_back(std::move(r));
    } else {
      rows = run_grid(o, true);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const GridRow& r = rows[i];
      if (r.eval.status != "ok") {
        if (skipped++ == 0) first_skip = r.eval.status + ": " + r.eval.message;
        continue;
      }
      std::string label = "#" + std::to_string(i);
      for (const auto& [k, v] : r.params) label += " " + k + "=" + fmt(v);
      for (std::size_t c = 0; c < r.x.size(); ++c) label += " " + r.coords[c] + "=" + fmt(r.x[c]);
      findings.push_back({label, r.eval.report.slack_11, r.eval.report.slack_41, r.eval.gauss->residual});
    }
  } else {
    auto inputs = o.random > 0 ? random_corpus(o.random, o.seed, o.c_tilde) : load_synthetic(o.synthetic);
    if (o.random == 0) apply_overrides(inputs, o);
    // Creation errors (bad shapes, asymmetric input) abort with their exit code.
    for (const auto& in : inputs) {
      casorati_second_form* raw = nullptr;
      check(casorati_second_form_create(in.n, in.p, in.h.data(), &raw));
      casorati_second_form_destroy(raw);
    }
    std::vector<Evaluation> evals(inputs.size());
    parallel_for(static_cast<long long>(inputs.size()), thread_count(o), [&](long long i) {
      const auto& in = inputs[static_cast<std::size_t>(i)];
      evals[static_cast<std::size_t>(i)] = evaluate_synthetic(in, synthetic_tol(in, o));
    });
    for (std::size_t i = 0; i < evals.size(); ++i) {
      if (evals[i].status != "ok") {
        if (evals[i].status == "invalid") throw CliError{kExitInvalid, evals[i].message};
        if (skipped++ == 0) first_skip = evals[i].status + ": " + evals[i].message;
        continue;
      }
      const auto& in = inputs[i];
      findings.push_back({"#" + std::to_string(i) + " n=" + std::to_string(in.n) + " p=" + std::to_string(in.p) +
                              " c_tilde=" + fmt(in.c_tilde),
                          evals[i].report.slack_11, evals[i].report.slack_41, 0.0});
    }
  }

  if (findings.empty()) throw CliError{kExitNumerical, "no input could be evaluated (" + first_skip + ")"};

  std::vector<const Finding*> violations;
  for (const auto& f : findings)
    if (f.slack11 < -o.tol_algebraic || f.slack41 < -o.tol_algebraic || f.residual > tol_geo) violations.push_back(&f);

  auto worst_by = [&](auto key) {
    return &*std::min_element(findings.begin(), findings.end(), [&](const Finding& a, const Finding& b) { return key(a) < key(b); });
  };
  const Finding* w11 = worst_by([](const Finding& f) { return f.slack11; });
  const Finding* w41 = worst_by([](const Finding& f) { return f.slack41; });
  const Finding* wres = worst_by([](const Finding& f) { return -f.residual; });

  std::ostringstream out;
  out << "checked " << findings.size() << " inputs, skipped " << skipped << "\n";
  if (skipped) out << "first skipped: " << first_skip << "\n";
  out << "tolerances: algebraic " << fmt(o.tol_algebraic);
  if (chart_mode) out << ", geometric " << fmt(tol_geo);
  out << "\n";
  out << "min slack_11 " << fmt(w11->slack11) << " at " << w11->label << "\n";
  out << "min slack_41 " << fmt(w41->slack41) << " at " << w41->label << "\n";
  if (chart_mode) out << "max gauss residual " << fmt(wres->residual) << " at " << wres->label << "\n";
  if (violations.empty()) {
    out << "PASS\n";
  } else {
    out << "FAIL: " << violations.size() << " violations\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(violations.size(), 10); ++i) {
      const Finding& f = *violations[i];
      out << "  " << f.label << " slack_11=" << fmt(f.slack11) << " slack_41=" << fmt(f.slack41);
      if (chart_mode) out << " gauss_residual=" << fmt(f.residual);
      out << "\n";
    }
  }
  emit(o, out.str());
  return violations.empty() ? kExitOk : kExitViolation;
}

int cmd_qp(const Options& o) {
  casorati_qp_variant variant;
  if (o.variant == "P" || o.variant == "p") {
    variant = CASORATI_QP_P;
  } else if (o.variant == "Q" || o.variant == "q") {
    variant = CASORATI_QP_Q;
  } else {
    invalid("--variant must be P or Q");
  }
  if (o.qp_n < 3) invalid("qp needs --n >= 3");
  casorati_qp_solution s;
  std::vector<double> point(static_cast<std::size_t>(o.qp_n));
  check(casorati_qp_solve(variant, o.qp_n, o.qp_k, &s, point.data()));
  const std::string format = default_format(o, "json");
  if (format == "csv") {
    std::vector<std::string> header = {"variant", "n", "k", "t", "value", "min_restricted_hessian_eig"};
    std::vector<std::string> row = {variant == CASORATI_QP_P ? "P" : "Q", std::to_string(s.n), fmt(s.k), fmt(s.t),
                                    fmt(s.value), fmt(s.min_restricted_hessian_eig)};
    for (int i = 0; i < o.qp_n; ++i) {
      header.push_back("x" + std::to_string(i + 1));
      row.push_back(fmt(point[static_cast<std::size_t>(i)]));
    }
    emit(o, csv_line(header) + csv_line(row));
    return kExitOk;
  }
  json j;
  j["variant"] = variant == CASORATI_QP_P ? "P" : "Q";
  j["n"] = s.n;
  j["k"] = s.k;
  j["point"] = point;
  j["t"] = s.t;
  j["value"] = s.value;
  j["min_restricted_hessian_eig"] = s.min_restricted_hessian_eig;
  emit(o, j.dump(2) + "\n");
  return kExitOk;
}

void add_source_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--chart", o.chart, "catalog chart name");
  cmd->add_option("--param", o.params, "chart parameters, e.g. R=1,n=3");
  cmd->add_option("--point", o.point, "chart point: t=0.8,u=0.3,v=1.1 or 0.8,0.3,1.1");
  cmd->add_option("--jet", o.jet, "analytic or numeric")->check(CLI::IsMember({"analytic", "numeric"}));
  cmd->add_option("--max-condition", o.max_condition, "largest accepted metric condition number")
      ->check(CLI::PositiveNumber);
}

void add_output_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--output", o.output, "write to this file instead of standard output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casorati curvature invariants of submanifolds"};
  app.require_subcommand(1);
  Options o;

  auto* catalog = app.add_subcommand("catalog", "list the chart catalog");
  add_output_options(catalog, o);

  auto* report = app.add_subcommand("report", "invariant report for one point or synthetic input");
  add_source_options(report, o);
  add_output_options(report, o);
  report->add_option("--synthetic", o.synthetic, "JSON file {n, p, c_tilde, h}");
  report->add_option("--tol-algebraic", o.tol_algebraic, "classification tolerance for synthetic input")
      ->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "reports over a grid of points or parameters");
  add_source_options(sweep, o);
  add_output_options(sweep, o);
  sweep->add_option("--grid", o.grids, "name=lo:hi:count over a coordinate or parameter (repeatable)");
  sweep->add_option("--threads", o.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "check both inequalities and the Gauss equation");
  add_source_options(verify, o);
  verify->add_option("--output", o.output, "write the summary to this file");
  verify->add_option("--synthetic", o.synthetic, "JSON file with one input or a list of inputs");
  verify->add_option("--grid", o.grids, "name=lo:hi:count over a coordinate or parameter (repeatable)");
  verify->add_option("--random", o.random, "random synthetic corpus of this size");
  verify->add_option("--seed", o.seed, "seed for --random");
  verify->add_option("--tol-algebraic", o.tol_algebraic, "slack tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--tol-geometric", o.tol_geometric, "Gauss residual tolerance (default 1e-7 analytic, 1e-5 numeric)")
      ->check(CLI::PositiveNumber);
  verify->add_option("--threads", o.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);

  for (auto* cmd : {report, sweep, verify})
    cmd->add_option("--c-tilde", o.c_tilde, "ambient curvature (synthetic input only)");

  auto* qp = app.add_subcommand("qp", "closed-form trace-constrained quadratic program");
  qp->add_option("--variant", o.variant, "P or Q");
  qp->add_option("--n", o.qp_n, "dimension")->required();
  qp->add_option("--k", o.qp_k, "trace constraint value")->required();
  add_output_options(qp, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  for (auto* cmd : {report, sweep, verify}) {
    if (!cmd->parsed()) continue;
    o.c_tilde_given = cmd->count("--c-tilde") > 0;
    if (cmd != sweep) o.tol_algebraic_given = cmd->count("--tol-algebraic") > 0;
  }
  if (!std::isfinite(o.c_tilde)) {
    std::cerr << "error: --c-tilde must be finite\n";
    return kExitInvalid;
  }

  try {
    if (catalog->parsed()) return cmd_catalog(o);
    if (report->parsed()) return cmd_report(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (verify->parsed()) return cmd_verify(o);
    if (qp->parsed()) return cmd_qp(o);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInvalid;
}
