#include "paving_lab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "paving_lab/frames.hpp"
#include "paving_lab/laurent.hpp"
#include "paving_lab/matrix_io.hpp"
#include "paving_lab/random.hpp"
#include "paving_lab/transforms.hpp"

namespace paving_lab {

namespace {

using nlohmann::json;

constexpr double kNormTol = 1e-9;

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_uint(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s.front() == '-') {
    throw std::invalid_argument(std::string(what) + ": '" + s + "' is not a non-negative integer");
  }
  return v;
}

// splitmix64 finalizer; derives independent per-row seeds from the config seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string join_residues(std::span<const std::size_t> d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s;
}

std::string signs_string(const SymmetryVector& s) {
  std::string out;
  for (int v : s.signs()) out += v > 0 ? '+' : '-';
  return out;
}

SymmetryVector signs_from_string(const std::string& s) {
  std::vector<int> v;
  for (char c : s) {
    if (c != '+' && c != '-') throw std::invalid_argument("sign string may only contain '+' and '-'");
    v.push_back(c == '+' ? 1 : -1);
  }
  return SymmetryVector(std::move(v));
}

json labels_json(const Partition& p) { return p.labels(); }

Partition partition_from_json(const json& labels) {
  return Partition::from_labels(labels.get<std::vector<std::size_t>>());
}

double max_abs_diag(const Matrix& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) d = std::max(d, std::abs(m(i, i)));
  return d;
}

// |g_ij|^2 off the diagonal.
Matrix weight_matrix(const Matrix& g) {
  Matrix w(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) w(i, j) = i == j ? 0.0 : std::norm(g(i, j));
  return w;
}

json int_json(__int128 v) {
  if (v >= INT64_MIN && v <= INT64_MAX) return static_cast<std::int64_t>(v);
  return int128_to_string(v);
}

// Known verdicts of the Conjecture A inequality (k-1) n^2 > 4 k^2 (n-1).
const std::map<std::pair<std::size_t, std::size_t>, bool>& expected_verdicts() {
  static const std::map<std::pair<std::size_t, std::size_t>, bool> table = {
      {{7, 3}, false}, {{13, 4}, false}, {{21, 5}, false}, {{31, 6}, true}, {{57, 8}, true}, {{276, 23}, true}};
  return table;
}

std::vector<std::size_t> harmonic_residues(std::size_t n, std::size_t k) {
  const auto found = find_difference_set(n, k);
  if (found.status == DifferenceSetStatus::kFound) return found.set->elements;
  std::vector<std::size_t> d(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = i;
  return d;
}

// ---------------------------------------------------------------- registry

std::vector<ExperimentInfo> build_registry() {
  return {
      {"E1", "paving-bounds",
       "conference lower bound and big-block certificates against best pavings of Paley conference families", 1,
       {"row", "family", "matrix", "n", "k", "r", "method", "seed", "partition", "epsilon", "bound_kind", "bound"},
       {{"orders", {6, 14}}, {"r", 2}, {"strategy", "auto"}, {"restarts", 64}}},
      {"E2", "conjectureA-scan",
       "integer certificates of (k-1) n^2 > 4 k^2 (n-1) over Singer parameters and sampled symmetry norms", 1,
       {"row", "kind", "q", "n", "k", "lhs", "rhs", "counterexample", "expected", "matrix", "seed", "samples", "signs",
        "min_norm", "threshold"},
       {{"singer_q", {2, 3, 4, 5, 7}}, {"pairs", {{276, 23}}}, {"sample_q", 5}, {"samples", nullptr}}},
      {"E3", "conjectureB-trace", "BHKW partitions and the cross-block trace bound on harmonic frames", 1,
       {"row", "matrix", "n", "k", "r", "partition", "violation", "r_size", "trace_matrix", "trace_sum", "discrepancy",
        "final_bound"},
       {{"frames", {{8, 2}, {16, 4}, {31, 6}}}, {"r", 2}}},
      {"E4", "laurent-truncation", "best pavings of truncated Laurent reflections against the truncation size", 1,
       {"row", "matrix", "stage", "N", "r", "method", "seed", "partition", "epsilon", "norm", "diag_max",
        "bidensity_certified"},
       {{"stages", {1, 2, 3}}, {"N", {4, 8, 16}}, {"r", 2}, {"restarts", 8}}},
      {"E5", "class-equivalences", "reflection/projection round trips, dilation and paving transfer", 1,
       {"row", "n", "reflection", "contraction", "roundtrip_defect", "square_defect", "dilation_square_defect",
        "corner_defect", "dilation_partition", "dilation_epsilon", "restricted_epsilon", "p_partition", "pneg_partition",
        "combine_level", "combined_epsilon"},
       {{"count", 20}, {"max_n", 6}, {"r", 2}}},
  };
}

std::string registry_listing() {
  std::string s;
  for (const auto& e : experiment_registry()) s += "\n  " + e.id + "  " + e.name;
  return s;
}

json merged_params(const ExperimentInfo& info, const json& user) {
  json params = info.defaults;
  if (!user.is_object()) throw std::invalid_argument("experiment parameters must be a JSON object");
  for (const auto& [key, value] : user.items()) {
    if (!params.contains(key)) {
      std::string known;
      for (const auto& [k, v] : info.defaults.items()) known += (known.empty() ? "" : ", ") + k;
      throw std::invalid_argument("unknown parameter '" + key + "' for " + info.id + " (known: " + known + ")");
    }
    // A bare scalar stands for a one-element list.
    params[key] = params[key].is_array() && !value.is_array() && !value.is_null() ? json::array({value}) : value;
  }
  return params;
}

template <class T>
T param(const json& params, const char* key) {
  try {
    return params.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("parameter '") + key + "' has the wrong type: " + e.what());
  }
}

struct Builder {
  Report& report;
  std::size_t add_row(json row) {
    const std::size_t idx = report.rows.size();
    row["row"] = idx;
    for (const auto& col : report.columns)
      if (!row.contains(col)) row[col] = nullptr;
    report.rows.push_back(std::move(row));
    return idx;
  }
  void check(std::string name, std::size_t row, std::string lhs, std::string op, json rhs, double tol) {
    report.checks.push_back({std::move(name), row, std::move(lhs), std::move(op), std::move(rhs), tol, false});
  }
};

PavedOperator pave_with(const Matrix& m, std::size_t r, const std::string& strategy, const Budget& budget,
                        std::uint64_t seed, std::size_t restarts, std::size_t threads) {
  const bool fits = m.rows() <= budget.paving_n && count_partitions(m.rows(), r) <= budget.partitions;
  if (strategy == "exhaustive" || (strategy == "auto" && fits)) {
    return exhaustive_pave(m, r, {.max_partitions = budget.partitions, .threads = threads});
  }
  if (strategy != "auto" && strategy != "local") {
    throw std::invalid_argument("strategy must be auto, exhaustive or local, got '" + strategy + "'");
  }
  return local_search_pave(m, r, {.seed = seed, .restarts = restarts, .swap_fallback = true, .threads = threads});
}

// ---------------------------------------------------------------- E1

void run_e1(const ExperimentConfig& cfg, const json& params, Report& report) {
  Builder b{report};
  const auto r = param<std::size_t>(params, "r");
  const auto strategy = param<std::string>(params, "strategy");
  const auto restarts = param<std::size_t>(params, "restarts");
  json certs = json::array();
  for (const auto n : param<std::vector<std::size_t>>(params, "orders")) {
    if (n < 2) throw std::invalid_argument("E1: order must be at least 2");
    const std::size_t q = n - 1;
    for (const std::string family : {"paley-reflection", "paley-projection"}) {
      const std::string ref = family + ":" + std::to_string(q);
      const Matrix m = resolve_matrix_ref(ref);
      const std::uint64_t seed = mix_seed(cfg.seed, report.rows.size());
      try {
        const auto paved = pave_with(m, r, strategy, cfg.budget, seed, restarts, cfg.threads);
        const bool reflection = family == "paley-reflection";
        json row = {{"family", family},
                    {"matrix", ref},
                    {"n", n},
                    {"k", reflection ? 0 : n / 2},
                    {"r", r},
                    {"method", paved.strategy},
                    {"seed", paved.seed ? json(*paved.seed) : json(nullptr)},
                    {"partition", labels_json(paved.partition)},
                    {"bound_kind", reflection ? "conference" : "big_block"}};
        row.update(derive_row("E1", row));
        const auto idx = b.add_row(std::move(row));
        b.check(reflection ? "epsilon >= conference bound" : "epsilon >= big-block bound", idx, "epsilon", ">=",
                "bound", kNormTol);
      } catch (const BudgetExceeded& e) {
        report.complete = false;
        report.notes.push_back(ref + ": " + e.what());
      }
    }
    for (const auto& c : bound_certificates(n, n / 2, r)) certs.push_back(certificate_to_json(c));
  }
  report.extra["certificates"] = certs;
}

json derive_e1(const json& row) {
  const Matrix m = resolve_matrix_ref(row.at("matrix").get<std::string>());
  const auto paved = paving_norm(m, partition_from_json(row.at("partition")));
  const auto kind = row.at("bound_kind").get<std::string>();
  const auto n = row.at("n").get<std::size_t>(), k = row.at("k").get<std::size_t>(), r = row.at("r").get<std::size_t>();
  const double bound = kind == "conference" ? evaluate_bound(BoundKind::kConference, n, k, r)
                                            : evaluate_bound(BoundKind::kBigBlock, n, k, r);
  return {{"epsilon", paved.epsilon}, {"bound", bound}};
}

// ---------------------------------------------------------------- E2

void run_e2(const ExperimentConfig& cfg, const json& params, Report& report) {
  Builder b{report};
  struct Target {
    std::string kind;
    json q;
    std::size_t n, k;
  };
  std::vector<Target> targets;
  for (const auto q : param<std::vector<std::size_t>>(params, "singer_q")) {
    const auto [n, k] = singer_parameters(q, 2);
    targets.push_back({"singer", q, n, k});
  }
  for (const auto& p : param<std::vector<std::vector<std::size_t>>>(params, "pairs")) {
    if (p.size() != 2) throw std::invalid_argument("E2: each pair must be [n, k]");
    targets.push_back({"pair", nullptr, p[0], p[1]});
  }
  for (const auto& t : targets) {
    json row = {{"kind", t.kind}, {"q", t.q}, {"n", t.n}, {"k", t.k}};
    row.update(derive_row("E2", row));
    const auto it = expected_verdicts().find({t.n, t.k});
    if (it != expected_verdicts().end()) row["expected"] = it->second;
    const auto idx = b.add_row(std::move(row));
    if (it != expected_verdicts().end()) b.check("verdict matches", idx, "counterexample", "==", "expected", 0.0);
  }

  if (!params.at("sample_q").is_null()) {
    const auto q = param<std::size_t>(params, "sample_q");
    const auto [n, k] = singer_parameters(q, 2);
    const std::uint64_t samples = params.at("samples").is_null() ? cfg.budget.samples : param<std::uint64_t>(params, "samples");
    const auto found = find_difference_set(n, k);
    if (found.status != DifferenceSetStatus::kFound) {
      report.complete = false;
      report.notes.push_back("no (" + std::to_string(n) + "," + std::to_string(k) + ") difference set: " + found.reason);
      return;
    }
    const std::string ref = "harmonic-gram:" + std::to_string(n) + ":" + join_residues(found.set->elements);
    const auto g = GramProjection::from_matrix(resolve_matrix_ref(ref));
    const std::uint64_t seed = mix_seed(cfg.seed, report.rows.size());
    const auto res = min_symmetry_norm(g, {.strategy = SymmetryStrategy::kRandom,
                                           .seed = seed,
                                           .samples = samples,
                                           .restarts = 1,
                                           .max_exhaustive_n = cfg.budget.symmetry_n,
                                           .threads = cfg.threads});
    json row = {{"kind", "sampling"}, {"q", q},        {"n", n},
                {"k", k},             {"matrix", ref}, {"seed", seed},
                {"samples", samples}, {"signs", signs_string(res.argmin)}};
    row.update(derive_row("E2", row));
    const auto idx = b.add_row(std::move(row));
    b.check("min sampled ||PSP|| > 2k/n", idx, "min_norm", ">", "threshold", 1e-6);
  }
}

json derive_e2(const json& row) {
  const auto n = row.at("n").get<std::size_t>(), k = row.at("k").get<std::size_t>();
  if (row.at("kind") == "sampling") {
    const auto g = GramProjection::from_matrix(resolve_matrix_ref(row.at("matrix").get<std::string>()));
    const double norm = psp_norm(g, signs_from_string(row.at("signs").get<std::string>()));
    return {{"min_norm", norm}, {"threshold", 2.0 * static_cast<double>(k) / static_cast<double>(n)}};
  }
  const auto cert = conjA_certificate(n, k);
  return {{"lhs", int_json(cert.lhs)}, {"rhs", int_json(cert.rhs)}, {"counterexample", cert.is_counterexample}};
}

// ---------------------------------------------------------------- E3

void run_e3(const ExperimentConfig&, const json& params, Report& report) {
  Builder b{report};
  const auto r = param<std::size_t>(params, "r");
  for (const auto& nk : param<std::vector<std::vector<std::size_t>>>(params, "frames")) {
    if (nk.size() != 2) throw std::invalid_argument("E3: each frame must be [n, k]");
    const std::string ref = "harmonic-gram:" + std::to_string(nk[0]) + ":" + join_residues(harmonic_residues(nk[0], nk[1]));
    const Matrix g = resolve_matrix_ref(ref);
    const auto part = bhkw_partition(weight_matrix(g), r);
    json row = {{"matrix", ref}, {"n", nk[0]}, {"k", nk[1]}, {"r", r}, {"partition", labels_json(part)}};
    row.update(derive_row("E3", row));
    const auto idx = b.add_row(std::move(row));
    b.check("BHKW inequalities", idx, "violation", "<=", 0.0, 1e-12);
    b.check("trace >= (k/4)(1-k/n)", idx, "trace_matrix", ">=", "final_bound", kNormTol);
    b.check("trace paths agree", idx, "discrepancy", "<=", 0.0, 1e-10);
  }
}

json derive_e3(const json& row) {
  const auto g = GramProjection::from_matrix(resolve_matrix_ref(row.at("matrix").get<std::string>()));
  const auto part = partition_from_json(row.at("partition"));
  const auto labels = part.labels();
  std::vector<std::size_t> r_set;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == labels[0]) r_set.push_back(i);
  const auto t = conjB_trace_suite(g, r_set);
  return {{"violation", bhkw_violation(weight_matrix(g.gram()), part)},
          {"r_size", t.r_size},
          {"trace_matrix", t.trace_matrix},
          {"trace_sum", t.trace_sum},
          {"discrepancy", t.discrepancy},
          {"final_bound", t.final_bound}};
}

// ---------------------------------------------------------------- E4

void run_e4(const ExperimentConfig& cfg, const json& params, Report& report) {
  Builder b{report};
  const auto r = param<std::size_t>(params, "r");
  const auto restarts = param<std::size_t>(params, "restarts");
  for (const auto s : param<std::vector<std::size_t>>(params, "stages")) {
    for (const auto n : param<std::vector<std::size_t>>(params, "N")) {
      const std::string ref = "laurent-reflection:" + std::to_string(s) + ":" + std::to_string(n);
      const Matrix m = resolve_matrix_ref(ref);
      const std::uint64_t seed = mix_seed(cfg.seed, report.rows.size());
      const auto paved = pave_with(m, r, "auto", cfg.budget, seed, restarts, cfg.threads);
      json row = {{"matrix", ref},
                  {"stage", s},
                  {"N", n},
                  {"r", r},
                  {"method", paved.strategy},
                  {"seed", paved.seed ? json(*paved.seed) : json(nullptr)},
                  {"partition", labels_json(paved.partition)}};
      row.update(derive_row("E4", row));
      const auto idx = b.add_row(std::move(row));
      b.check("norm <= 1", idx, "norm", "<=", 1.0, kNormTol);
      b.check("zero diagonal", idx, "diag_max", "==", 0.0, 0.0);
      b.check("stage set is bidense at scale 2^(1-s)", idx, "bidensity_certified", "true", nullptr, 0.0);
    }
  }
}

json derive_e4(const json& row) {
  const Matrix m = resolve_matrix_ref(row.at("matrix").get<std::string>());
  const auto s = row.at("stage").get<std::size_t>();
  if (s > 62) throw std::invalid_argument("E4: stage too large");
  const auto bid = bidensity_report(fat_cantor_stage(s), Rational(1, std::int64_t{1} << (s - 1)));
  return {{"epsilon", paving_norm(m, partition_from_json(row.at("partition"))).epsilon},
          {"norm", operator_norm(m)},
          {"diag_max", max_abs_diag(m)},
          {"bidensity_certified", bid.certified}};
}

// ---------------------------------------------------------------- E5

void run_e5(const ExperimentConfig& cfg, const json& params, Report& report) {
  Builder b{report};
  const auto count = param<std::size_t>(params, "count");
  const auto max_n = param<std::size_t>(params, "max_n");
  const auto r = param<std::size_t>(params, "r");
  if (max_n < 1) throw std::invalid_argument("E5: max_n must be positive");
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + i % max_n;
    const std::string refl = "random-reflection:" + std::to_string(n) + ":" + std::to_string(mix_seed(cfg.seed, 2 * i));
    const std::string contr = "random-contraction:" + std::to_string(n) + ":" + std::to_string(mix_seed(cfg.seed, 2 * i + 1));
    const ExhaustiveOptions ex{.max_partitions = cfg.budget.partitions, .threads = cfg.threads};
    try {
      const Matrix rm = resolve_matrix_ref(refl);
      const Matrix p = reflection_to_projection(rm);
      const auto pav_p = exhaustive_pave(p, r, ex);
      const auto pav_pneg = exhaustive_pave(Matrix::identity(n) - p, r, ex);
      const auto dil = exhaustive_pave(dilate(resolve_matrix_ref(contr)), r, ex);
      json row = {{"n", n},
                  {"reflection", refl},
                  {"contraction", contr},
                  {"r", r},
                  {"dilation_partition", labels_json(dil.partition)},
                  {"p_partition", labels_json(pav_p.partition)},
                  {"pneg_partition", labels_json(pav_pneg.partition)}};
      row.update(derive_row("E5", row));
      const auto idx = b.add_row(std::move(row));
      b.check("reflection round trip", idx, "roundtrip_defect", "<=", 0.0, 1e-9);
      b.check("R^2 = I", idx, "square_defect", "<=", 0.0, 1e-9 * static_cast<double>(n));
      b.check("dilation R^2 = I", idx, "dilation_square_defect", "<=", 0.0, 2e-9 * static_cast<double>(n));
      b.check("dilation corner", idx, "corner_defect", "<=", 0.0, 1e-9);
      b.check("restriction keeps the level", idx, "restricted_epsilon", "<=", "dilation_epsilon", kNormTol);
      b.check("combined paving at the certified level", idx, "combined_epsilon", "<=", "combine_level", kNormTol);
    } catch (const BudgetExceeded& e) {
      report.complete = false;
      report.notes.push_back(contr + ": " + e.what());
    }
  }
}

json derive_e5(const json& row) {
  const auto n = row.at("n").get<std::size_t>();
  const Matrix rm = resolve_matrix_ref(row.at("reflection").get<std::string>());
  const Matrix a = resolve_matrix_ref(row.at("contraction").get<std::string>());
  const Matrix p = reflection_to_projection(rm);
  const Matrix d = dilate(a);
  double corner = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) corner = std::max(corner, std::abs(d(i, j) - a(i, j)));
  const auto dil_part = partition_from_json(row.at("dilation_partition"));
  const auto pp = partition_from_json(row.at("p_partition"));
  const auto pn = partition_from_json(row.at("pneg_partition"));
  const double eps_p = paving_norm(p, pp).epsilon;
  const double eps_n = paving_norm(Matrix::identity(n) - p, pn).epsilon;
  const double level = std::max(0.0, 2.0 * std::max(eps_p, eps_n) - 1.0);
  return {{"roundtrip_defect", max_abs_diff(projection_to_reflection(p), rm)},
          {"square_defect", max_abs_diff(rm * rm, Matrix::identity(n))},
          {"dilation_square_defect", max_abs_diff(d * d, Matrix::identity(2 * n))},
          {"corner_defect", corner},
          {"dilation_epsilon", paving_norm(d, dil_part).epsilon},
          {"restricted_epsilon", paving_norm(a, dil_part.restrict_to_prefix(n)).epsilon},
          {"combine_level", level},
          {"combined_epsilon", combine_pavings(pp, pn, rm, level).epsilon}};
}

// ---------------------------------------------------------------- rendering

std::string format_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_cell(v[i]);
    return s;
  }
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

std::string render_csv(const std::vector<std::string>& columns, const json& rows) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + format_cell(row.value(columns[i], json()));
    out += "\n";
  }
  return out;
}

bool values_match(const json& stored, const json& fresh) {
  if (stored.is_number() && fresh.is_number()) {
    const double a = stored.get<double>(), b = fresh.get<double>();
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
  }
  return stored == fresh;
}

double as_number(const json& v, const std::string& what) {
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw std::invalid_argument("value of '" + what + "' is not numeric");
}

json check_to_json(const Check& c) {
  return {{"name", c.name}, {"row", c.row}, {"lhs", c.lhs}, {"op", c.op}, {"rhs", c.rhs}, {"tol", c.tol}, {"pass", c.pass}};
}

}  // namespace

// ---------------------------------------------------------------- public

Budget parse_budget(std::string_view text, Budget base) {
  if (text.empty()) return base;
  if (text.find('=') == std::string_view::npos) {
    base.partitions = parse_uint(std::string(text), "PAVING_LAB_BUDGET");
    return base;
  }
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("budget item '" + item + "' needs key=value");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    const auto v = parse_uint(value, "budget " + key);
    if (key == "partitions") base.partitions = v;
    else if (key == "paving_n") base.paving_n = v;
    else if (key == "symmetry_n") base.symmetry_n = v;
    else if (key == "samples") base.samples = v;
    else throw std::invalid_argument("unknown budget key '" + key + "' (partitions, paving_n, symmetry_n, samples)");
  }
  return base;
}

Budget budget_from_environment(Budget base) {
  const char* env = std::getenv("PAVING_LAB_BUDGET");
  return env ? parse_budget(env, base) : base;
}

json budget_to_json(const Budget& b) {
  return {{"partitions", b.partitions}, {"paving_n", b.paving_n}, {"symmetry_n", b.symmetry_n}, {"samples", b.samples}};
}

Matrix resolve_matrix_ref(std::string_view ref) {
  const auto parts = split(ref, ':');
  const std::string& kind = parts[0];
  auto arg = [&](std::size_t i) { return parse_uint(parts.at(i), std::string(ref)); };
  auto need = [&](std::size_t count) {
    if (parts.size() != count) throw std::invalid_argument("matrix reference '" + std::string(ref) + "' is malformed");
  };
  if (kind == "paley-reflection" || kind == "paley-projection") {
    need(2);
    const auto c = paley_conference(arg(1));
    if (kind == "paley-projection") return conference_projection(c).gram();
    return (1.0 / std::sqrt(static_cast<double>(arg(1)))) * c.to_matrix();
  }
  if (kind == "harmonic-gram") {
    need(3);
    std::vector<std::size_t> d;
    for (const auto& s : split(parts[2], ',')) d.push_back(parse_uint(s, std::string(ref)));
    return gram_projection(harmonic_frame(arg(1), d)).gram();
  }
  if (kind == "laurent-reflection") {
    need(3);
    return truncated_laurent({.kind = SymbolKind::kReflection, .e = fat_cantor_stage(arg(1))}, arg(2)).matrix;
  }
  if (kind == "random-reflection" || kind == "random-contraction") {
    need(3);
    Rng rng(arg(2));
    return kind == "random-reflection" ? random_reflection(arg(1), rng) : random_hermitian_contraction(arg(1), 1.0, rng);
  }
  throw std::invalid_argument("unknown matrix reference kind '" + kind + "'");
}

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> registry = build_registry();
  return registry;
}

const ExperimentInfo& find_experiment(std::string_view key) {
  for (const auto& e : experiment_registry()) {
    std::string upper(key);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (e.id == upper || e.name == key) return e;
  }
  throw UnknownExperiment("unknown experiment '" + std::string(key) + "'; registered:" + registry_listing());
}

bool evaluate_check(const Check& c, const json& row) {
  const json lhs = row.at(c.lhs);
  if (c.op == "true") return lhs.is_boolean() && lhs.get<bool>();
  const double l = as_number(lhs, c.lhs);
  const double r = c.rhs.is_string() ? as_number(row.at(c.rhs.get<std::string>()), c.rhs.get<std::string>())
                                     : as_number(c.rhs, "rhs");
  if (c.op == ">=") return l >= r - c.tol;
  if (c.op == "<=") return l <= r + c.tol;
  if (c.op == ">") return l > r + c.tol;
  if (c.op == "<") return l < r - c.tol;
  if (c.op == "==") return std::abs(l - r) <= c.tol;
  throw std::invalid_argument("unknown comparison '" + c.op + "'");
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Report run_experiment(const ExperimentConfig& config) {
  const auto& info = find_experiment(config.name);
  const json params = merged_params(info, config.params);
  Report report;
  report.id = info.id;
  report.name = info.name;
  report.csv_version = info.csv_version;
  report.columns = info.columns;
  report.config = {{"experiment", info.id},
                   {"params", params},
                   {"seed", config.seed},
                   {"budget", budget_to_json(config.budget)}};
  const auto start = std::chrono::steady_clock::now();
  if (info.id == "E1") run_e1(config, params, report);
  else if (info.id == "E2") run_e2(config, params, report);
  else if (info.id == "E3") run_e3(config, params, report);
  else if (info.id == "E4") run_e4(config, params, report);
  else run_e5(config, params, report);
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& c : report.checks) c.pass = evaluate_check(c, report.rows[c.row]);
  return report;
}

json derive_row(std::string_view id, const json& row) {
  if (id == "E1") return derive_e1(row);
  if (id == "E2") return derive_e2(row);
  if (id == "E3") return derive_e3(row);
  if (id == "E4") return derive_e4(row);
  if (id == "E5") return derive_e5(row);
  throw UnknownExperiment("unknown experiment '" + std::string(id) + "'; registered:" + registry_listing());
}

json report_to_json(const Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_to_json(c));
  return {{"schema", kReportSchema},
          {"experiment", r.id},
          {"name", r.name},
          {"csv_version", r.csv_version},
          {"config", r.config},
          {"columns", r.columns},
          {"rows", r.rows},
          {"assertions", checks},
          {"complete", r.complete},
          {"notes", r.notes},
          {"extra", r.extra},
          {"pass", r.passed()},
          {"elapsed_seconds", r.elapsed_seconds}};
}

std::string report_csv(const Report& r) { return render_csv(r.columns, json(r.rows)); }

std::string report_basename(const Report& r) { return r.id + "-" + r.name; }

ReportPaths write_report(const Report& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  ReportPaths paths{dir / (report_basename(r) + ".csv"), dir / (report_basename(r) + ".json")};
  std::ofstream csv(paths.csv, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + paths.csv.string());
  csv << report_csv(r);
  write_json_file(paths.json, report_to_json(r));
  return paths;
}

VerifyResult verify_report_json(const json& j, const std::string* csv_payload) {
  VerifyResult out;
  auto fail = [&](std::string msg) {
    out.problems.push_back(std::move(msg));
    out.pass = false;
    return out;
  };
  if (!j.is_object()) return fail("report is not a JSON object");
  if (!j.contains("schema")) return fail("field 'schema' is missing");
  if (!j.at("schema").is_number_integer()) return fail("field 'schema' is not an integer");
  const int schema = j.at("schema").get<int>();
  if (schema != kReportSchema) {
    return fail("report schema version " + std::to_string(schema) + " is not supported; this build reads version " +
                std::to_string(kReportSchema));
  }
  const std::pair<const char*, json::value_t> required[] = {
      {"experiment", json::value_t::string}, {"csv_version", json::value_t::number_integer},
      {"config", json::value_t::object},     {"columns", json::value_t::array},
      {"rows", json::value_t::array},        {"assertions", json::value_t::array},
      {"complete", json::value_t::boolean},  {"pass", json::value_t::boolean}};
  for (const auto& [field, type] : required) {
    if (!j.contains(field)) return fail(std::string("field '") + field + "' is missing");
    const auto t = j.at(field).type();
    const bool ok = t == type || (type == json::value_t::number_integer && t == json::value_t::number_unsigned);
    if (!ok) return fail(std::string("field '") + field + "' has the wrong type");
  }
  const ExperimentInfo* info = nullptr;
  try {
    info = &find_experiment(j.at("experiment").get<std::string>());
  } catch (const UnknownExperiment& e) {
    return fail(std::string("field 'experiment': ") + e.what());
  }
  if (j.at("csv_version").get<int>() != info->csv_version) {
    return fail("field 'csv_version' is " + j.at("csv_version").dump() + " but " + info->id + " writes version " +
                std::to_string(info->csv_version));
  }
  if (j.at("columns").get<std::vector<std::string>>() != info->columns) {
    return fail("field 'columns' does not match the " + info->id + " column set");
  }

  out.pass = true;
  const auto& rows = j.at("rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!row.is_object()) return fail("row " + std::to_string(i) + " is not an object");
    for (const auto& col : info->columns)
      if (!row.contains(col)) return fail("row " + std::to_string(i) + ": field '" + col + "' is missing");
    try {
      const json fresh = derive_row(info->id, row);
      for (const auto& [key, value] : fresh.items()) {
        if (!values_match(row.at(key), value)) {
          fail("row " + std::to_string(i) + ": field '" + key + "' is " + row.at(key).dump() + " but recomputes to " +
               value.dump());
        }
      }
    } catch (const std::exception& e) {
      fail("row " + std::to_string(i) + ": cannot recompute: " + e.what());
    }
    ++out.rows_checked;
  }

  bool all = true;
  for (const auto& a : j.at("assertions")) {
    Check c;
    try {
      c = Check{a.at("name").get<std::string>(), a.at("row").get<std::size_t>(), a.at("lhs").get<std::string>(),
                a.at("op").get<std::string>(), a.at("rhs"), a.at("tol").get<double>(), a.at("pass").get<bool>()};
    } catch (const json::exception& e) {
      return fail(std::string("malformed assertion: ") + e.what());
    }
    if (c.row >= rows.size()) return fail("assertion '" + c.name + "' names missing row " + std::to_string(c.row));
    bool holds = false;
    try {
      holds = evaluate_check(c, rows[c.row]);
    } catch (const std::exception& e) {
      fail("assertion '" + c.name + "' (row " + std::to_string(c.row) + "): " + e.what());
      continue;
    }
    all = all && holds;
    if (!holds) fail("assertion '" + c.name + "' does not hold on row " + std::to_string(c.row));
    if (holds != c.pass) fail("assertion '" + c.name + "' on row " + std::to_string(c.row) + " has a stale pass flag");
    ++out.assertions_checked;
  }
  if (j.at("pass").get<bool>() != all) fail("field 'pass' disagrees with the assertions");

  if (csv_payload) {
    const std::string expected = render_csv(info->columns, rows);
    if (*csv_payload != expected) {
      std::istringstream a(*csv_payload), b(expected);
      std::string la, lb;
      std::size_t line = 1;
      while (std::getline(a, la) && std::getline(b, lb) && la == lb) ++line;
      fail("CSV payload differs from the JSON rows at line " + std::to_string(line));
    }
  }
  return out;
}

VerifyResult verify_report(const std::filesystem::path& json_path) {
  const json j = read_json_file(json_path);
  auto csv_path = json_path;
  csv_path.replace_extension(".csv");
  if (std::filesystem::exists(csv_path)) {
    std::ifstream in(csv_path, std::ios::binary);
    const std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return verify_report_json(j, &payload);
  }
  return verify_report_json(j);
}

}  // namespace paving_lab
