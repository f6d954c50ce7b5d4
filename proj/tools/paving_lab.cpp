// paving-lab: command-line front end for the paving, symmetry, frame,
// Laurent and experiment modules.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "paving_lab/experiments.hpp"
#include "paving_lab/frames.hpp"
#include "paving_lab/laurent.hpp"
#include "paving_lab/matrix_io.hpp"
#include "paving_lab/paving.hpp"
#include "paving_lab/symmetry.hpp"

using namespace paving_lab;
using nlohmann::json;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitError = 2;
constexpr int kExitIncomplete = 3;

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string out_dir;
  std::string format = "json";
};

// Prints to stdout and, when --out-dir is given, also writes `stem`.{json,csv}.
void emit(const Globals& g, const std::string& stem, const json& j, const std::string& csv) {
  std::cout << (g.format == "csv" ? csv : j.dump(2) + "\n");
  if (!g.out_dir.empty()) {
    std::filesystem::create_directories(g.out_dir);
    write_json_file(std::filesystem::path(g.out_dir) / (stem + ".json"), j);
    std::ofstream(std::filesystem::path(g.out_dir) / (stem + ".csv"), std::ios::binary) << csv;
  }
}

Matrix load_matrix(const std::string& input, const std::string& ref) {
  if (!input.empty() && !ref.empty()) throw std::invalid_argument("give either --input or --ref, not both");
  if (!ref.empty()) return resolve_matrix_ref(ref);
  if (input.empty()) throw std::invalid_argument("--input or --ref is required");
  return read_matrix_file(input);
}

std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stoul(item));
  return out;
}

json parse_param_value(const std::string& v) {
  try {
    return json::parse(v);
  } catch (const json::parse_error&) {
  }
  if (v.find(',') != std::string::npos) {
    json arr = json::array();
    std::stringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) arr.push_back(parse_param_value(item));
    return arr;
  }
  return v;
}

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
  return Rational(boost::multiprecision::cpp_int(s.substr(0, slash)), boost::multiprecision::cpp_int(s.substr(slash + 1)));
}

int run_report(const Globals& g, const Report& report) {
  const json j = report_to_json(report);
  const std::string csv = report_csv(report);
  if (!g.out_dir.empty()) {
    const auto paths = write_report(report, g.out_dir);
    std::cerr << "wrote " << paths.csv.string() << " and " << paths.json.string() << "\n";
  }
  std::cout << (g.format == "csv" ? csv : j.dump(2) + "\n");
  for (const auto& c : report.checks)
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << " (row " << c.row << ")\n";
  for (const auto& n : report.notes) std::cerr << "note: " << n << "\n";
  if (!report.passed()) return kExitFailed;
  if (!report.complete) {
    std::cerr << "report is incomplete: a search budget was exceeded\n";
    return kExitIncomplete;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paving experiments for projections, reflections and frames", "paving-lab"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every randomized step");
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)");
  app.add_option("--out-dir", g.out_dir, "Also write results into this directory");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  int exit_code = 0;
  Budget budget;

  // pave
  auto* pave = app.add_subcommand("pave", "Best r-paving of an operator");
  std::string pave_input, pave_ref, strategy = "exhaustive";
  std::size_t pave_r = 2, restarts = 8;
  bool zero_diag = false;
  pave->add_option("--input", pave_input, "Matrix JSON file");
  pave->add_option("--ref", pave_ref, "Matrix reference, e.g. paley-reflection:13");
  pave->add_option("--r", pave_r, "Number of blocks")->check(CLI::Range(1, 255));
  pave->add_option("--strategy", strategy)->check(CLI::IsMember({"exhaustive", "local"}));
  pave->add_option("--restarts", restarts, "Local-search restarts");
  pave->add_flag("--zero-diagonal", zero_diag, "Subtract the diagonal first");
  pave->callback([&] {
    Matrix m = load_matrix(pave_input, pave_ref);
    if (zero_diag)
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) = 0.0;
    const auto start = std::chrono::steady_clock::now();
    const auto paved = strategy == "exhaustive"
                           ? exhaustive_pave(m, pave_r, {.max_partitions = budget.partitions, .threads = g.threads})
                           : local_search_pave(m, pave_r, {.seed = g.seed, .restarts = restarts, .threads = g.threads});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char line[160];
    std::snprintf(line, sizeof line, "%zu,%zu,%s,%.17g,%.6f\n", m.rows(), pave_r, paved.strategy.c_str(), paved.epsilon,
                  secs);
    emit(g, "pave", paved_to_json(paved), std::string("n,r,strategy,epsilon,seconds\n") + line);
  });

  // symmetry-scan
  auto* scan = app.add_subcommand("symmetry-scan", "Minimum ||PSP|| over diagonal symmetries");
  std::string scan_input, scan_ref, scan_strategy = "exhaustive";
  std::uint64_t samples = 0;
  std::size_t scan_restarts = 16;
  scan->add_option("--input", scan_input, "Projection JSON file");
  scan->add_option("--ref", scan_ref, "Matrix reference, e.g. harmonic-gram:31:0,1,3,8,12,18");
  scan->add_option("--strategy", scan_strategy)->check(CLI::IsMember({"exhaustive", "random", "greedy"}));
  scan->add_option("--samples", samples, "Random samples (default from the budget)");
  scan->add_option("--restarts", scan_restarts, "Greedy-flip restarts");
  scan->callback([&] {
    const auto p = GramProjection::from_matrix(load_matrix(scan_input, scan_ref));
    const auto strat = scan_strategy == "exhaustive" ? SymmetryStrategy::kExhaustive
                       : scan_strategy == "random"   ? SymmetryStrategy::kRandom
                                                     : SymmetryStrategy::kGreedyFlip;
    const auto res = min_symmetry_norm(p, {.strategy = strat,
                                           .seed = g.seed,
                                           .samples = samples ? samples : budget.samples,
                                           .restarts = scan_restarts,
                                           .max_exhaustive_n = budget.symmetry_n,
                                           .threads = g.threads});
    std::string signs;
    for (int s : res.argmin.signs()) signs += s > 0 ? '+' : '-';
    const json j = {{"n", p.n()},          {"k", p.rank()},          {"method", res.method}, {"min_norm", res.min_norm},
                    {"argmin", signs},     {"scanned", res.scanned}, {"metadata", res.metadata}};
    char line[200];
    std::snprintf(line, sizeof line, "%zu,%zu,%s,%.17g,%llu,", p.n(), p.rank(), res.method.c_str(), res.min_norm,
                  static_cast<unsigned long long>(res.scanned));
    emit(g, "symmetry-scan", j, std::string("n,k,method,min_norm,scanned,argmin\n") + line + signs + "\n");
  });

  // frames
  auto* frames = app.add_subcommand("frames", "Build harmonic, Paley or block frames");
  std::string family = "harmonic", residues;
  std::size_t fn = 0, fk = 0, fq = 5, fr = 2;
  bool want_gram = false;
  frames->add_option("--family", family)->check(CLI::IsMember({"harmonic", "paley", "block", "difference-set"}));
  frames->add_option("--n", fn, "Modulus / number of vectors");
  frames->add_option("--k", fk, "Dimension");
  frames->add_option("--q", fq, "Paley prime");
  frames->add_option("--r", fr, "Blocks for the block frame");
  frames->add_option("--residues", residues, "Comma-separated residues for harmonic frames");
  frames->add_flag("--gram", want_gram, "Emit the Gram projection instead of the frame");
  frames->callback([&] {
    json j;
    if (family == "difference-set") {
      const auto res = find_difference_set(fn, fk);
      j = {{"status", res.status == DifferenceSetStatus::kFound       ? "found"
                      : res.status == DifferenceSetStatus::kNoneExists ? "none"
                                                                        : "budget"},
           {"reason", res.reason}};
      if (res.set) j["set"] = difference_set_to_json(*res.set);
    } else if (family == "paley") {
      const auto c = paley_conference(fq);
      j = want_gram ? matrix_to_json(conference_projection(c).gram()) : json{{"order", c.order()}, {"entries", c.entries()}};
    } else {
      FrameSpec f = family == "block" ? block_frame(fn, fk, fr).frame : [&] {
        std::vector<std::size_t> d = residues.empty() ? std::vector<std::size_t>{} : parse_list(residues);
        if (d.empty()) {
          const auto res = find_difference_set(fn, fk);
          if (!res.set) throw std::invalid_argument("no residues given and no (n,k) difference set: " + res.reason);
          d = res.set->elements;
        }
        return harmonic_frame(fn, d);
      }();
      j = want_gram ? matrix_to_json(gram_projection(f).gram()) : frame_to_json(f);
    }
    emit(g, "frames", j, j.dump() + "\n");
  });

  // laurent
  auto* laurent = app.add_subcommand("laurent", "Truncated Laurent operators over fat Cantor sets");
  laurent->require_subcommand(1);
  auto* gen = laurent->add_subcommand("gen", "Write the truncated operator as matrix JSON");
  std::size_t stage = 1, big_n = 32;
  std::string kind = "reflection", out_file, h_text = "";
  gen->add_option("--stage", stage)->check(CLI::Range(1, 40));
  gen->add_option("--N", big_n, "Half bandwidth; the matrix is (2N+1) x (2N+1)");
  gen->add_option("--kind", kind)->check(CLI::IsMember({"reflection", "indicator"}));
  gen->add_option("--out", out_file, "Output matrix JSON (stdout when omitted)");
  gen->callback([&] {
    const auto t = truncated_laurent(
        {.kind = kind == "reflection" ? SymbolKind::kReflection : SymbolKind::kIndicator, .e = fat_cantor_stage(stage)},
        big_n);
    const json j = matrix_to_json(t.matrix);
    if (out_file.empty()) std::cout << j.dump() << "\n";
    else write_json_file(out_file, j);
  });
  auto* set = laurent->add_subcommand("set", "The stage-s set with an optional bidensity check");
  set->add_option("--stage", stage)->check(CLI::Range(1, 40));
  set->add_option("--cell", h_text, "Cell width 1/m for the bidensity report");
  set->callback([&] {
    const auto e = fat_cantor_stage(stage);
    json j = interval_set_to_json(e);
    if (!h_text.empty()) j["bidensity"] = bidensity_to_json(bidensity_report(e, parse_rational(h_text)));
    emit(g, "laurent-set", j, j.dump() + "\n");
  });

  // experiment
  auto* exp = app.add_subcommand("experiment", "Registered experiments");
  exp->require_subcommand(1);
  auto* run = exp->add_subcommand("run", "Run an experiment and write its report");
  std::string exp_name;
  std::vector<std::string> params;
  run->add_option("name", exp_name, "Experiment id or name")->required();
  run->add_option("--param", params, "key=value (value is JSON or a comma list)");
  run->callback([&] {
    json p = json::object();
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--param expects key=value, got '" + kv + "'");
      p[kv.substr(0, eq)] = parse_param_value(kv.substr(eq + 1));
    }
    exit_code = run_report(g, run_experiment({.name = exp_name, .params = p, .seed = g.seed, .threads = g.threads, .budget = budget}));
  });
  auto* verify = exp->add_subcommand("verify", "Recheck a stored report");
  std::string report_path;
  verify->add_option("report", report_path, "Report JSON")->required()->check(CLI::ExistingFile);
  verify->callback([&] {
    const auto v = verify_report(report_path);
    for (const auto& p : v.problems) std::cerr << "problem: " << p << "\n";
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << report_path << " (" << v.rows_checked << " rows, "
              << v.assertions_checked << " assertions)\n";
    exit_code = v.pass ? 0 : kExitFailed;
  });
  auto* list = exp->add_subcommand("list", "List registered experiments");
  list->callback([&] {
    for (const auto& e : experiment_registry()) std::cout << e.id << "  " << e.name << "  " << e.description << "\n";
  });

  try {
    budget = budget_from_environment();
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const UnknownExperiment& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return exit_code;
}
