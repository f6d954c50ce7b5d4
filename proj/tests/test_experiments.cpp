#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "paving_lab/experiments.hpp"
#include "paving_lab/frames.hpp"

using namespace paving_lab;
using nlohmann::json;

namespace {

// Best 2-paving level by brute force over all 2^n labelings, norms via SVD.
double brute_force_two_paving(const Matrix& m) {
  const std::size_t n = m.rows();
  double best = 1e300;
  for (std::size_t mask = 0; mask < (std::size_t{1} << (n - 1)); ++mask) {
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? b : a).push_back(i);
    double level = 0.0;
    for (const auto* blk : {&a, &b})
      if (!blk->empty()) level = std::max(level, singular_values(principal_compression(m, *blk)).front());
    best = std::min(best, level);
  }
  return best;
}

std::filesystem::path scratch_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / ("paving_lab_test_" + std::string(name));
  std::filesystem::remove_all(dir);
  return dir;
}

const json& row_of(const Report& r, std::size_t i) { return r.rows.at(i); }

}  // namespace

TEST_CASE("registry lookup and parameter validation") {
  CHECK(experiment_registry().size() == 5);
  CHECK(find_experiment("e3").name == "conjectureB-trace");
  CHECK(find_experiment("laurent-truncation").id == "E4");
  CHECK_THROWS_WITH_AS(find_experiment("E9"), doctest::Contains("E5  class-equivalences"), UnknownExperiment);
  CHECK_THROWS_AS(run_experiment({.name = "nope"}), UnknownExperiment);
  CHECK_THROWS_WITH_AS(run_experiment({.name = "E1", .params = {{"order", {6}}}}), doctest::Contains("known: orders"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_experiment({.name = "E1", .params = {{"r", "two"}}}), doctest::Contains("'r'"),
                       std::invalid_argument);
}

TEST_CASE("budget parsing") {
  const Budget b = parse_budget("partitions=10,samples=7");
  CHECK(b.partitions == 10);
  CHECK(b.samples == 7);
  CHECK(b.symmetry_n == Budget{}.symmetry_n);
  CHECK(parse_budget("500").partitions == 500);
  CHECK(parse_budget("paving_n=9,symmetry_n=12").paving_n == 9);
  CHECK_THROWS_AS(parse_budget("partitions=-1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_budget("speed=3"), doctest::Contains("unknown budget key"), std::invalid_argument);
  CHECK_THROWS_AS(parse_budget("12x"), std::invalid_argument);
  setenv("PAVING_LAB_BUDGET", "partitions=123", 1);
  CHECK(budget_from_environment().partitions == 123);
  unsetenv("PAVING_LAB_BUDGET");
  CHECK(budget_from_environment().partitions == kDefaultPartitionBudget);
}

TEST_CASE("matrix references") {
  const Matrix c = resolve_matrix_ref("paley-reflection:5");
  CHECK(max_abs_diff(c * c, Matrix::identity(6)) < 1e-12);
  const Matrix p = resolve_matrix_ref("paley-projection:5");
  CHECK(max_abs_diff(p, 0.5 * (Matrix::identity(6) + c)) < 1e-12);
  CHECK(resolve_matrix_ref("harmonic-gram:4:0,1")(0, 1) == Complex(0.25, 0.25));
  CHECK(resolve_matrix_ref("laurent-reflection:2:3").rows() == 7);
  CHECK(max_abs_diff(resolve_matrix_ref("random-reflection:4:9"), resolve_matrix_ref("random-reflection:4:9")) == 0.0);
  CHECK_THROWS_AS(resolve_matrix_ref("paley-reflection"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_matrix_ref("paley-reflection:x"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(resolve_matrix_ref("hadamard:4"), doctest::Contains("unknown matrix reference"),
                       std::invalid_argument);
}

TEST_CASE("E1 at n = 6") {
  const Report r = run_experiment({.name = "E1", .params = {{"orders", {6}}}});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.passed());
  CHECK(r.complete);
  const auto& refl = row_of(r, 0);
  CHECK(refl["bound_kind"] == "conference");
  CHECK(std::abs(refl["bound"].get<double>() - std::sqrt(2.0 / 5.0)) < 1e-15);
  const double brute = brute_force_two_paving(resolve_matrix_ref("paley-reflection:5"));
  CHECK(std::abs(refl["epsilon"].get<double>() - brute) < 1e-9);
  CHECK(refl["epsilon"].get<double>() >= std::sqrt(2.0 / 5.0));
  // Frozen from the brute-force oracle: 2/sqrt(5) for the reflection, (1 + 2/sqrt(5))/2 for the projection.
  CHECK(std::abs(brute - 2.0 / std::sqrt(5.0)) < 1e-12);
  CHECK(std::abs(row_of(r, 1)["epsilon"].get<double>() - (1.0 + 2.0 / std::sqrt(5.0)) / 2.0) < 1e-9);
  CHECK(r.extra["certificates"].size() == 3);
}

TEST_CASE("E1 budget overrun yields a partial report") {
  const Report r = run_experiment(
      {.name = "E1", .params = {{"orders", {6}}, {"strategy", "exhaustive"}}, .budget = parse_budget("partitions=10")});
  CHECK_FALSE(r.complete);
  CHECK(r.rows.empty());
  REQUIRE(r.notes.size() == 2);
  CHECK(r.notes[0].find("local_search_pave") != std::string::npos);
  CHECK(report_to_json(r)["complete"] == false);
}

TEST_CASE("E2 with q = 5") {
  const Report r = run_experiment({.name = "E2", .params = {{"singer_q", {4, 5}}, {"pairs", json::array()}, {"samples", 3000}}, .seed = 11});
  CHECK(r.passed());
  REQUIRE(r.rows.size() == 3);
  CHECK(row_of(r, 0)["counterexample"] == false);
  CHECK(row_of(r, 1)["n"] == 31);
  CHECK(row_of(r, 1)["counterexample"] == true);
  const auto& s = row_of(r, 2);
  CHECK(s["kind"] == "sampling");
  CHECK(s["matrix"] == "harmonic-gram:31:0,1,3,8,12,18");
  CHECK(s["min_norm"].get<double>() > 12.0 / 31.0);
  CHECK(std::abs(s["threshold"].get<double>() - 12.0 / 31.0) < 1e-15);
}

TEST_CASE("E3 trace rows") {
  const Report r = run_experiment({.name = "E3"});
  CHECK(r.passed());
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK(row["violation"].get<double>() <= 1e-12);
    CHECK(row["trace_matrix"].get<double>() >= row["final_bound"].get<double>() - 1e-9);
  }
  // (16,4) has no difference set, so the first four residues are used.
  CHECK(row_of(r, 1)["matrix"] == "harmonic-gram:16:0,1,2,3");
}

TEST_CASE("E5 round trips on 20 seeded reflections") {
  const Report r = run_experiment({.name = "E5", .seed = 5});
  REQUIRE(r.rows.size() == 20);
  CHECK(r.passed());
  for (const auto& row : r.rows) {
    CHECK(row["roundtrip_defect"].get<double>() <= 1e-9);
    CHECK(row["combined_epsilon"].get<double>() <= row["combine_level"].get<double>() + 1e-9);
  }
}

TEST_CASE("payloads are deterministic across runs and thread counts") {
  const ExperimentConfig base{.name = "E4", .params = {{"stages", {2}}, {"N", {4, 8}}}, .seed = 3, .threads = 1};
  ExperimentConfig threaded = base;
  threaded.threads = 3;
  const Report a = run_experiment(base), b = run_experiment(base), c = run_experiment(threaded);
  CHECK(report_csv(a) == report_csv(b));
  CHECK(report_csv(a) == report_csv(c));
  auto ja = report_to_json(a), jc = report_to_json(c);
  ja.erase("elapsed_seconds");
  jc.erase("elapsed_seconds");
  CHECK(ja == jc);
  const Report other = run_experiment({.name = "E4", .params = {{"stages", {2}}, {"N", {8}}}, .seed = 4});
  CHECK(other.rows[0]["seed"] != a.rows[1]["seed"]);
}

TEST_CASE("verify_report") {
  const Report r = run_experiment({.name = "E1", .params = {{"orders", {6}}}});
  const auto dir = scratch_dir("verify");
  const auto paths = write_report(r, dir);
  CHECK(paths.json.filename() == "E1-paving-bounds.json");

  SUBCASE("untouched report passes") {
    const auto v = verify_report(paths.json);
    CHECK(v.pass);
    CHECK(v.problems.empty());
    CHECK(v.rows_checked == 2);
    CHECK(v.assertions_checked == 2);
  }
  SUBCASE("mutated epsilon names the row") {
    json j = report_to_json(r);
    j["rows"][1]["epsilon"] = 0.5;
    const auto v = verify_report_json(j);
    CHECK_FALSE(v.pass);
    REQUIRE_FALSE(v.problems.empty());
    CHECK(v.problems[0].find("row 1: field 'epsilon'") != std::string::npos);
  }
  SUBCASE("mutated partition changes the derived epsilon") {
    json j = report_to_json(r);
    j["rows"][0]["partition"] = {0, 0, 0, 0, 0, 0};
    CHECK_FALSE(verify_report_json(j).pass);
  }
  SUBCASE("older schema is a version error") {
    json j = report_to_json(r);
    j["schema"] = 0;
    const auto v = verify_report_json(j);
    CHECK_FALSE(v.pass);
    CHECK(v.problems.at(0).find("schema version 0") != std::string::npos);
  }
  SUBCASE("missing field is named") {
    json j = report_to_json(r);
    j.erase("rows");
    CHECK(verify_report_json(j).problems.at(0) == "field 'rows' is missing");
    json k = report_to_json(r);
    k["rows"][0].erase("bound");
    CHECK(verify_report_json(k).problems.at(0) == "row 0: field 'bound' is missing");
  }
  SUBCASE("stale pass flag") {
    json j = report_to_json(r);
    j["assertions"][0]["pass"] = false;
    CHECK_FALSE(verify_report_json(j).pass);
  }
  SUBCASE("edited CSV payload") {
    std::ofstream(paths.csv, std::ios::app) << "9,extra\n";
    const auto v = verify_report(paths.json);
    CHECK_FALSE(v.pass);
    CHECK(v.problems.at(0).find("CSV payload differs") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("CSV layout") {
  const Report r = run_experiment({.name = "E3", .params = {{"frames", {{8, 2}}}}});
  const std::string csv = report_csv(r);
  CHECK(csv.rfind("row,matrix,n,k,r,partition,violation", 0) == 0);
  CHECK(csv.find("\"harmonic-gram:8:0,1\"") != std::string::npos);
  CHECK(csv.find("0 1 0 1 0 1 0 1") != std::string::npos);
}
