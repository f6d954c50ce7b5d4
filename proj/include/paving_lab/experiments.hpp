#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "paving_lab/matrix.hpp"
#include "paving_lab/paving.hpp"
#include "paving_lab/symmetry.hpp"

namespace paving_lab {

inline constexpr int kReportSchema = 1;

/// Search budgets shared by the CLI and the experiments.
struct Budget {
  std::uint64_t partitions = kDefaultPartitionBudget;
  std::size_t paving_n = 14;  // largest order paved exhaustively when the strategy is automatic
  std::size_t symmetry_n = kExhaustiveSymmetryDefault;
  std::uint64_t samples = 100000;
};

/// "partitions=N,paving_n=M,symmetry_n=M,samples=S" (any subset) or a bare
/// integer, which sets the partition budget.
Budget parse_budget(std::string_view text, Budget base = {});
/// Applies PAVING_LAB_BUDGET when it is set.
Budget budget_from_environment(Budget base = {});
nlohmann::json budget_to_json(const Budget& b);

/// Matrices named by reference so reports stay small and recomputable:
///   paley-reflection:q       C / sqrt(q) for the Paley conference matrix of order q+1
///   paley-projection:q       (I + C / sqrt(q)) / 2
///   harmonic-gram:n:a,b,...  Gram projection of the harmonic frame on those residues
///   laurent-reflection:s:N   truncated Laurent operator of 2 chi_E - 1, E the stage-s set
///   random-reflection:n:seed, random-contraction:n:seed
Matrix resolve_matrix_ref(std::string_view ref);

struct ExperimentInfo {
  std::string id;    // "E1"
  std::string name;  // "paving-bounds"
  std::string description;
  int csv_version = 1;
  std::vector<std::string> columns;
  nlohmann::json defaults;  // parameter defaults
};

const std::vector<ExperimentInfo>& experiment_registry();

class UnknownExperiment : public std::invalid_argument {
 public:
  explicit UnknownExperiment(const std::string& what) : std::invalid_argument(what) {}
};

/// Looks up by id or name, case-insensitively on the id.
const ExperimentInfo& find_experiment(std::string_view key);

struct ExperimentConfig {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // never affects the payload
  Budget budget;
};

/// lhs op rhs on the stored row values; rhs is a field name or a number.
struct Check {
  std::string name;
  std::size_t row = 0;
  std::string lhs;
  std::string op;  // ">=", "<=", ">", "<", "==", "true"
  nlohmann::json rhs;
  double tol = 0.0;
  bool pass = false;
};

bool evaluate_check(const Check& c, const nlohmann::json& row);

struct Report {
  std::string id, name;
  int csv_version = 1;
  nlohmann::json config;
  std::vector<std::string> columns;
  std::vector<nlohmann::json> rows;
  std::vector<Check> checks;
  bool complete = true;
  std::vector<std::string> notes;
  nlohmann::json extra = nlohmann::json::object();
  double elapsed_seconds = 0.0;

  bool passed() const;
};

/// Throws UnknownExperiment (listing the registry) for unknown names and
/// std::invalid_argument for unknown or malformed parameters.
Report run_experiment(const ExperimentConfig& config);

/// Derived fields of a row, recomputed from its raw stored inputs.
nlohmann::json derive_row(std::string_view experiment_id, const nlohmann::json& row);

nlohmann::json report_to_json(const Report& r);
std::string report_csv(const Report& r);
std::string report_basename(const Report& r);

struct ReportPaths {
  std::filesystem::path csv, json;
};
ReportPaths write_report(const Report& r, const std::filesystem::path& dir);

struct VerifyResult {
  bool pass = false;
  std::vector<std::string> problems;
  std::size_t rows_checked = 0;
  std::size_t assertions_checked = 0;
};

/// Rechecks a stored report without rerunning any search: structure, derived
/// fields, every assertion and (if present next to it) the CSV payload.
VerifyResult verify_report(const std::filesystem::path& json_path);
VerifyResult verify_report_json(const nlohmann::json& report, const std::string* csv_payload = nullptr);

}  // namespace paving_lab
