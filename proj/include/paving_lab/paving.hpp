#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "paving_lab/frames.hpp"
#include "paving_lab/matrix.hpp"

namespace paving_lab {

/// Disjoint nonempty blocks covering {0..n-1}, each sorted, ordered by
/// smallest element.
class Partition {
 public:
  static Partition from_blocks(std::size_t n, std::vector<std::vector<std::size_t>> blocks);
  /// Block ids may be arbitrary; unused ids simply produce no block.
  static Partition from_labels(std::span<const std::size_t> labels);
  static Partition singletons(std::size_t n);
  static Partition whole(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t size() const { return blocks_.size(); }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  const std::vector<std::size_t>& block(std::size_t j) const { return blocks_[j]; }

  /// labels()[i] is the index of the block containing i.
  std::vector<std::size_t> labels() const;

  /// Blocks intersected with {0..m-1}; empty intersections are dropped.
  Partition restrict_to_prefix(std::size_t m) const;

  /// Common refinement {A_i ∩ B_j}.
  Partition refine(const Partition& other) const;

  std::size_t largest_block() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  Partition(std::size_t n, std::vector<std::vector<std::size_t>> blocks) : n_(n), blocks_(std::move(blocks)) {}
  std::size_t n_;
  std::vector<std::vector<std::size_t>> blocks_;
};

/// Number of set partitions of n elements into at most r blocks, saturating
/// at UINT64_MAX.
std::uint64_t count_partitions(std::size_t n, std::size_t r);

/// Every restricted-growth string of length n with at most r distinct values,
/// in lexicographic order (which is the canonical partition order used for
/// tie-breaking).
std::vector<std::vector<std::uint8_t>> restricted_growth_strings(std::size_t n, std::size_t r);

struct PavedOperator {
  Matrix op;
  Partition partition;
  std::vector<double> per_block_norms;
  double epsilon = 0.0;
  std::string strategy;
  std::optional<std::uint64_t> seed;
};

PavedOperator paving_norm(const Matrix& t, const Partition& p);

nlohmann::json paved_to_json(const PavedOperator& paved);
/// Rebuilds the partition and recomputes the norms against `op`.
PavedOperator paved_from_json(const nlohmann::json& j, const Matrix& op);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultPartitionBudget = 30000;

struct ExhaustiveOptions {
  std::uint64_t max_partitions = kDefaultPartitionBudget;
  std::size_t threads = 0;
};

/// Global minimum of epsilon over all partitions into at most r blocks.
/// Throws BudgetExceeded when the partition count exceeds the budget.
PavedOperator exhaustive_pave(const Matrix& t, std::size_t r, const ExhaustiveOptions& opts = {});

struct LocalSearchOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 8;
  bool swap_fallback = true;  // try pair swaps when no single move improves
  std::size_t threads = 0;
};

/// Best-improvement descent from random starts; deterministic in (seed, restarts).
PavedOperator local_search_pave(const Matrix& t, std::size_t r, const LocalSearchOptions& opts = {});

/// Partition with sum_{m in A_j} w_im <= sum_{m in A_l} w_im for i in A_j.
Partition bhkw_partition(const Matrix& w, std::size_t r);

/// Largest violation of the BHKW inequalities (<= 0 when they all hold).
double bhkw_violation(const Matrix& w, const Partition& p);

/// Split into r blocks of linearly independent frame vectors, or nullopt
/// when no such split exists. Throws when a diagonal entry is below 1/r.
std::optional<Partition> rado_horn_partition(const GramProjection& g, std::size_t r);

/// True when the columns of `synthesis` indexed by `block` are independent.
bool columns_independent(const Matrix& synthesis, std::span<const std::size_t> block);

struct RieszBound {
  std::vector<double> lower_bounds;  // c_B = lambda_min(G_B)
  std::vector<double> levels;        // 1 - c_B
  double epsilon = 0.0;
};

RieszBound riesz_paving_bound(const GramProjection& g, const Partition& p);

enum class BoundKind { kConference, kHalfProjection, kBigBlock };

struct BoundCertificate {
  BoundKind kind;
  std::size_t r = 0, n = 0, k = 0;
  double bound = 0.0;
  std::string derivation;
};

std::string to_string(BoundKind kind);
double evaluate_bound(BoundKind kind, std::size_t n, std::size_t k, std::size_t r);
std::vector<BoundCertificate> bound_certificates(std::size_t n, std::size_t k, std::size_t r);
nlohmann::json certificate_to_json(const BoundCertificate& c);
/// Rejects a stored bound that differs from the re-evaluated formula by more than 1e-12.
BoundCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace paving_lab
