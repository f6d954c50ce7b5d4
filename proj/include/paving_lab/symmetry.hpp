#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "paving_lab/frames.hpp"
#include "paving_lab/matrix.hpp"

namespace paving_lab {

/// A diagonal symmetry diag(s_0..s_{n-1}), s_i = +-1.
class SymmetryVector {
 public:
  explicit SymmetryVector(std::vector<int> signs);
  static SymmetryVector split(std::size_t n, std::span<const std::size_t> minus);

  std::size_t n() const { return signs_.size(); }
  const std::vector<int>& signs() const { return signs_; }
  int operator[](std::size_t i) const { return signs_[i]; }
  std::size_t plus_count() const;

  SymmetryVector negated() const;
  /// The representative of {S, -S} with signs[0] = +1.
  SymmetryVector canonical() const;

  friend bool operator==(const SymmetryVector&, const SymmetryVector&) = default;

 private:
  std::vector<int> signs_;
};

/// ||P S P|| by a direct eigensolve of the n x n product.
double psp_norm(const GramProjection& p, const SymmetryVector& s);

/// ||V S V^H|| for V with orthonormal rows and V^H V = P; equals ||P S P||.
double psp_norm_factored(const Matrix& v, const SymmetryVector& s);

struct CanonicalForm {
  std::size_t m = 0;  // +1 count after normalizing so that m <= n - m
  std::size_t l = 0;  // n - 2m
  SymmetryVector signs;  // the normalized symmetry actually used
  std::vector<std::size_t> plus_indices, minus_indices;
  std::vector<double> d1, d2, d3;  // length m
  std::vector<double> d4;          // length l
  Matrix u1;                       // m x m
  Matrix u2;                       // (m+l) x (m+l)
};

/// Unitary block reduction of P against S; rejects non-projections and
/// symmetries with a single sign.
CanonicalForm canonical_form(const GramProjection& p, const SymmetryVector& s);

/// max |(U^H P_perm U) - block pattern| for the form's unitary U = diag(U1, U2).
double reconstruction_defect(const GramProjection& p, const CanonicalForm& form);

/// max{|1 - 2 lambda| : lambda in sigma'(A) ∪ sigma'(C)}, A and C the diagonal
/// blocks of P on the +1 and -1 indices. 0 when both spectra are empty.
double psp_norm_via_spectra(const GramProjection& p, const SymmetryVector& s);

/// The same maximum read off the canonical diagonals.
double psp_norm_from_form(const CanonicalForm& form);

enum class SymmetryStrategy { kExhaustive, kRandom, kGreedyFlip };

inline constexpr std::size_t kExhaustiveSymmetryDefault = 20;
inline constexpr std::size_t kExhaustiveSymmetryHardLimit = 24;

struct SymmetrySearchOptions {
  SymmetryStrategy strategy = SymmetryStrategy::kExhaustive;
  std::uint64_t seed = 0;
  std::uint64_t samples = 100000;  // random
  std::size_t restarts = 16;       // greedy-flip
  std::size_t max_exhaustive_n = kExhaustiveSymmetryDefault;
  std::size_t threads = 0;
};

struct SymmetrySearchResult {
  SymmetryVector argmin;
  double min_norm = 0.0;
  std::uint64_t scanned = 0;
  std::string method;
  nlohmann::json metadata;
};

SymmetrySearchResult min_symmetry_norm(const GramProjection& p, const SymmetrySearchOptions& opts = {});

/// Minimum of ||PSP|| over an explicit list (deterministic first-index tie-break).
SymmetrySearchResult min_over_symmetries(const GramProjection& p, std::span<const SymmetryVector> list);

/// The 2n symmetries that are -1 on a cyclic interval of length floor(n/2)
/// or ceil(n/2) starting at each index.
std::vector<SymmetryVector> interval_symmetries(std::size_t n);

struct ConjACertificate {
  std::size_t n = 0, k = 0;
  __int128 lhs = 0;  // (k-1) n^2
  __int128 rhs = 0;  // 4 k^2 (n-1)
  bool is_counterexample = false;
  std::string statement;
};

/// Rejects n <= 2k.
ConjACertificate conjA_certificate(std::size_t n, std::size_t k);

/// (q^{m+1}-1)/(q-1) and (q^m-1)/(q-1).
std::pair<std::size_t, std::size_t> singer_parameters(std::size_t q, std::size_t m);

std::string int128_to_string(__int128 v);
nlohmann::json conjA_to_json(const ConjACertificate& c);

struct TraceReport {
  std::size_t n = 0, k = 0, r_size = 0;
  double trace_matrix = 0.0;  // Tr(Q_R P Q_T P Q_R)
  double trace_sum = 0.0;     // sum_{i in R, j in T} |<f_i, f_j>|^2
  double discrepancy = 0.0;
  double final_bound = 0.0;   // (k/4)(1 - k/n)
  std::optional<double> eps;
  std::optional<double> pa_bound;  // k eps (2 - eps) / 4
  std::optional<double> equiangular_c;
  std::optional<double> equiangular_trace;  // m (n-m) c^2, m = min(|R|, |T|)
  std::optional<double> equiangular_cap;    // k (n-k) / (4 (n-1))
  std::optional<double> eps_relation;       // (n-k)/(n-1), the cap on eps(2-eps)
};

/// Computes the trace both ways and throws if they differ by more than 1e-10.
TraceReport conjB_trace_suite(const GramProjection& g, std::span<const std::size_t> r,
                              std::optional<double> eps = std::nullopt);

nlohmann::json trace_report_to_json(const TraceReport& t);

}  // namespace paving_lab
