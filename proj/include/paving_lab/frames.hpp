#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "paving_lab/matrix.hpp"

namespace paving_lab {

/// A finite frame {f_j} in C^k given by its k x n synthesis array
/// (column j is f_j).
struct FrameSpec {
  std::size_t k = 0;  // dimension
  std::size_t n = 0;  // number of vectors
  Matrix synthesis;
  std::vector<double> norm_sq;
  bool equal_norm = false;
  std::optional<double> equiangular_c;
  std::string family;  // "harmonic" | "conference" | "block"
  nlohmann::json params = nlohmann::json::object();

  /// max |(F F^H)_{ij} - delta_ij|
  double parseval_defect() const;
};

/// sqrt(k(n-k) / (n^2 (n-1))), the common modulus of the off-diagonal Gram
/// entries of a uniform equiangular Parseval (n,k)-frame.
double equiangular_constant(std::size_t n, std::size_t k);

/// An orthogonal projection on C^n; entry (i, j) is <f_j, f_i> for the frame
/// it came from.
class GramProjection {
 public:
  /// Validates P = P^H, P^2 = P within 1e-9 n and integral trace.
  static GramProjection from_matrix(Matrix gram);

  std::size_t n() const { return gram_.rows(); }
  std::size_t rank() const { return rank_; }
  const Matrix& gram() const { return gram_; }
  double diag_max() const { return diag_max_; }
  double diag_min() const { return diag_min_; }

 private:
  GramProjection(Matrix gram, std::size_t rank, double dmax, double dmin)
      : gram_(std::move(gram)), rank_(rank), diag_max_(dmax), diag_min_(dmin) {}
  Matrix gram_;
  std::size_t rank_;
  double diag_max_;
  double diag_min_;
};

struct DifferenceSet {
  std::size_t n = 0;
  std::vector<std::size_t> elements;  // sorted, smallest is 0
  std::size_t lambda = 0;
};

enum class DifferenceSetStatus { kFound, kNoneExists, kBudgetExceeded };

struct DifferenceSetSearch {
  DifferenceSetStatus status;
  std::optional<DifferenceSet> set;
  std::string reason;
};

/// Symmetric {0, +-1} matrix with zero diagonal and C^2 = (n-1) I, checked
/// exactly in integer arithmetic on construction.
class ConferenceMatrix {
 public:
  static ConferenceMatrix from_entries(std::size_t order, std::vector<int> entries);

  std::size_t order() const { return order_; }
  int operator()(std::size_t i, std::size_t j) const { return entries_[i * order_ + j]; }
  const std::vector<int>& entries() const { return entries_; }
  Matrix to_matrix() const;

 private:
  ConferenceMatrix(std::size_t order, std::vector<int> entries) : order_(order), entries_(std::move(entries)) {}
  std::size_t order_;
  std::vector<int> entries_;
};

struct BlockFrame {
  FrameSpec frame;
  std::size_t dependent_block = 0;  // the first rk+1 indices
  std::size_t dependent_rank = 0;   // they span only k dimensions
  std::string certificate;
};

bool is_prime(std::size_t q);

/// Columns f_j = (omega^{j d} / sqrt(n))_{d in D}, omega = exp(2 pi i / n).
FrameSpec harmonic_frame(std::size_t n, std::span<const std::size_t> residues);

/// Exact combinatorial check; `lambda` is written when D is a difference set.
bool is_difference_set(std::size_t n, std::span<const std::size_t> residues, std::size_t* lambda = nullptr);

/// Lexicographically smallest (n, k, lambda) difference set containing 0.
DifferenceSetSearch find_difference_set(std::size_t n, std::size_t k, std::size_t max_modulus = 40);

/// Paley construction from the quadratic character of Z_q, q prime, q = 1 mod 4.
ConferenceMatrix paley_conference(std::size_t q);

/// (I + C / sqrt(n-1)) / 2, a rank n/2 projection with diagonal exactly 1/2.
GramProjection conference_projection(const ConferenceMatrix& c);

/// F^H F for a Parseval frame.
GramProjection gram_projection(const FrameSpec& frame);

/// 2n vectors for C^n: an equal-norm Parseval frame of rk+1 vectors for
/// span{e_0..e_{k-1}} followed by one of 2n-rk-1 vectors for the complement.
BlockFrame block_frame(std::size_t n, std::size_t k, std::size_t r);

/// A k x n array V with orthonormal rows and V^H V = P.
Matrix spectral_factor(const GramProjection& p);

nlohmann::json frame_to_json(const FrameSpec& frame);
FrameSpec frame_from_json(const nlohmann::json& j);
nlohmann::json difference_set_to_json(const DifferenceSet& d);
DifferenceSet difference_set_from_json(const nlohmann::json& j);

}  // namespace paving_lab
