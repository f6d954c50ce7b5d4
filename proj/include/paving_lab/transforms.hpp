#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>

#include "paving_lab/frames.hpp"
#include "paving_lab/matrix.hpp"
#include "paving_lab/paving.hpp"

namespace paving_lab {

/// [[A, S], [S, -A]] with S = sqrt(I - A^2): a reflection whose top-left
/// corner is A. Rejects non-Hermitian A or ||A|| > 1 + 1e-10.
Matrix dilate(const Matrix& a);

/// P = (I + R)/2; rejects R unless R = R^H and R^2 = I within 1e-9 n.
Matrix reflection_to_projection(const Matrix& r);

/// R = 2P - I; rejects P unless P = P^H and P^2 = P within 1e-9 n.
Matrix projection_to_reflection(const Matrix& p);

/// Common refinement of a paving of (I+R)/2 and one of (I-R)/2, both checked
/// at level (1+eps)/2, returned as a paving of R at level <= eps.
PavedOperator combine_pavings(const Partition& pav_p, const Partition& pav_pneg, const Matrix& r, double eps);

/// (1 + 2 delta) eps
double transferred_level(double delta, double eps);

/// max_i |q_ii - 1/2|
double half_diagonal_deviation(const Matrix& q);

struct TransferCertificate {
  double delta = 0.0;
  double epsilon = 0.0;  // level reached on the half-diagonal projection
  double beta = 0.0;     // (1 + 2 delta) * epsilon
  PavedOperator half_projection;
  PavedOperator result;  // paving of Q, result.epsilon <= beta
};

struct NoCertificate {
  double delta = 0.0;
  double beta = 0.0;
  std::string reason;
};

struct TransferOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 64;
  std::size_t exhaustive_max_dim = 12;  // the dilated dimension 2n; larger or over-budget uses local search
  std::uint64_t max_partitions = kDefaultPartitionBudget;
  std::size_t threads = 0;
};

/// Paves Q through the half-diagonal projection built from the dilation of
/// (2/(1+2 delta))(Q - diag Q). `eps` is the level asked of that projection.
std::variant<TransferCertificate, NoCertificate> transfer_paving(const GramProjection& q, double eps, std::size_t r,
                                                                 const TransferOptions& opts = {});

}  // namespace paving_lab
