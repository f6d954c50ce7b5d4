#include "paving_lab/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace paving_lab {

namespace {

constexpr double kContractionSlack = 1e-10;
constexpr double kIdentityTol = 1e-9;
constexpr double kLevelTol = 1e-9;

void require_identity(const Matrix& defect_lhs, const Matrix& defect_rhs, const char* what) {
  const double defect = max_abs_diff(defect_lhs, defect_rhs);
  if (defect > kIdentityTol * static_cast<double>(defect_lhs.rows())) {
    std::ostringstream os;
    os << what << " (defect " << defect << ")";
    throw std::invalid_argument(os.str());
  }
}

void check_level(const Matrix& op, const Partition& p, double level, const char* name) {
  const auto paved = paving_norm(op, p);
  for (std::size_t b = 0; b < p.size(); ++b) {
    if (paved.per_block_norms[b] > level + kLevelTol) {
      std::ostringstream os;
      os << "combine_pavings: block " << b << " of the paving of " << name << " has norm " << paved.per_block_norms[b]
         << " > " << level;
      throw std::invalid_argument(os.str());
    }
  }
}

}  // namespace

Matrix dilate(const Matrix& a) {
  require_hermitian(a, "dilate");
  const auto sd = hermitian_eig(a);
  const double norm = std::max(std::abs(sd.eigenvalues.front()), std::abs(sd.eigenvalues.back()));
  if (norm > 1.0 + kContractionSlack) {
    std::ostringstream os;
    os << "dilate: ||A|| = " << norm << " exceeds 1";
    throw std::invalid_argument(os.str());
  }
  // sqrt(I - A^2) from the spectrum of A, so |lambda| within the slack maps to 0.
  const std::size_t n = a.rows();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sqrt(std::max(0.0, 1.0 - sd.eigenvalues[i] * sd.eigenvalues[i]));
  const Matrix root = sd.basis * Matrix::diagonal(s) * sd.basis.adjoint();

  Matrix r(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r(i, j) = a(i, j);
      r(n + i, n + j) = -a(i, j);
      const Complex sij = (root(i, j) + std::conj(root(j, i))) / 2.0;
      r(i, n + j) = sij;
      r(n + i, j) = sij;
    }
  }
  return r;
}

Matrix reflection_to_projection(const Matrix& r) {
  require_hermitian(r, "reflection_to_projection");
  require_identity(r * r, Matrix::identity(r.rows()), "reflection_to_projection: R^2 != I");
  return 0.5 * (Matrix::identity(r.rows()) + r);
}

Matrix projection_to_reflection(const Matrix& p) {
  require_hermitian(p, "projection_to_reflection");
  require_identity(p * p, p, "projection_to_reflection: P^2 != P");
  return 2.0 * p - Matrix::identity(p.rows());
}

PavedOperator combine_pavings(const Partition& pav_p, const Partition& pav_pneg, const Matrix& r, double eps) {
  const Matrix p = reflection_to_projection(r);
  const Matrix pneg = Matrix::identity(r.rows()) - p;
  const double level = (1.0 + eps) / 2.0;
  check_level(p, pav_p, level, "(I+R)/2");
  check_level(pneg, pav_pneg, level, "(I-R)/2");
  auto out = paving_norm(r, pav_p.refine(pav_pneg));
  out.strategy = "refinement";
  if (out.epsilon > eps + kLevelTol) {
    std::ostringstream os;
    os << "combine_pavings: refinement reaches " << out.epsilon << " > " << eps;
    throw std::logic_error(os.str());
  }
  return out;
}

double transferred_level(double delta, double eps) { return (1.0 + 2.0 * delta) * eps; }

double half_diagonal_deviation(const Matrix& q) {
  double delta = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) delta = std::max(delta, std::abs(q(i, i).real() - 0.5));
  return delta;
}

std::variant<TransferCertificate, NoCertificate> transfer_paving(const GramProjection& q, double eps, std::size_t r,
                                                                 const TransferOptions& opts) {
  const std::size_t n = q.n();
  const double delta = half_diagonal_deviation(q.gram());
  const double beta = transferred_level(delta, eps);
  if (beta >= 1.0) {
    std::ostringstream os;
    os << "(1+2 delta) eps = " << beta << " >= 1 with measured delta = " << delta;
    return NoCertificate{delta, beta, os.str()};
  }

  Matrix b = q.gram();
  for (std::size_t i = 0; i < n; ++i) b(i, i) = 0.0;
  const double bound = (1.0 + 2.0 * delta) / 2.0;
  const double bnorm = operator_norm(b);
  if (bnorm > bound + kLevelTol) {
    std::ostringstream os;
    os << "transfer_paving: ||Q - diag Q|| = " << bnorm << " exceeds (1+2 delta)/2 = " << bound
       << "; input is not a projection";
    throw std::invalid_argument(os.str());
  }

  const Matrix half = reflection_to_projection(dilate((2.0 / (1.0 + 2.0 * delta)) * b));
  const bool exhaustive = 2 * n <= opts.exhaustive_max_dim && count_partitions(2 * n, r) <= opts.max_partitions;
  PavedOperator paved_half = exhaustive
                                 ? exhaustive_pave(half, r, {.max_partitions = opts.max_partitions, .threads = opts.threads})
                                 : local_search_pave(half, r, {.seed = opts.seed, .restarts = opts.restarts, .threads = opts.threads});
  if (paved_half.epsilon > eps + kLevelTol) {
    std::ostringstream os;
    os << "the " << paved_half.strategy << " search paved the half-diagonal projection only at " << paved_half.epsilon
       << " > eps = " << eps << " (delta = " << delta << ")";
    return NoCertificate{delta, beta, os.str()};
  }

  auto result = paving_norm(q.gram(), paved_half.partition.restrict_to_prefix(n));
  result.strategy = "transfer/" + paved_half.strategy;
  result.seed = paved_half.seed;
  const double reached = transferred_level(delta, paved_half.epsilon);
  if (result.epsilon > reached + kLevelTol) {
    std::ostringstream os;
    os << "transfer_paving: induced paving of Q has level " << result.epsilon << " > " << reached;
    throw std::logic_error(os.str());
  }
  return TransferCertificate{delta, paved_half.epsilon, beta, std::move(paved_half), std::move(result)};
}

}  // namespace paving_lab
