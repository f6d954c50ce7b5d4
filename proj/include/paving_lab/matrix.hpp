#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace paving_lab {

using Complex = std::complex<double>;

/// Numerical thresholds shared by every module.
namespace tol {
inline constexpr double kHermitianRel = 1e-12;  // relative to max |m_ij|
inline constexpr double kPsdClamp = 1e-10;      // eigenvalues above -kPsdClamp are clamped to 0
inline constexpr double kRank = 1e-8;           // singular values at or below are treated as 0
inline constexpr double kNorm = 1e-9;           // norm comparisons
inline constexpr double kNonzeroSpectrum = 1e-8;
inline constexpr double kJacobiOffRel = 1e-14;  // off-diagonal Frobenius mass stop criterion
}  // namespace tol

/// Dense row-major complex matrix. Always at least 1x1.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix diagonal(std::span<const Complex> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  Matrix adjoint() const;
  Complex trace() const;
  std::vector<Complex> diag() const;
  double max_abs() const;
  double frobenius_norm() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(Complex s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(Complex s, Matrix a);
Matrix operator*(double s, Matrix a);

/// Largest entrywise |a_ij - b_ij|. Shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// max |m_ij - conj(m_ji)|; infinite for non-square input.
double hermitian_defect(const Matrix& m);
bool is_hermitian(const Matrix& m);

/// Throws std::invalid_argument naming the worst (i, j) pair when `m` is not
/// square or not Hermitian within tol::kHermitianRel.
void require_hermitian(const Matrix& m, std::string_view what);

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Matrix basis;                     // unitary, columns are eigenvectors

  Matrix reconstruct() const;
};

/// Full eigendecomposition by cyclic complex Jacobi sweeps.
SpectralDecomposition hermitian_eig(const Matrix& m);

/// Eigenvalues only (ascending), via Householder tridiagonalization and
/// implicit QL. This is the hot path used by norm evaluations inside searches.
std::vector<double> hermitian_eigenvalues(const Matrix& m);

/// Largest singular value. Hermitian input uses max |eigenvalue|; anything
/// else uses sqrt(lambda_max(M^H M)).
double operator_norm(const Matrix& m);

/// Singular values in descending order by one-sided Jacobi, accurate for the
/// small ones (used for rank decisions).
std::vector<double> singular_values(const Matrix& m);

Matrix psd_sqrt(const Matrix& m);

/// The |block| x |block| submatrix on rows/cols `block`, in the given order.
Matrix principal_compression(const Matrix& m, std::span<const std::size_t> block);

/// Q_A M Q_A at full size (zeros outside the block).
Matrix compress_in_place(const Matrix& m, std::span<const std::size_t> block);

/// Columns `cols` of m, in order.
Matrix select_columns(const Matrix& m, std::span<const std::size_t> cols);

/// Orthonormal basis for the column span (modified Gram-Schmidt, two passes),
/// dropping columns whose residual falls below `drop_tol`.
Matrix orthonormalize_columns(const Matrix& m, double drop_tol = 1e-10);

std::string describe_shape(const Matrix& m);

}  // namespace paving_lab
