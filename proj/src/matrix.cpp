#include "paving_lab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace paving_lab {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be positive");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be positive");
  if (data_.size() != rows * cols) {
    std::ostringstream os;
    os << "matrix entry count " << data_.size() << " does not match " << rows << "x" << cols;
    throw std::invalid_argument(os.str());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::diagonal(std::span<const Complex> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

Complex Matrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

std::vector<Complex> Matrix::diag() const {
  std::vector<Complex> d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
  return d;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("shape mismatch in +: " + describe_shape(*this) + " vs " + describe_shape(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("shape mismatch in -: " + describe_shape(*this) + " vs " + describe_shape(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator-(Matrix a) { return a *= -1.0; }
Matrix operator*(Complex s, Matrix a) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= Complex(s, 0.0); }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("shape mismatch in *: " + describe_shape(a) + " vs " + describe_shape(b));
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const Complex ail = a(i, l);
      if (ail == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ail * b(l, j);
    }
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("shape mismatch in max_abs_diff: " + describe_shape(a) + " vs " + describe_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double hermitian_defect(const Matrix& m) {
  if (!m.is_square()) return HUGE_VAL;
  double d = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
  return d;
}

bool is_hermitian(const Matrix& m) {
  return m.is_square() && hermitian_defect(m) <= tol::kHermitianRel * m.max_abs();
}

void require_hermitian(const Matrix& m, std::string_view what) {
  if (!m.is_square()) {
    throw std::invalid_argument(std::string(what) + ": expected a square matrix, got " + describe_shape(m));
  }
  const double scale = m.max_abs();
  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      const double d = std::abs(m(i, j) - std::conj(m(j, i)));
      if (d > worst) {
        worst = d;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > tol::kHermitianRel * scale) {
    std::ostringstream os;
    os << what << ": not Hermitian, entries (" << wi << "," << wj << ") and (" << wj << "," << wi
       << ") differ by " << worst;
    throw std::invalid_argument(os.str());
  }
}

Matrix SpectralDecomposition::reconstruct() const {
  const std::size_t n = eigenvalues.size();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += basis(i, t) * eigenvalues[t] * std::conj(basis(j, t));
      out(i, j) = s;
    }
  return out;
}

namespace {

Matrix symmetrized(const Matrix& m) {
  Matrix h = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    h(i, i) = Complex(m(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

// Unitary 2x2 rotation U (acting on coordinates p, q) that annihilates the
// (p, q) entry of the Hermitian block [[app, apq], [conj(apq), aqq]] under
// U^H B U. Returns {U_pp, U_pq, U_qp, U_qq}.
struct Rotation {
  Complex pp, pq, qp, qq;
};

Rotation jacobi_rotation(double app, double aqq, Complex apq) {
  const double r = std::abs(apq);
  const Complex phase = apq / r;  // e^{i phi}
  const double theta = (aqq - app) / (2.0 * r);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  return {c, s, -s * std::conj(phase), c * std::conj(phase)};
}

}  // namespace

SpectralDecomposition hermitian_eig(const Matrix& m) {
  require_hermitian(m, "hermitian_eig");
  const std::size_t n = m.rows();
  Matrix a = symmetrized(m);
  Matrix v = Matrix::identity(n);
  const double fro = a.frobenius_norm();

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && fro > 0.0; ++sweep) {
    if (off_mass() <= tol::kJacobiOffRel * fro) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const Rotation u = jacobi_rotation(a(p, p).real(), a(q, q).real(), apq);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex x = a(k, p), y = a(k, q);
          a(k, p) = x * u.pp + y * u.qp;
          a(k, q) = x * u.pq + y * u.qq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex x = a(p, k), y = a(q, k);
          a(p, k) = std::conj(u.pp) * x + std::conj(u.qp) * y;
          a(q, k) = std::conj(u.pq) * x + std::conj(u.qq) * y;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex x = v(k, p), y = v(k, q);
          v(k, p) = x * u.pp + y * u.qp;
          v(k, q) = x * u.pq + y * u.qq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  SpectralDecomposition out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t t = 0; t < n; ++t) {
    out.eigenvalues[t] = a(order[t], order[t]).real();
    for (std::size_t k = 0; k < n; ++k) out.basis(k, t) = v(k, order[t]);
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const Matrix& m) {
  require_hermitian(m, "hermitian_eigenvalues");
  const std::size_t n = m.rows();
  Matrix a = symmetrized(m);
  std::vector<double> d(n), e(n, 0.0);

  // Householder reduction to Hermitian tridiagonal form; only the trailing
  // block is kept up to date. The subdiagonal moduli are what survive.
  std::vector<Complex> v(n), p(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    double xnorm2 = 0.0;
    for (std::size_t i = 0; i < len; ++i) xnorm2 += std::norm(a(k + 1 + i, k));
    const double xnorm = std::sqrt(xnorm2);
    e[k] = xnorm;
    if (xnorm == 0.0) continue;
    const Complex x0 = a(k + 1, k);
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0, 0.0) : x0 / std::abs(x0);
    const Complex alpha = -phase * xnorm;
    for (std::size_t i = 0; i < len; ++i) v[i] = a(k + 1 + i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = 0; i < len; ++i) vnorm2 += std::norm(v[i]);
    const double vnorm = std::sqrt(vnorm2);
    for (std::size_t i = 0; i < len; ++i) v[i] /= vnorm;
    // p = S v, K = v^H p, w = p - K v, S -= 2 (v w^H + w v^H)
    Complex kk = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < len; ++j) s += a(k + 1 + i, k + 1 + j) * v[j];
      p[i] = s;
      kk += std::conj(v[i]) * s;
    }
    const double kr = kk.real();
    for (std::size_t i = 0; i < len; ++i) w[i] = p[i] - kr * v[i];
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t j = 0; j < len; ++j)
        a(k + 1 + i, k + 1 + j) -= 2.0 * (v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]));
  }
  if (n >= 2) e[n - 2] = std::abs(a(n - 1, n - 2));
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();

  // Implicit QL with Wilkinson-style shifts on the real tridiagonal (d, e),
  // e[i] coupling i and i+1.
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t mm;
    do {
      for (mm = l; mm + 1 < n; ++mm) {
        const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
        if (std::abs(e[mm]) <= eps * dd) break;
      }
      if (mm != l) {
        if (++iter > 60) throw std::runtime_error("hermitian_eigenvalues: QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, pp = 0.0;
        bool deflated = false;
        for (std::size_t ii = mm; ii-- > l;) {
          const double f = s * e[ii];
          const double b = c * e[ii];
          r = std::hypot(f, g);
          e[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= pp;
            e[mm] = 0.0;
            deflated = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - pp;
          r = (d[ii] - g) * s + 2.0 * c * b;
          pp = s * r;
          d[ii + 1] = g + pp;
          g = c * r - b;
        }
        if (deflated) continue;
        d[l] -= pp;
        e[l] = g;
        e[mm] = 0.0;
      }
    } while (mm != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

double operator_norm(const Matrix& m) {
  if (is_hermitian(m)) {
    const auto ev = hermitian_eigenvalues(m);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
  }
  const auto ev = hermitian_eigenvalues(m.adjoint() * m);
  return std::sqrt(std::max(0.0, ev.back()));
}

std::vector<double> singular_values(const Matrix& m) {
  // One-sided Jacobi orthogonalizes columns; work with the wider side as rows.
  Matrix a = m.rows() >= m.cols() ? m : m.adjoint();
  const std::size_t rows = a.rows(), cols = a.cols();
  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma = 0.0;
        for (std::size_t k = 0; k < rows; ++k) {
          alpha += std::norm(a(k, p));
          beta += std::norm(a(k, q));
          gamma += std::conj(a(k, p)) * a(k, q);
        }
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || std::abs(gamma) <= 1e-300) continue;
        rotated = true;
        const Rotation u = jacobi_rotation(alpha, beta, gamma);
        for (std::size_t k = 0; k < rows; ++k) {
          const Complex x = a(k, p), y = a(k, q);
          a(k, p) = x * u.pp + y * u.qp;
          a(k, q) = x * u.pq + y * u.qq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) s += std::norm(a(k, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

Matrix psd_sqrt(const Matrix& m) {
  const auto sd = hermitian_eig(m);
  if (sd.eigenvalues.front() < -tol::kPsdClamp) {
    std::ostringstream os;
    os << "psd_sqrt: matrix is not positive semidefinite (lambda_min = " << sd.eigenvalues.front() << ")";
    throw std::invalid_argument(os.str());
  }
  // Eigenvalues at rounding level are zero; their square roots would
  // otherwise surface at sqrt(eps).
  const double scale = std::max(std::abs(sd.eigenvalues.front()), std::abs(sd.eigenvalues.back()));
  const double noise = static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() * scale;
  std::vector<double> roots(sd.eigenvalues.size());
  for (std::size_t i = 0; i < roots.size(); ++i)
    roots[i] = sd.eigenvalues[i] <= noise ? 0.0 : std::sqrt(sd.eigenvalues[i]);
  SpectralDecomposition root{roots, sd.basis};
  Matrix out = root.reconstruct();
  for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) = out(i, i).real();
  return out;
}

namespace {
void check_indices(const Matrix& m, std::span<const std::size_t> idx, std::size_t bound, const char* what) {
  if (idx.empty()) throw std::invalid_argument(std::string(what) + ": empty index set");
  for (auto i : idx) {
    if (i >= bound) {
      std::ostringstream os;
      os << what << ": index " << i << " out of range for " << describe_shape(m);
      throw std::invalid_argument(os.str());
    }
  }
}
}  // namespace

Matrix principal_compression(const Matrix& m, std::span<const std::size_t> block) {
  if (!m.is_square()) throw std::invalid_argument("principal_compression: matrix must be square");
  check_indices(m, block, m.rows(), "principal_compression");
  Matrix out(block.size(), block.size());
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = 0; j < block.size(); ++j) out(i, j) = m(block[i], block[j]);
  return out;
}

Matrix compress_in_place(const Matrix& m, std::span<const std::size_t> block) {
  if (!m.is_square()) throw std::invalid_argument("compress_in_place: matrix must be square");
  check_indices(m, block, m.rows(), "compress_in_place");
  Matrix out(m.rows(), m.cols());
  for (auto i : block)
    for (auto j : block) out(i, j) = m(i, j);
  return out;
}

Matrix select_columns(const Matrix& m, std::span<const std::size_t> cols) {
  check_indices(m, cols, m.cols(), "select_columns");
  Matrix out(m.rows(), cols.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(i, cols[j]);
  return out;
}

Matrix orthonormalize_columns(const Matrix& m, double drop_tol) {
  std::vector<std::vector<Complex>> basis;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::vector<Complex> x(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) x[i] = m(i, j);
    double orig = 0.0;
    for (const auto& z : x) orig += std::norm(z);
    orig = std::sqrt(orig);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        Complex dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += std::conj(b[i]) * x[i];
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dot * b[i];
      }
    }
    double nrm = 0.0;
    for (const auto& z : x) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    if (nrm <= drop_tol * std::max(1.0, orig)) continue;
    for (auto& z : x) z /= nrm;
    basis.push_back(std::move(x));
  }
  if (basis.empty()) throw std::invalid_argument("orthonormalize_columns: columns span the zero space");
  Matrix out(m.rows(), basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = basis[j][i];
  return out;
}

std::string describe_shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace paving_lab
