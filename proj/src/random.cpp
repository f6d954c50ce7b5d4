#include "paving_lab/random.hpp"

namespace paving_lab {

Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (auto& z : m.data()) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z = {re, im};
  }
  return m;
}

Matrix random_hermitian(std::size_t n, Rng& rng) {
  const Matrix g = random_gaussian(n, n, rng);
  Matrix h = 0.5 * (g + g.adjoint());
  for (std::size_t i = 0; i < n; ++i) h(i, i) = h(i, i).real();
  return h;
}

Matrix random_unitary(std::size_t n, Rng& rng) {
  return orthonormalize_columns(random_gaussian(n, n, rng));
}

Matrix random_projection(std::size_t n, std::size_t k, Rng& rng) {
  const Matrix q = orthonormalize_columns(random_gaussian(n, k, rng));
  Matrix p = q * q.adjoint();
  for (std::size_t i = 0; i < n; ++i) p(i, i) = p(i, i).real();
  return p;
}

Matrix random_reflection(std::size_t n, Rng& rng) {
  const Matrix u = random_unitary(n, rng);
  std::bernoulli_distribution coin(0.5);
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = coin(rng) ? 1.0 : -1.0;
  Matrix r = u * d * u.adjoint();
  for (std::size_t i = 0; i < n; ++i) r(i, i) = r(i, i).real();
  return r;
}

Matrix random_hermitian_contraction(std::size_t n, double norm, Rng& rng) {
  Matrix h = random_hermitian(n, rng);
  const double current = operator_norm(h);
  if (current == 0.0) return h;
  return (norm / current) * h;
}

}  // namespace paving_lab
