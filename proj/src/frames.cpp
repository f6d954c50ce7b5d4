#include "paving_lab/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "paving_lab/matrix_io.hpp"

namespace paving_lab {

namespace {

constexpr double kParsevalTol = 1e-10;
constexpr double kEqualNormTol = 1e-10;

// exp(2 pi i * num / den) with the numerator reduced exactly first.
Complex root_of_unity(std::size_t num, std::size_t den) {
  const std::size_t r = num % den;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

void finalize_norms(FrameSpec& f) {
  f.norm_sq.assign(f.n, 0.0);
  for (std::size_t j = 0; j < f.n; ++j)
    for (std::size_t a = 0; a < f.k; ++a) f.norm_sq[j] += std::norm(f.synthesis(a, j));
}

}  // namespace

double FrameSpec::parseval_defect() const {
  return max_abs_diff(synthesis * synthesis.adjoint(), Matrix::identity(k));
}

double equiangular_constant(std::size_t n, std::size_t k) {
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  return std::sqrt(kk * (nn - kk) / (nn * nn * (nn - 1.0)));
}

GramProjection GramProjection::from_matrix(Matrix gram) {
  require_hermitian(gram, "GramProjection");
  const std::size_t n = gram.rows();
  const double idem = max_abs_diff(gram * gram, gram);
  if (idem > 1e-9 * static_cast<double>(n)) {
    std::ostringstream os;
    os << "GramProjection: P^2 differs from P by " << idem;
    throw std::invalid_argument(os.str());
  }
  const double tr = gram.trace().real();
  const double rounded = std::round(tr);
  if (std::abs(tr - rounded) > 1e-8 || rounded < 0.0) {
    std::ostringstream os;
    os << "GramProjection: trace " << tr << " is not an integer rank";
    throw std::invalid_argument(os.str());
  }
  double dmax = -HUGE_VAL, dmin = HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i) {
    dmax = std::max(dmax, gram(i, i).real());
    dmin = std::min(dmin, gram(i, i).real());
  }
  return GramProjection(std::move(gram), static_cast<std::size_t>(rounded), dmax, dmin);
}

ConferenceMatrix ConferenceMatrix::from_entries(std::size_t order, std::vector<int> entries) {
  if (order < 2) throw std::invalid_argument("conference matrix: order must be at least 2");
  if (entries.size() != order * order) throw std::invalid_argument("conference matrix: entry count mismatch");
  auto at = [&](std::size_t i, std::size_t j) { return entries[i * order + j]; };
  for (std::size_t i = 0; i < order; ++i) {
    if (at(i, i) != 0) {
      throw std::invalid_argument("conference matrix: nonzero diagonal entry at (" + std::to_string(i) + "," +
                                  std::to_string(i) + ")");
    }
    for (std::size_t j = 0; j < order; ++j) {
      if (i != j && at(i, j) != 1 && at(i, j) != -1)
        throw std::invalid_argument("conference matrix: off-diagonal entry is not +-1 at (" + std::to_string(i) +
                                    "," + std::to_string(j) + ")");
      if (at(i, j) != at(j, i))
        throw std::invalid_argument("conference matrix: not symmetric at (" + std::to_string(i) + "," +
                                    std::to_string(j) + ")");
    }
  }
  const long long expected = static_cast<long long>(order) - 1;
  for (std::size_t i = 0; i < order; ++i) {
    for (std::size_t j = 0; j < order; ++j) {
      long long s = 0;
      for (std::size_t t = 0; t < order; ++t) s += static_cast<long long>(at(i, t)) * at(t, j);
      if (s != (i == j ? expected : 0))
        throw std::invalid_argument("conference matrix: C^2 != (n-1)I at (" + std::to_string(i) + "," +
                                    std::to_string(j) + ")");
    }
  }
  return ConferenceMatrix(order, std::move(entries));
}

Matrix ConferenceMatrix::to_matrix() const {
  Matrix m(order_, order_);
  for (std::size_t i = 0; i < order_; ++i)
    for (std::size_t j = 0; j < order_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
  return m;
}

bool is_prime(std::size_t q) {
  if (q < 2) return false;
  for (std::size_t d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

bool is_difference_set(std::size_t n, std::span<const std::size_t> residues, std::size_t* lambda) {
  if (n < 2 || residues.empty()) return false;
  std::vector<std::size_t> count(n, 0);
  for (auto a : residues)
    for (auto b : residues)
      if (a != b) ++count[(a + n - b) % n];
  for (std::size_t t = 2; t < n; ++t)
    if (count[t] != count[1]) return false;
  if (lambda) *lambda = count[1];
  return true;
}

FrameSpec harmonic_frame(std::size_t n, std::span<const std::size_t> residues) {
  if (residues.empty()) throw std::invalid_argument("harmonic_frame: empty residue set");
  std::vector<std::size_t> d(residues.begin(), residues.end());
  for (auto x : d)
    if (x >= n) throw std::invalid_argument("harmonic_frame: residue " + std::to_string(x) + " not below n");
  std::vector<std::size_t> sorted = d;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("harmonic_frame: repeated residue");

  const std::size_t k = d.size();
  Matrix synth(k, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t j = 0; j < n; ++j) synth(a, j) = scale * root_of_unity(j * d[a], n);

  FrameSpec f{.k = k, .n = n, .synthesis = std::move(synth), .norm_sq = {}, .equal_norm = true,
              .equiangular_c = std::nullopt, .family = "harmonic",
              .params = {{"n", n}, {"residues", d}}};
  finalize_norms(f);
  if (k < n && is_difference_set(n, d)) f.equiangular_c = equiangular_constant(n, k);
  return f;
}

DifferenceSetSearch find_difference_set(std::size_t n, std::size_t k, std::size_t max_modulus) {
  if (n < 2 || k < 2 || k >= n) throw std::invalid_argument("find_difference_set: need n >= 2 and 2 <= k < n");
  if ((k * (k - 1)) % (n - 1) != 0) {
    return {DifferenceSetStatus::kNoneExists, std::nullopt,
            "lambda = k(k-1)/(n-1) is not an integer"};
  }
  if (n > max_modulus) {
    return {DifferenceSetStatus::kBudgetExceeded, std::nullopt,
            "modulus " + std::to_string(n) + " exceeds search budget " + std::to_string(max_modulus)};
  }
  const std::size_t lambda = k * (k - 1) / (n - 1);

  std::vector<std::size_t> chosen{0};
  std::vector<std::size_t> count(n, 0);
  // Depth-first in increasing order, so the first hit is lexicographically smallest.
  auto extend = [&](auto&& self, std::size_t next) -> bool {
    if (chosen.size() == k) return true;
    for (std::size_t e = next; e + (k - chosen.size()) <= n; ++e) {
      bool ok = true;
      std::size_t added = 0;
      for (; added < chosen.size(); ++added) {
        const std::size_t d = chosen[added];
        const std::size_t up = (e + n - d) % n, down = (d + n - e) % n;
        ++count[up];
        ++count[down];
        if (count[up] > lambda || count[down] > lambda) {
          ok = false;
          ++added;
          break;
        }
      }
      if (ok) {
        chosen.push_back(e);
        if (self(self, e + 1)) return true;
        chosen.pop_back();
      }
      for (std::size_t i = 0; i < added; ++i) {
        const std::size_t d = chosen[i];
        --count[(e + n - d) % n];
        --count[(d + n - e) % n];
      }
    }
    return false;
  };
  if (extend(extend, 1)) {
    return {DifferenceSetStatus::kFound, DifferenceSet{n, chosen, lambda}, ""};
  }
  return {DifferenceSetStatus::kNoneExists, std::nullopt, "exhaustive search found no difference set"};
}

ConferenceMatrix paley_conference(std::size_t q) {
  if (!is_prime(q) || q == 2) throw std::invalid_argument("paley_conference: q = " + std::to_string(q) + " is not an odd prime");
  if (q % 4 != 1) throw std::invalid_argument("paley_conference: q = " + std::to_string(q) + " is not 1 mod 4");
  std::vector<int> chi(q, -1);
  chi[0] = 0;
  for (std::size_t x = 1; x < q; ++x) chi[(x * x) % q] = 1;
  const std::size_t n = q + 1;
  std::vector<int> e(n * n, 0);
  for (std::size_t j = 1; j < n; ++j) e[j] = e[j * n] = 1;
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b) e[(a + 1) * n + (b + 1)] = chi[(b + q - a) % q];
  return ConferenceMatrix::from_entries(n, std::move(e));
}

GramProjection conference_projection(const ConferenceMatrix& c) {
  const std::size_t n = c.order();
  // Revalidate so a hand-built matrix cannot slip through.
  const auto checked = ConferenceMatrix::from_entries(n, c.entries());
  const double s = 1.0 / std::sqrt(static_cast<double>(n - 1));
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = i == j ? 0.5 : 0.5 * s * checked(i, j);
  return GramProjection::from_matrix(std::move(p));
}

GramProjection gram_projection(const FrameSpec& frame) {
  const Matrix ffh = frame.synthesis * frame.synthesis.adjoint();
  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < frame.k; ++i)
    for (std::size_t j = 0; j < frame.k; ++j) {
      const double d = std::abs(ffh(i, j) - (i == j ? 1.0 : 0.0));
      if (d > worst) {
        worst = d;
        wi = i;
        wj = j;
      }
    }
  if (worst > kParsevalTol) {
    std::ostringstream os;
    os << "gram_projection: frame is not Parseval, (F F^H)(" << wi << "," << wj << ") deviates by " << worst;
    throw std::invalid_argument(os.str());
  }
  Matrix g = frame.synthesis.adjoint() * frame.synthesis;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) = g(i, i).real();
  return GramProjection::from_matrix(std::move(g));
}

BlockFrame block_frame(std::size_t n, std::size_t k, std::size_t r) {
  if (r < 2) throw std::invalid_argument("block_frame: r must be at least 2");
  if (k == 0 || k >= n) throw std::invalid_argument("block_frame: need 1 <= k < n");
  const std::size_t first = r * k + 1;
  if (first > 2 * n) throw std::invalid_argument("block_frame: rk+1 exceeds 2n");
  const std::size_t second = 2 * n - first;
  if (second < n - k)
    throw std::invalid_argument("block_frame: " + std::to_string(second) +
                                " vectors cannot form a Parseval frame for the complementary " +
                                std::to_string(n - k) + "-dimensional subspace");

  std::vector<std::size_t> low(k), high(n - k);
  for (std::size_t i = 0; i < k; ++i) low[i] = i;
  for (std::size_t i = 0; i < n - k; ++i) high[i] = i;
  const FrameSpec a = harmonic_frame(first, low);
  const FrameSpec b = harmonic_frame(second, high);

  Matrix synth(n, 2 * n);
  for (std::size_t row = 0; row < k; ++row)
    for (std::size_t j = 0; j < first; ++j) synth(row, j) = a.synthesis(row, j);
  for (std::size_t row = 0; row < n - k; ++row)
    for (std::size_t j = 0; j < second; ++j) synth(k + row, first + j) = b.synthesis(row, j);

  FrameSpec f{.k = n, .n = 2 * n, .synthesis = std::move(synth), .norm_sq = {}, .equal_norm = false,
              .equiangular_c = std::nullopt, .family = "block",
              .params = {{"n", n}, {"k", k}, {"r", r}}};
  finalize_norms(f);
  f.equal_norm = std::abs(a.norm_sq[0] - b.norm_sq[0]) <= kEqualNormTol;

  std::ostringstream cert;
  cert << "indices 0.." << first - 1 << " lie in a " << k << "-dimensional coordinate subspace; any A among them with |A| >= "
       << k + 1 << " carries a nonzero a supported in A with P a = 0, so ||Q_A (I-P) Q_A|| = 1";
  return BlockFrame{std::move(f), first, k, cert.str()};
}

Matrix spectral_factor(const GramProjection& p) {
  const std::size_t k = p.rank();
  if (k == 0) throw std::invalid_argument("spectral_factor: zero projection has no synthesis");
  const auto sd = hermitian_eig(p.gram());
  const std::size_t n = p.n();
  Matrix v(k, n);
  // Top k eigenvectors (eigenvalue 1) become the rows, conjugated.
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t col = n - k + t;
    for (std::size_t j = 0; j < n; ++j) v(t, j) = std::conj(sd.basis(j, col));
  }
  return v;
}

nlohmann::json frame_to_json(const FrameSpec& frame) {
  nlohmann::json j = {{"n", frame.n},
                      {"k", frame.k},
                      {"synthesis", matrix_to_json(frame.synthesis)},
                      {"family", frame.family},
                      {"params", frame.params}};
  if (frame.equiangular_c) j["equiangular_c"] = *frame.equiangular_c;
  return j;
}

FrameSpec frame_from_json(const nlohmann::json& j) {
  Matrix synth = matrix_from_json(j.at("synthesis"));
  const auto n = j.at("n").get<std::size_t>();
  const auto k = j.at("k").get<std::size_t>();
  if (synth.rows() != k || synth.cols() != n) throw std::invalid_argument("frame json: synthesis shape does not match (k, n)");
  FrameSpec f{.k = k, .n = n, .synthesis = std::move(synth), .norm_sq = {}, .equal_norm = false,
              .equiangular_c = std::nullopt, .family = j.at("family").get<std::string>(),
              .params = j.value("params", nlohmann::json::object())};
  finalize_norms(f);
  f.equal_norm = std::all_of(f.norm_sq.begin(), f.norm_sq.end(),
                             [&](double v) { return std::abs(v - f.norm_sq[0]) <= kEqualNormTol; });
  if (j.contains("equiangular_c")) f.equiangular_c = j.at("equiangular_c").get<double>();
  return f;
}

nlohmann::json difference_set_to_json(const DifferenceSet& d) {
  return {{"n", d.n}, {"k", d.elements.size()}, {"lambda", d.lambda}, {"elements", d.elements}};
}

DifferenceSet difference_set_from_json(const nlohmann::json& j) {
  DifferenceSet d{j.at("n").get<std::size_t>(), j.at("elements").get<std::vector<std::size_t>>(),
                  j.at("lambda").get<std::size_t>()};
  std::size_t lambda = 0;
  if (!is_difference_set(d.n, d.elements, &lambda) || lambda != d.lambda)
    throw std::invalid_argument("difference set json: elements do not form a difference set with the stated lambda");
  if (j.contains("k") && j.at("k").get<std::size_t>() != d.elements.size())
    throw std::invalid_argument("difference set json: k does not match element count");
  return d;
}

}  // namespace paving_lab
