#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "paving_lab/paving.hpp"
#include "paving_lab/random.hpp"
#include "paving_lab/symmetry.hpp"

using namespace paving_lab;

namespace {

GramProjection rank_one_2x2(double c) {
  Matrix p(2, 2);
  p(0, 0) = 1.0 - c;
  p(1, 1) = c;
  p(0, 1) = p(1, 0) = std::sqrt(c * (1.0 - c));
  return GramProjection::from_matrix(p);
}

GramProjection conference6() { return conference_projection(paley_conference(5)); }

SymmetryVector random_symmetry(std::size_t n, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<int> s(n);
  for (auto& x : s) x = coin(rng) ? 1 : -1;
  return SymmetryVector(s);
}

}  // namespace

TEST_CASE("symmetry vectors") {
  const SymmetryVector s({-1, 1, 1});
  CHECK(s.canonical().signs() == std::vector<int>{1, -1, -1});
  CHECK(s.negated().negated() == s);
  CHECK(s.plus_count() == 2);
  CHECK_THROWS_AS(SymmetryVector({1, 0}), std::invalid_argument);
  const std::size_t minus[] = {1};
  CHECK(SymmetryVector::split(3, minus).signs() == std::vector<int>{1, -1, 1});
}

TEST_CASE("psp_norm examples") {
  const auto p = conference6();
  CHECK(std::abs(psp_norm(p, SymmetryVector(std::vector<int>(6, 1))) - 1.0) < 1e-12);

  const auto q = rank_one_2x2(0.25);
  const SymmetryVector s({1, -1});
  CHECK(std::abs(psp_norm(q, s) - 0.5) < 1e-14);
  CHECK(std::abs(psp_norm_via_spectra(q, s) - 0.5) < 1e-14);
  for (double c : {0.1, 0.3, 0.7, 0.95}) CHECK(std::abs(psp_norm(rank_one_2x2(c), s) - std::abs(1.0 - 2.0 * c)) < 1e-14);

  const SymmetryVector half({1, 1, 1, -1, -1, -1});
  CHECK(std::abs(psp_norm(p, half) - psp_norm_via_spectra(p, half)) < 1e-8);
  CHECK(std::abs(psp_norm(p, half) - psp_norm_factored(spectral_factor(p), half)) < 1e-12);
  CHECK(psp_norm(p, half) == psp_norm(p, half.negated()));
}

TEST_CASE("canonical form examples") {
  const double d[] = {1.0, 0.0};
  const auto diag = GramProjection::from_matrix(Matrix::diagonal(d));
  const auto f = canonical_form(diag, SymmetryVector({1, -1}));
  CHECK(f.m == 1);
  CHECK(f.l == 0);
  CHECK(std::abs(f.d1[0] - 1.0) < 1e-14);
  CHECK(f.d2[0] == 0.0);
  CHECK(std::abs(f.d3[0]) < 1e-14);
  CHECK(f.d4.empty());

  const auto q = rank_one_2x2(0.3);
  const auto g = canonical_form(q, SymmetryVector({1, -1}));
  CHECK(std::abs(g.d1[0] - 0.7) < 1e-12);
  CHECK(std::abs(g.d3[0] - 0.3) < 1e-12);
  CHECK(std::abs(g.d2[0] - std::sqrt(0.21)) < 1e-12);

  const auto p = conference6();
  const auto h = canonical_form(p, SymmetryVector({1, 1, 1, -1, -1, -1}));
  CHECK(h.m == 3);
  CHECK(h.l == 0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(h.d2[i] > 0.0);
    CHECK(std::abs(h.d1[i] + h.d3[i] - 1.0) < 1e-8);
    CHECK(std::abs(h.d2[i] - std::sqrt(h.d1[i] * (1.0 - h.d1[i]))) < 1e-8);
  }
  CHECK(reconstruction_defect(p, h) < 1e-8 * 6);

  // More +1's than -1's: the symmetry is negated first.
  const auto k = canonical_form(p, SymmetryVector({1, 1, 1, 1, -1, 1}));
  CHECK(k.m == 1);
  CHECK(k.l == 4);
  CHECK(k.signs.signs() == std::vector<int>{-1, -1, -1, -1, 1, -1});
  CHECK(reconstruction_defect(p, k) < 1e-8 * 6);

  CHECK_THROWS_AS(canonical_form(p, SymmetryVector(std::vector<int>(6, 1))), std::invalid_argument);
}

TEST_CASE("dual-path PSP norm and canonical identities on random projections") {
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 11;
    const std::size_t k = 1 + static_cast<std::size_t>(trial / 11) % n;
    const auto p = GramProjection::from_matrix(random_projection(n, k, rng));
    SymmetryVector s = random_symmetry(n, rng);
    const double direct = psp_norm(p, s);
    CHECK(std::abs(direct - psp_norm_via_spectra(p, s)) < 1e-8);
    CHECK(direct == psp_norm(p, s.negated()));
    if (s.plus_count() == 0 || s.plus_count() == n) continue;
    const auto f = canonical_form(p, s);
    CHECK(reconstruction_defect(p, f) <= 1e-8 * static_cast<double>(n));
    CHECK(std::abs(psp_norm_from_form(f) - direct) < 1e-8);
    for (std::size_t i = 0; i < f.m; ++i) {
      if (f.d2[i] == 0.0) continue;
      CHECK(std::abs(f.d1[i] + f.d3[i] - 1.0) < 1e-8);
      CHECK(std::abs(f.d2[i] * f.d2[i] - f.d1[i] * (1.0 - f.d1[i])) < 1e-8);
    }
    for (double v : f.d4) CHECK(std::min(std::abs(v), std::abs(v - 1.0)) < 1e-8);
  }
}

TEST_CASE("min_symmetry_norm") {
  double d[6] = {1, 0, 0, 0, 0, 0};
  const auto e0 = GramProjection::from_matrix(Matrix::diagonal(d));
  CHECK(std::abs(min_symmetry_norm(e0).min_norm - 1.0) < 1e-12);

  const auto p = conference6();
  const auto ex = min_symmetry_norm(p);
  CHECK(ex.scanned == 32);
  CHECK(ex.argmin[0] == 1);
  CHECK(std::abs(ex.min_norm - psp_norm_via_spectra(p, ex.argmin)) < 1e-8);
  // Oracle: all 64 sign vectors through the direct product.
  double oracle = HUGE_VAL;
  for (std::size_t mask = 0; mask < 64; ++mask) {
    std::vector<int> s(6);
    for (std::size_t i = 0; i < 6; ++i) s[i] = (mask >> i & 1) ? -1 : 1;
    oracle = std::min(oracle, psp_norm(p, SymmetryVector(s)));
  }
  CHECK(std::abs(ex.min_norm - oracle) < 1e-12);

  // All 32 canonical symmetries agree across the two formulas.
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    std::vector<int> s(6, 1);
    for (std::size_t i = 1; i < 6; ++i)
      if (mask >> (i - 1) & 1) s[i] = -1;
    const SymmetryVector sv(s);
    CHECK(std::abs(psp_norm(p, sv) - psp_norm_via_spectra(p, sv)) < 1e-8);
  }

  const auto a = min_symmetry_norm(p, {.strategy = SymmetryStrategy::kRandom, .seed = 5, .samples = 500, .threads = 1});
  const auto b = min_symmetry_norm(p, {.strategy = SymmetryStrategy::kRandom, .seed = 5, .samples = 500, .threads = 3});
  CHECK(a.argmin == b.argmin);
  CHECK(a.min_norm == b.min_norm);
  CHECK(a.min_norm >= ex.min_norm - 1e-12);
  CHECK(a.metadata.at("seed") == 5);

  const auto g = min_symmetry_norm(p, {.strategy = SymmetryStrategy::kGreedyFlip, .seed = 1, .restarts = 4});
  CHECK(g.min_norm >= ex.min_norm - 1e-12);
  CHECK(g.method == "greedy-flip");

  const auto big = conference_projection(paley_conference(29));
  CHECK_THROWS_WITH_AS(min_symmetry_norm(big), doctest::Contains("not supported"), std::invalid_argument);
  const auto mid = conference_projection(paley_conference(17));  // n = 18 fits the default
  CHECK(min_symmetry_norm(mid, {.max_exhaustive_n = 20}).scanned == (1u << 17));
}

TEST_CASE("interval symmetries") {
  const auto list = interval_symmetries(31);
  CHECK(list.size() == 62);
  CHECK(list[0].plus_count() == 16);
  CHECK(list[31].plus_count() == 15);
}

TEST_CASE("Singer (31,6) frame stays above 2k/n") {
  const auto ds = *find_difference_set(31, 6).set;
  const auto p = gram_projection(harmonic_frame(31, ds.elements));
  const double threshold = 12.0 / 31.0 + 1e-6;
  const auto rnd = min_symmetry_norm(p, {.strategy = SymmetryStrategy::kRandom, .seed = 7, .samples = 3000});
  CHECK(rnd.min_norm > threshold);
  const auto intervals = interval_symmetries(31);
  CHECK(min_over_symmetries(p, intervals).min_norm > threshold);
}

TEST_CASE("conjA certificates") {
  const auto big = conjA_certificate(276, 23);
  CHECK(int128_to_string(big.lhs) == "1675872");
  CHECK(int128_to_string(big.rhs) == "581900");
  CHECK(big.is_counterexample);

  const auto c31 = conjA_certificate(31, 6);
  CHECK(c31.lhs == 4805);
  CHECK(c31.rhs == 4320);
  CHECK(c31.is_counterexample);

  const auto c7 = conjA_certificate(7, 3);
  CHECK(c7.lhs == 98);
  CHECK(c7.rhs == 216);
  CHECK_FALSE(c7.is_counterexample);

  CHECK_THROWS_AS(conjA_certificate(6, 3), std::invalid_argument);
  CHECK(singer_parameters(5, 2) == std::pair<std::size_t, std::size_t>{31, 6});
  CHECK(singer_parameters(2, 2) == std::pair<std::size_t, std::size_t>{7, 3});
  CHECK(singer_parameters(7, 2) == std::pair<std::size_t, std::size_t>{57, 8});
  CHECK(conjA_to_json(c31).at("lhs") == 4805);
  CHECK(int128_to_string(-static_cast<__int128>(42)) == "-42");
}

TEST_CASE("conjB trace suite") {
  const std::size_t all[] = {0, 1, 2, 3};
  const auto basis = gram_projection(harmonic_frame(4, all));
  const std::size_t r01[] = {0, 1};
  CHECK(std::abs(conjB_trace_suite(basis, r01).trace_matrix) < 1e-15);

  const std::size_t d01[] = {0, 1};
  const auto h = conjB_trace_suite(gram_projection(harmonic_frame(4, d01)), r01);
  CHECK(std::abs(h.trace_matrix - 0.25) < 1e-14);
  CHECK(std::abs(h.trace_sum - 0.25) < 1e-14);

  const auto p = conference6();
  Matrix w(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) w(i, j) = i == j ? 0.0 : std::norm(p.gram()(i, j));
  const auto part = bhkw_partition(w, 2);
  const auto t = conjB_trace_suite(p, part.block(0), 0.5);
  CHECK(t.trace_matrix >= 0.375 - 1e-9);
  CHECK(t.discrepancy <= 1e-10);
  CHECK(std::abs(t.final_bound - 0.375) < 1e-15);
  CHECK(std::abs(*t.pa_bound - 3.0 * 0.5 * 1.5 / 4.0) < 1e-15);

  const std::size_t qr7[] = {1, 2, 4};
  const std::size_t r3[] = {0, 1, 2};
  const auto e = conjB_trace_suite(gram_projection(harmonic_frame(7, qr7)), r3);
  REQUIRE(e.equiangular_c.has_value());
  CHECK(std::abs(*e.equiangular_trace - 3.0 * 4.0 * 2.0 / 49.0) < 1e-12);
  CHECK(std::abs(e.trace_matrix - *e.equiangular_trace) < 1e-12);
  CHECK(*e.equiangular_trace <= *e.equiangular_cap + 1e-12);

  CHECK_THROWS_AS(conjB_trace_suite(p, std::span<const std::size_t>{}), std::invalid_argument);
  const std::size_t every[] = {0, 1, 2, 3, 4, 5};
  CHECK_THROWS_AS(conjB_trace_suite(p, every), std::invalid_argument);
}
