#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "paving_lab/frames.hpp"
#include "paving_lab/paving.hpp"
#include "paving_lab/random.hpp"

using namespace paving_lab;

namespace {

Matrix conference_reflection(std::size_t q) {
  return (1.0 / std::sqrt(static_cast<double>(q))) * paley_conference(q).to_matrix();
}

Matrix zero_diagonal_contraction(std::size_t n, Rng& rng) {
  Matrix h = random_hermitian(n, rng);
  for (std::size_t i = 0; i < n; ++i) h(i, i) = 0.0;
  const double norm = operator_norm(h);
  return norm > 0 ? (1.0 / norm) * h : h;
}

Matrix squared_moduli(const Matrix& g) {
  Matrix w(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) w(i, j) = i == j ? 0.0 : std::norm(g(i, j));
  return w;
}

Partition random_partition(std::size_t n, std::size_t r, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, r - 1);
  std::vector<std::size_t> labels(n);
  for (auto& l : labels) l = pick(rng);
  return Partition::from_labels(labels);
}

// Every 2-partition of {0..n-1} as a bitmask loop, independent of the RGS code.
template <class Fn>
void for_each_two_partition(std::size_t n, Fn&& fn) {
  for (std::size_t mask = 0; mask < (std::size_t{1} << (n - 1)); ++mask) {
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i & 1) ? b : a).push_back(i);
    fn(a, b);
  }
}

}  // namespace

TEST_CASE("partition construction and canonical order") {
  const auto p = Partition::from_blocks(5, {{4, 2}, {1}, {3, 0}});
  CHECK(p.blocks() == std::vector<std::vector<std::size_t>>{{0, 3}, {1}, {2, 4}});
  CHECK(p.labels() == std::vector<std::size_t>{0, 1, 2, 0, 2});
  CHECK(Partition::from_labels(p.labels()) == p);
  const std::size_t odd_labels[] = {7, 7, 3, 9, 3};
  CHECK(Partition::from_labels(odd_labels).blocks() == std::vector<std::vector<std::size_t>>{{0, 1}, {2, 4}, {3}});

  CHECK_THROWS_WITH_AS(Partition::from_blocks(3, {{0, 1}}), doctest::Contains("not covered"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(Partition::from_blocks(3, {{0, 1}, {1, 2}}), doctest::Contains("twice"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(Partition::from_blocks(3, {{0, 1, 2}, {}}), doctest::Contains("empty"), std::invalid_argument);
  CHECK_THROWS_AS(Partition::from_blocks(2, {{0, 2}}), std::invalid_argument);

  const auto q = Partition::from_blocks(6, {{0, 1, 2}, {3, 4, 5}});
  const auto s = Partition::from_blocks(6, {{0, 3}, {1, 2, 4, 5}});
  const auto both = q.refine(s);
  CHECK(both.size() == 4);
  CHECK(both.blocks() == std::vector<std::vector<std::size_t>>{{0}, {1, 2}, {3}, {4, 5}});
  CHECK(q.refine(q) == q);
  CHECK(q.restrict_to_prefix(4).blocks() == std::vector<std::vector<std::size_t>>{{0, 1, 2}, {3}});
}

TEST_CASE("restricted growth strings enumerate each set partition once") {
  // Bell numbers and S(n,1)+S(n,2) = 2^(n-1).
  const std::uint64_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
  for (std::size_t n = 1; n <= 10; ++n) {
    CHECK(count_partitions(n, n) == bell[n]);
    CHECK(count_partitions(n, 2) == (std::uint64_t{1} << (n - 1)));
  }
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t r = 1; r <= 4; ++r) {
      const auto strings = restricted_growth_strings(n, r);
      CHECK(strings.size() == count_partitions(n, r));
      CHECK(std::is_sorted(strings.begin(), strings.end()));
      std::set<std::vector<std::vector<std::size_t>>> distinct;
      for (const auto& s : strings) {
        std::vector<std::size_t> wide(s.begin(), s.end());
        const auto p = Partition::from_labels(wide);
        CHECK(p.size() <= r);
        distinct.insert(p.blocks());
      }
      CHECK(distinct.size() == strings.size());
    }
  CHECK(count_partitions(40, 3) > 1e18);
}

TEST_CASE("paving_norm examples") {
  Rng rng(1);
  const Matrix t = zero_diagonal_contraction(7, rng);
  CHECK(paving_norm(t, Partition::singletons(7)).epsilon == 0.0);
  CHECK(std::abs(paving_norm(t, Partition::whole(7)).epsilon - operator_norm(t)) < 1e-14);

  const Matrix a = conference_reflection(5);
  const auto p = Partition::from_blocks(6, {{0, 2, 4}, {1, 3, 5}});
  const auto paved = paving_norm(a, p);
  REQUIRE(paved.per_block_norms.size() == 2);
  for (std::size_t b = 0; b < 2; ++b)
    CHECK(std::abs(paved.per_block_norms[b] - operator_norm(compress_in_place(a, p.block(b)))) < 1e-12);
  CHECK(paved.epsilon == std::max(paved.per_block_norms[0], paved.per_block_norms[1]));

  CHECK_THROWS_AS(paving_norm(a, Partition::whole(5)), std::invalid_argument);

  const auto back = paved_from_json(paved_to_json(paved), a);
  CHECK(back.partition == p);
  auto tampered = paved_to_json(paved);
  tampered["epsilon"] = paved.epsilon + 1e-6;
  CHECK_THROWS_AS(paved_from_json(tampered, a), std::invalid_argument);
}

TEST_CASE("exhaustive_pave examples") {
  Matrix swap(2, 2);
  swap(0, 1) = swap(1, 0) = 0.3;
  const auto two = exhaustive_pave(swap, 2);
  CHECK(two.epsilon == 0.0);
  CHECK(two.partition == Partition::singletons(2));

  const Matrix a = conference_reflection(5);
  const auto pa = exhaustive_pave(a, 2);
  CHECK(pa.epsilon >= std::sqrt(2.0 / 5.0) - 1e-9);
  CHECK(pa.strategy == "exhaustive");

  const Matrix p = 0.5 * (Matrix::identity(6) + a);
  const auto pp = exhaustive_pave(p, 2);
  CHECK(pp.epsilon >= (1.0 + std::sqrt(2.0 / 5.0)) / 2.0 - 1e-9);
  // Q_A P Q_A = (Q_A + Q_A R Q_A)/2, so the projection level is (1 + eps_R)/2 here.
  CHECK(std::abs(pp.epsilon - (1.0 + pa.epsilon) / 2.0) < 1e-9);

  // Bitmask oracle over all 32 two-partitions.
  double oracle = HUGE_VAL;
  for_each_two_partition(6, [&](const auto& x, const auto& y) {
    double e = operator_norm(principal_compression(a, x));
    if (!y.empty()) e = std::max(e, operator_norm(principal_compression(a, y)));
    oracle = std::min(oracle, e);
  });
  CHECK(std::abs(pa.epsilon - oracle) < 1e-12);
}

TEST_CASE("exhaustive_pave budget and thread independence") {
  Rng rng(2);
  const Matrix t = zero_diagonal_contraction(16, rng);
  CHECK_THROWS_WITH_AS(exhaustive_pave(t, 2), doctest::Contains("local_search_pave"), BudgetExceeded);

  const Matrix s = zero_diagonal_contraction(9, rng);
  const auto one = exhaustive_pave(s, 3, {.max_partitions = 30000, .threads = 1});
  const auto many = exhaustive_pave(s, 3, {.max_partitions = 30000, .threads = 3});
  CHECK(one.partition == many.partition);
  CHECK(one.epsilon == many.epsilon);
}

TEST_CASE("local_search_pave examples") {
  const Matrix zero(5, 5);
  const auto z = local_search_pave(zero, 2, {.seed = 3});
  CHECK(z.epsilon == 0.0);

  Rng rng(4);
  const Matrix t = zero_diagonal_contraction(6, rng);
  CHECK(local_search_pave(t, 6, {.seed = 5}).epsilon == 0.0);

  const auto a = local_search_pave(t, 2, {.seed = 9, .restarts = 4, .threads = 1});
  const auto b = local_search_pave(t, 2, {.seed = 9, .restarts = 4, .threads = 2});
  CHECK(a.partition == b.partition);
  CHECK(a.seed == std::optional<std::uint64_t>(9));
}

TEST_CASE("local search agrees with the exhaustive oracle") {
  Rng rng(20240601);
  int equal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial) % 8;
    const Matrix t = zero_diagonal_contraction(n, rng);
    const double exact = exhaustive_pave(t, 2).epsilon;
    const double found = local_search_pave(t, 2, {.seed = static_cast<std::uint64_t>(trial), .restarts = 8}).epsilon;
    CHECK(found >= exact - 1e-12);
    if (found <= exact + 1e-9) ++equal;
  }
  MESSAGE("local search matched the optimum in " << equal << "/100 trials");
  CHECK(equal >= 90);
}

TEST_CASE("conference certificate soundness") {
  for (std::size_t q : {5, 13, 17}) {
    const std::size_t n = q + 1;
    const auto paved = exhaustive_pave(conference_reflection(q), 2, {.max_partitions = 200000});
    const double bound = evaluate_bound(BoundKind::kConference, n, n / 2, 2);
    CHECK(std::abs(bound - std::sqrt((n / 2.0 - 1.0) / (n - 1.0))) < 1e-15);
    CHECK(paved.epsilon >= bound - 1e-9);
  }
}

TEST_CASE("big-block soundness on the (6,3) conference projection") {
  const Matrix p = conference_projection(paley_conference(5)).gram();
  int partitions = 0;
  for_each_two_partition(6, [&](const auto& a, const auto& b) {
    CHECK(std::max(a.size(), b.size()) >= 3);
    ++partitions;
  });
  CHECK(partitions == 32);
  for (std::size_t mask = 0; mask < 64; ++mask) {
    if (__builtin_popcountll(mask) < 4) continue;
    std::vector<std::size_t> block;
    for (std::size_t i = 0; i < 6; ++i)
      if (mask >> i & 1) block.push_back(i);
    CHECK(std::abs(operator_norm(principal_compression(p, block)) - 1.0) < 1e-9);
  }
}

TEST_CASE("bhkw_partition examples") {
  Matrix ones(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) ones(i, j) = i == j ? 0.0 : 1.0;
  const auto p = bhkw_partition(ones, 2);
  CHECK(bhkw_violation(ones, p) <= 1e-12);
  // Brute force: the inequality set holds exactly for the balanced splits.
  for_each_two_partition(4, [&](const auto& a, const auto& b) {
    if (b.empty()) return;
    const auto q = Partition::from_blocks(4, {a, b});
    CHECK((bhkw_violation(ones, q) <= 1e-12) == (a.size() == 2));
  });
  CHECK(p.size() == 2);
  CHECK(p.largest_block() == 2);

  const Matrix zero(5, 5);
  CHECK(bhkw_partition(zero, 2).blocks() == std::vector<std::vector<std::size_t>>{{0, 2, 4}, {1, 3}});

  const auto g = conference_projection(paley_conference(5));
  const Matrix w = squared_moduli(g.gram());
  CHECK(bhkw_violation(w, bhkw_partition(w, 2)) <= 1e-12);

  Matrix neg = ones;
  neg(0, 1) = neg(1, 0) = -1.0;
  CHECK_THROWS_AS(bhkw_partition(neg, 2), std::invalid_argument);
  Matrix asym = ones;
  asym(0, 1) = 2.0;
  CHECK_THROWS_AS(bhkw_partition(asym, 2), std::invalid_argument);
}

TEST_CASE("bhkw postcondition on random weights") {
  Rng rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 23;
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng);
    for (std::size_t r : {2, 3}) CHECK(bhkw_violation(w, bhkw_partition(w, r)) <= 1e-12);
  }
}

TEST_CASE("rado_horn_partition") {
  const std::size_t all[] = {0, 1, 2, 3};
  const auto id = gram_projection(harmonic_frame(4, all));
  const auto one = rado_horn_partition(id, 1);
  REQUIRE(one.has_value());
  CHECK(one->size() == 1);

  const auto conf = conference_projection(paley_conference(5));
  const auto two = rado_horn_partition(conf, 2);
  REQUIRE(two.has_value());
  CHECK(two->size() == 2);
  const Matrix v = spectral_factor(conf);
  for (const auto& b : two->blocks()) {
    CHECK(b.size() == 3);
    CHECK(singular_values(select_columns(v, b)).back() > 1e-8);
  }

  const std::size_t d3[] = {0, 1, 2};
  CHECK_THROWS_AS(rado_horn_partition(gram_projection(harmonic_frame(9, d3)), 2), std::invalid_argument);

  // Random frames with norms >= 1/r split into r independent sets.
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t r = 2 + static_cast<std::size_t>(trial) % 2;
    const std::size_t k = 2 + static_cast<std::size_t>(trial) % 3;
    const std::size_t n = r * k;
    std::vector<std::size_t> d(k);
    for (std::size_t i = 0; i < k; ++i) d[i] = i;
    const auto g = gram_projection(harmonic_frame(n, d));
    const auto part = rado_horn_partition(g, r);
    REQUIRE(part.has_value());
    const Matrix syn = spectral_factor(g);
    for (const auto& b : part->blocks()) CHECK(columns_independent(syn, b));
  }
}

TEST_CASE("riesz_paving_bound") {
  const std::size_t all[] = {0, 1, 2};
  const auto id = gram_projection(harmonic_frame(3, all));
  const auto r0 = riesz_paving_bound(id, Partition::singletons(3));
  for (double c : r0.lower_bounds) CHECK(std::abs(c - 1.0) < 1e-14);
  CHECK(r0.epsilon < 1e-14);

  const std::size_t d0[] = {0};
  const auto rank1 = gram_projection(harmonic_frame(3, d0));
  CHECK(std::abs(riesz_paving_bound(rank1, Partition::whole(3)).epsilon - 1.0) < 1e-12);

  const auto conf = conference_projection(paley_conference(5));
  const auto blocks = *rado_horn_partition(conf, 2);
  const auto rb = riesz_paving_bound(conf, blocks);
  const Matrix complement = Matrix::identity(6) - conf.gram();
  CHECK(rb.epsilon < 1.0);
  CHECK(std::abs(rb.epsilon - paving_norm(complement, blocks).epsilon) < 1e-9);

  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 11;
    const std::size_t k = 1 + static_cast<std::size_t>(trial) % n;
    const auto g = GramProjection::from_matrix(random_projection(n, k, rng));
    const auto p = random_partition(n, 1 + static_cast<std::size_t>(trial) % 4, rng);
    const Matrix ig = Matrix::identity(n) - g.gram();
    CHECK(std::abs(riesz_paving_bound(g, p).epsilon - paving_norm(ig, p).epsilon) < 1e-9);
  }
}

TEST_CASE("bound certificates") {
  const auto certs = bound_certificates(6, 3, 2);
  REQUIRE(certs.size() == 3);
  CHECK(certs[0].kind == BoundKind::kConference);
  CHECK(std::abs(certs[0].bound - std::sqrt(2.0 / 5.0)) < 1e-15);
  CHECK(certs[1].bound == 1.0);
  CHECK(certs[2].bound == 0.0);  // ceil(6/2) = 3 < 4
  CHECK(evaluate_bound(BoundKind::kHalfProjection, 9, 7, 3) == 0.75);
  CHECK(evaluate_bound(BoundKind::kBigBlock, 9, 7, 3) == 1.0);  // 3 >= 9 - 7 + 1
  for (const auto& c : bound_certificates(14, 7, 3)) {
    const auto back = certificate_from_json(certificate_to_json(c));
    CHECK(back.bound == c.bound);
    CHECK(back.kind == c.kind);
  }
  auto j = certificate_to_json(certs[0]);
  j["bound"] = 0.7;
  CHECK_THROWS_AS(certificate_from_json(j), std::invalid_argument);
  CHECK_THROWS_AS(bound_certificates(6, 3, 1), std::invalid_argument);
}
