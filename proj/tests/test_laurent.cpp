#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "paving_lab/laurent.hpp"

using namespace paving_lab;

namespace {

Rational q(long a, long b) { return Rational(a, b); }

// Composite Simpson on each piece of E for the integral of e^{-2 pi i n t}.
Complex simpson_coefficient(const IntervalSet& e, long n, int panels = 4000) {
  Complex total = 0.0;
  for (const auto& iv : e.intervals()) {
    const double a = static_cast<double>(iv.a), b = static_cast<double>(iv.b);
    const double h = (b - a) / panels;
    auto f = [n](double t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(n) * t;
      return Complex(std::cos(ang), std::sin(ang));
    };
    Complex s = f(a) + f(b);
    for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    total += s * (h / 3.0);
  }
  return total;
}

std::size_t longest_piece_bound_holds(const IntervalSet& e, const Rational& bound) {
  std::size_t bad = 0;
  for (const auto& iv : e.intervals()) bad += (iv.b - iv.a > bound);
  const auto gaps = e.complement();
  for (const auto& iv : gaps.intervals()) bad += (iv.b - iv.a > bound);
  return bad;
}

}  // namespace

TEST_CASE("interval sets merge, validate and complement") {
  const auto e = IntervalSet::from_intervals({{q(1, 2), q(3, 4)}, {q(0, 1), q(1, 4)}, {q(1, 4), q(1, 3)}});
  REQUIRE(e.size() == 2);
  CHECK(e.intervals()[0] == Interval{q(0, 1), q(1, 3)});
  CHECK(e.measure() == q(7, 12));
  const auto c = e.complement();
  CHECK(c.size() == 2);
  CHECK(c.measure() == q(5, 12));
  CHECK(c.complement() == e);
  CHECK(e.measure_within(q(1, 4), q(5, 8)) == q(1, 12) + q(1, 8));

  CHECK_THROWS_WITH_AS(IntervalSet::from_intervals({{q(0, 1), q(1, 2)}, {q(1, 3), q(2, 3)}}),
                       doctest::Contains("overlap"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(IntervalSet::from_intervals({{q(1, 2), q(1, 2)}}), doctest::Contains("empty"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(IntervalSet::from_intervals({{q(1, 2), q(3, 2)}}), doctest::Contains("leaves"),
                       std::invalid_argument);
  CHECK(IntervalSet().complement().measure() == 1);
}

TEST_CASE("fat Cantor stages") {
  CHECK(fat_cantor_stage(1) == IntervalSet::from_intervals({{q(1, 4), q(3, 4)}}));
  CHECK_THROWS_AS(fat_cantor_stage(0), std::invalid_argument);
  Rational bound = q(1, 2);
  for (std::size_t s = 1; s <= 7; ++s) {
    const auto e = fat_cantor_stage(s);
    CAPTURE(s);
    CHECK(e.measure() == q(1, 2));
    CHECK(longest_piece_bound_holds(e, bound) == 0);
    bound /= 3;
  }
  // Stage 2 by hand: [1/4,3/4) keeps its outer thirds, the outer gaps gain their middle thirds.
  CHECK(fat_cantor_stage(2) == IntervalSet::from_intervals({{q(1, 12), q(1, 6)},
                                                            {q(1, 4), q(5, 12)},
                                                            {q(7, 12), q(3, 4)},
                                                            {q(5, 6), q(11, 12)}}));
}

TEST_CASE("bidensity of the stages at dyadic scale 2^{1-s}") {
  for (std::size_t s = 1; s <= 6; ++s) {
    const auto e = fat_cantor_stage(s);
    const auto r = bidensity_report(e, Rational(1, 1L << (s - 1)));
    CAPTURE(s);
    CHECK(r.certified);
    CHECK(r.cells.size() == (1UL << (s - 1)));
    Rational total = 0;
    for (const auto& c : r.cells) {
      CHECK(c.inside + c.outside == r.h);
      total += c.inside;
    }
    CHECK(total == e.measure());
  }
  // Cells of width 1/4 sit inside [1/4, 3/4) at stage 1.
  const auto coarse = bidensity_report(fat_cantor_stage(1), q(1, 4));
  CHECK_FALSE(coarse.certified);
  CHECK(coarse.min_outside == 0);
  CHECK_THROWS_AS(bidensity_report(fat_cantor_stage(1), q(2, 5)), std::invalid_argument);
  CHECK_THROWS_AS(bidensity_report(fat_cantor_stage(1), q(0, 1)), std::invalid_argument);
}

TEST_CASE("closed-form coefficients against quadrature") {
  const IntervalSet sets[] = {fat_cantor_stage(2), fat_cantor_stage(3),
                              IntervalSet::from_intervals({{q(1, 7), q(2, 5)}, {q(5, 9), q(13, 14)}})};
  for (const auto& e : sets) {
    const auto c = fourier_coefficients(e, 12);
    for (long n = -12; n <= 12; ++n) {
      CAPTURE(n);
      CHECK(std::abs(c[static_cast<std::size_t>(n + 12)] - simpson_coefficient(e, n)) < 1e-9);
    }
  }
}

TEST_CASE("coefficient identities") {
  // chi_[1/4,3/4): c(1) = -1/pi, c(2) = 0.
  const auto c1 = fourier_coefficients(fat_cantor_stage(1), 4);
  CHECK(std::abs(c1[5] - Complex(-1.0 / std::numbers::pi, 0.0)) < 1e-15);
  CHECK(std::abs(c1[6]) < 1e-16);
  CHECK(c1[4].real() == 0.5);

  for (std::size_t s = 1; s <= 5; ++s) {
    const auto e = fat_cantor_stage(s);
    const std::size_t big_n = 40;
    const auto c = fourier_coefficients(e, big_n);
    for (std::size_t n = 1; n <= big_n; ++n) {
      CHECK(std::abs(c[big_n + n] - std::conj(c[big_n - n])) < 1e-15);
      CHECK(std::abs(c[big_n + n]) <= static_cast<double>(e.size()) / (std::numbers::pi * n) + 1e-15);
    }
  }
}

TEST_CASE("truncated Laurent operators") {
  for (std::size_t s = 1; s <= 4; ++s) {
    for (std::size_t n : {1UL, 4UL, 10UL}) {
      const auto t = truncated_laurent({.kind = SymbolKind::kReflection, .e = fat_cantor_stage(s)}, n);
      CAPTURE(s);
      CAPTURE(n);
      REQUIRE(t.matrix.rows() == 2 * n + 1);
      CHECK(t.coefficients.size() == 4 * n + 1);
      CHECK(is_hermitian(t.matrix));
      for (std::size_t i = 0; i < t.matrix.rows(); ++i) CHECK(t.matrix(i, i) == Complex(0.0, 0.0));
      CHECK(operator_norm(t.matrix) <= 1.0 + 1e-12);
      CHECK(t.matrix(2 * n, 0) == t.coefficient(static_cast<long>(2 * n)));
    }
  }
  const auto ind = truncated_laurent({.kind = SymbolKind::kIndicator, .e = fat_cantor_stage(1)}, 2);
  CHECK(ind.matrix(0, 0).real() == 0.5);
  const auto refl = truncated_laurent({.kind = SymbolKind::kReflection, .e = fat_cantor_stage(1)}, 2);
  CHECK(std::abs(refl.coefficient(1) - 2.0 * ind.coefficient(1)) < 1e-16);
  CHECK(std::abs(refl.coefficient(1) + 2.0 / std::numbers::pi) < 1e-15);
  // Indicator symbol: a positive contraction.
  const auto ev = hermitian_eigenvalues(truncated_laurent({.kind = SymbolKind::kIndicator, .e = fat_cantor_stage(3)}, 6).matrix);
  CHECK(ev.front() >= -1e-12);
  CHECK(ev.back() <= 1.0 + 1e-12);
}

TEST_CASE("interval set JSON round trip") {
  for (std::size_t s = 1; s <= 5; ++s) {
    const auto e = fat_cantor_stage(s);
    CHECK(interval_set_from_json(interval_set_to_json(e)) == e);
  }
  const Rational huge(boost::multiprecision::cpp_int("1"), boost::multiprecision::cpp_int("100000000000000000000000"));
  const auto tiny = IntervalSet::from_intervals({{Rational(0), huge}});
  const auto j = interval_set_to_json(tiny);
  CHECK(j["intervals"][0][3].is_string());
  CHECK(interval_set_from_json(j) == tiny);
  CHECK_THROWS_AS(interval_set_from_json(nlohmann::json::parse(R"({"intervals":[[1,2,3]]})")), std::invalid_argument);
  CHECK_THROWS_AS(interval_set_from_json(nlohmann::json::parse(R"({"intervals":[[1,0,1,2]]})")), std::invalid_argument);
  CHECK(bidensity_to_json(bidensity_report(fat_cantor_stage(2), q(1, 2)))["certified"] == true);
}
