#include "paving_lab/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace paving_lab {

namespace {

using boost::multiprecision::cpp_int;

// e^{-2 pi i n x} with n x reduced into [-1/2, 1/2) in exact arithmetic.
Complex unit_phase(long n, const Rational& x) {
  const cpp_int p = boost::multiprecision::numerator(x);
  const cpp_int q = boost::multiprecision::denominator(x);
  cpp_int r = (cpp_int(n) * p) % q;
  if (r < 0) r += q;
  if (2 * r >= q) r -= q;  // symmetric range, so phases at -n and n are exact conjugates
  const double frac = static_cast<double>(Rational(r, q));
  const double angle = 2.0 * std::numbers::pi * frac;
  return {std::cos(angle), -std::sin(angle)};
}

nlohmann::json int_to_json(const cpp_int& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max()) {
    return static_cast<long long>(v);
  }
  return v.str();
}

cpp_int int_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return cpp_int(j.get<long long>());
  if (j.is_string()) return cpp_int(j.get<std::string>());
  throw std::invalid_argument("interval endpoint component must be an integer or a decimal string");
}

}  // namespace

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

IntervalSet IntervalSet::from_intervals(std::vector<Interval> pieces) {
  for (const auto& iv : pieces) {
    if (iv.a < 0 || iv.b > 1) {
      throw std::invalid_argument("interval [" + to_string(iv.a) + ", " + to_string(iv.b) + ") leaves [0, 1)");
    }
    if (iv.a >= iv.b) {
      throw std::invalid_argument("interval [" + to_string(iv.a) + ", " + to_string(iv.b) + ") is empty");
    }
  }
  std::sort(pieces.begin(), pieces.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  IntervalSet out;
  for (auto& iv : pieces) {
    if (!out.intervals_.empty()) {
      auto& last = out.intervals_.back();
      if (iv.a < last.b) {
        throw std::invalid_argument("intervals [" + to_string(last.a) + ", " + to_string(last.b) + ") and [" +
                                    to_string(iv.a) + ", " + to_string(iv.b) + ") overlap");
      }
      if (iv.a == last.b) {
        last.b = iv.b;
        continue;
      }
    }
    out.intervals_.push_back(std::move(iv));
  }
  for (const auto& iv : out.intervals_) out.measure_ += iv.b - iv.a;
  return out;
}

IntervalSet IntervalSet::complement() const {
  std::vector<Interval> gaps;
  Rational cursor = 0;
  for (const auto& iv : intervals_) {
    if (cursor < iv.a) gaps.push_back({cursor, iv.a});
    cursor = iv.b;
  }
  if (cursor < 1) gaps.push_back({cursor, Rational(1)});
  return from_intervals(std::move(gaps));
}

Rational IntervalSet::measure_within(const Rational& a, const Rational& b) const {
  Rational total = 0;
  for (const auto& iv : intervals_) {
    if (iv.a >= b) break;
    const Rational lo = std::max(iv.a, a);
    const Rational hi = std::min(iv.b, b);
    if (lo < hi) total += hi - lo;
  }
  return total;
}

IntervalSet fat_cantor_stage(std::size_t s) {
  if (s == 0) throw std::invalid_argument("fat_cantor_stage: stage must be >= 1");
  auto e = IntervalSet::from_intervals({{Rational(1, 4), Rational(3, 4)}});
  for (std::size_t t = 1; t < s; ++t) {
    std::vector<Interval> next;
    for (const auto& iv : e.intervals()) {
      const Rational third = (iv.b - iv.a) / 3;
      next.push_back({iv.a, iv.a + third});
      next.push_back({iv.b - third, iv.b});
    }
    const IntervalSet gaps = e.complement();
    for (const auto& gap : gaps.intervals()) {
      const Rational third = (gap.b - gap.a) / 3;
      next.push_back({gap.a + third, gap.b - third});
    }
    e = IntervalSet::from_intervals(std::move(next));
  }
  return e;
}

std::vector<Complex> fourier_coefficients(const IntervalSet& e, std::size_t n_max) {
  const long big_n = static_cast<long>(n_max);
  std::vector<Complex> c(2 * n_max + 1);
  c[n_max] = static_cast<double>(e.measure());
  for (long n = -big_n; n <= big_n; ++n) {
    if (n == 0) continue;
    Complex sum = 0.0;
    for (const auto& iv : e.intervals()) sum += unit_phase(n, iv.a) - unit_phase(n, iv.b);
    c[static_cast<std::size_t>(n + big_n)] = sum / Complex(0.0, 2.0 * std::numbers::pi * static_cast<double>(n));
  }
  return c;
}

ToeplitzMatrix truncated_laurent(const SymbolSpec& symbol, std::size_t n) {
  const std::size_t dim = 2 * n + 1;
  ToeplitzMatrix t{.half_bandwidth = n, .coefficients = fourier_coefficients(symbol.e, 2 * n), .matrix = Matrix(dim, dim)};
  if (symbol.kind == SymbolKind::kReflection) {
    for (auto& c : t.coefficients) c *= 2.0;
    t.coefficients[2 * n] = static_cast<double>(2 * symbol.e.measure() - 1);
  }
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < dim; ++k) {
      t.matrix(j, k) = t.coefficient(static_cast<long>(j) - static_cast<long>(k));
    }
  }
  return t;
}

BidensityReport bidensity_report(const IntervalSet& e, const Rational& h) {
  if (h <= 0 || h > 1 || boost::multiprecision::numerator(h) != 1) {
    throw std::invalid_argument("bidensity_report: h = " + to_string(h) + " is not 1/m for a positive integer m");
  }
  const cpp_int cells = boost::multiprecision::denominator(h);
  BidensityReport r{.h = h, .cells = {}, .min_inside = h, .min_outside = h, .certified = false};
  for (cpp_int i = 0; i < cells; ++i) {
    const Rational start = Rational(i) * h;
    const Rational inside = e.measure_within(start, start + h);
    r.min_inside = std::min(r.min_inside, inside);
    const Rational outside = h - inside;
    r.min_outside = std::min(r.min_outside, outside);
    r.cells.push_back({start, inside, outside});
  }
  r.certified = r.min_inside > 0 && r.min_outside > 0;
  return r;
}

nlohmann::json interval_set_to_json(const IntervalSet& e) {
  auto pieces = nlohmann::json::array();
  for (const auto& iv : e.intervals()) {
    pieces.push_back({int_to_json(boost::multiprecision::numerator(iv.a)),
                      int_to_json(boost::multiprecision::denominator(iv.a)),
                      int_to_json(boost::multiprecision::numerator(iv.b)),
                      int_to_json(boost::multiprecision::denominator(iv.b))});
  }
  return {{"intervals", pieces}, {"measure", to_string(e.measure())}};
}

IntervalSet interval_set_from_json(const nlohmann::json& j) {
  if (!j.contains("intervals") || !j.at("intervals").is_array()) {
    throw std::invalid_argument("interval set JSON needs an \"intervals\" array");
  }
  std::vector<Interval> pieces;
  for (const auto& row : j.at("intervals")) {
    if (!row.is_array() || row.size() != 4) {
      throw std::invalid_argument("each interval must be [num_a, den_a, num_b, den_b]");
    }
    const cpp_int da = int_from_json(row[1]), db = int_from_json(row[3]);
    if (da <= 0 || db <= 0) throw std::invalid_argument("interval denominators must be positive");
    pieces.push_back({Rational(int_from_json(row[0]), da), Rational(int_from_json(row[2]), db)});
  }
  return IntervalSet::from_intervals(std::move(pieces));
}

nlohmann::json bidensity_to_json(const BidensityReport& r) {
  auto cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"start", to_string(c.start)}, {"inside", to_string(c.inside)}, {"outside", to_string(c.outside)}});
  }
  return {{"h", to_string(r.h)},
          {"min_inside", to_string(r.min_inside)},
          {"min_outside", to_string(r.min_outside)},
          {"certified", r.certified},
          {"cells", cells}};
}

}  // namespace paving_lab
