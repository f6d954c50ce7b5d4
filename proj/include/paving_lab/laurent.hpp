#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "paving_lab/matrix.hpp"

namespace paving_lab {

using Rational = boost::multiprecision::cpp_rational;

/// Half-open [a, b) with rational endpoints.
struct Interval {
  Rational a, b;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A finite union of half-open subintervals of [0, 1), stored sorted,
/// disjoint and with touching pieces merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  /// Rejects a >= b, endpoints outside [0, 1] and overlapping pieces.
  static IntervalSet from_intervals(std::vector<Interval> pieces);

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  const Rational& measure() const { return measure_; }

  /// [0, 1) minus this set.
  IntervalSet complement() const;
  /// Exact m(E ∩ [a, b)).
  Rational measure_within(const Rational& a, const Rational& b) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> intervals_;
  Rational measure_ = 0;
};

/// E_1 = [1/4, 3/4); each later stage moves the centered middle third of every
/// maximal piece of E and of its complement to the other side. The measure
/// stays exactly 1/2 and maximal pieces at stage s are at most 3^{1-s}/2 long.
IntervalSet fat_cantor_stage(std::size_t s);

/// c(-N..N) of the indicator of E: entry N + n holds the n-th coefficient.
std::vector<Complex> fourier_coefficients(const IntervalSet& e, std::size_t n_max);

enum class SymbolKind { kIndicator, kReflection };  // chi_E or 2 chi_E - 1

struct SymbolSpec {
  SymbolKind kind = SymbolKind::kReflection;
  IntervalSet e;
};

struct ToeplitzMatrix {
  std::size_t half_bandwidth = 0;   // N; the matrix is (2N+1) x (2N+1)
  std::vector<Complex> coefficients;  // a(-2N..2N), entry 2N + d holds a(d)
  Matrix matrix;                    // entry (j, k) = a(j - k)

  Complex coefficient(long d) const { return coefficients[static_cast<std::size_t>(d + 2 * static_cast<long>(half_bandwidth))]; }
};

ToeplitzMatrix truncated_laurent(const SymbolSpec& symbol, std::size_t n);

struct CellMeasure {
  Rational start;
  Rational inside;   // m(E ∩ cell)
  Rational outside;  // m(cell \ E)
};

struct BidensityReport {
  Rational h;
  std::vector<CellMeasure> cells;
  Rational min_inside;
  Rational min_outside;
  bool certified = false;  // both minima > 0
};

/// Requires 1/h to be a positive integer.
BidensityReport bidensity_report(const IntervalSet& e, const Rational& h);

nlohmann::json interval_set_to_json(const IntervalSet& e);
IntervalSet interval_set_from_json(const nlohmann::json& j);
nlohmann::json bidensity_to_json(const BidensityReport& r);
std::string to_string(const Rational& q);

}  // namespace paving_lab
