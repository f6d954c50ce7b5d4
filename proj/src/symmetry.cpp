#include "paving_lab/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "paving_lab/parallel.hpp"

namespace paving_lab {

namespace {

// mu^2 = c(1-c) above this marks a genuinely paired direction; below it the
// direction is structurally unpaired (rounding leaves mu^2 near 1e-16).
constexpr double kPairedMuSq = 1e-10;

Matrix scaled_columns(const Matrix& m, const SymmetryVector& s) {
  Matrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      if (s[j] < 0) out(i, j) = -out(i, j);
  return out;
}

void require_size(std::size_t n, const SymmetryVector& s, const char* what) {
  if (s.n() != n)
    throw std::invalid_argument(std::string(what) + ": symmetry of length " + std::to_string(s.n()) +
                                " for dimension " + std::to_string(n));
}

double spectral_max(const Matrix& block) {
  double best = 0.0;
  for (double lambda : hermitian_eigenvalues(block))
    if (std::abs(lambda) > tol::kNonzeroSpectrum) best = std::max(best, std::abs(1.0 - 2.0 * lambda));
  return best;
}

}  // namespace

SymmetryVector::SymmetryVector(std::vector<int> signs) : signs_(std::move(signs)) {
  if (signs_.empty()) throw std::invalid_argument("symmetry: empty sign vector");
  for (std::size_t i = 0; i < signs_.size(); ++i)
    if (signs_[i] != 1 && signs_[i] != -1)
      throw std::invalid_argument("symmetry: entry " + std::to_string(i) + " is not +-1");
}

SymmetryVector SymmetryVector::split(std::size_t n, std::span<const std::size_t> minus) {
  std::vector<int> s(n, 1);
  for (auto i : minus) {
    if (i >= n) throw std::invalid_argument("symmetry: index out of range");
    s[i] = -1;
  }
  return SymmetryVector(std::move(s));
}

std::size_t SymmetryVector::plus_count() const {
  return static_cast<std::size_t>(std::count(signs_.begin(), signs_.end(), 1));
}

SymmetryVector SymmetryVector::negated() const {
  auto s = signs_;
  for (auto& x : s) x = -x;
  return SymmetryVector(std::move(s));
}

SymmetryVector SymmetryVector::canonical() const { return signs_[0] == 1 ? *this : negated(); }

double psp_norm(const GramProjection& p, const SymmetryVector& s) {
  require_size(p.n(), s, "psp_norm");
  // S and -S give the same product up to sign; evaluate the canonical one so
  // the two agree bit for bit.
  const SymmetryVector c = s.canonical();
  const Matrix& g = p.gram();
  return operator_norm(scaled_columns(g, c) * g);
}

double psp_norm_factored(const Matrix& v, const SymmetryVector& s) {
  require_size(v.cols(), s, "psp_norm_factored");
  const SymmetryVector c = s.canonical();
  const std::size_t k = v.rows(), n = v.cols();
  Matrix m(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      Complex acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const Complex t = v(a, j) * std::conj(v(b, j));
        acc += c[j] > 0 ? t : -t;
      }
      m(a, b) = acc;
      m(b, a) = std::conj(acc);
    }
  for (std::size_t a = 0; a < k; ++a) m(a, a) = m(a, a).real();
  return operator_norm(m);
}

CanonicalForm canonical_form(const GramProjection& p, const SymmetryVector& s_in) {
  const std::size_t n = p.n();
  require_size(n, s_in, "canonical_form");
  SymmetryVector s = s_in.plus_count() * 2 > n ? s_in.negated() : s_in;
  const std::size_t m = s.plus_count();
  if (m == 0) throw std::invalid_argument("canonical_form: symmetry has a single sign");
  if (max_abs_diff(p.gram() * p.gram(), p.gram()) > 1e-9 * static_cast<double>(n))
    throw std::invalid_argument("canonical_form: input is not a projection");
  const std::size_t l = n - 2 * m;

  std::vector<std::size_t> plus, minus;
  for (std::size_t i = 0; i < n; ++i) (s[i] > 0 ? plus : minus).push_back(i);
  const Matrix a = principal_compression(p.gram(), plus);
  const Matrix c = principal_compression(p.gram(), minus);
  Matrix b(m, m + l);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m + l; ++j) b(i, j) = p.gram()(plus[i], minus[j]);

  // Diagonalize C; B^H B = C - C^2 is then diagonal with entries c(1-c).
  const auto sc = hermitian_eig(c);
  std::vector<std::size_t> order(m + l);
  for (std::size_t i = 0; i < m + l; ++i) order[i] = i;
  auto musq = [&](std::size_t i) { return std::max(0.0, sc.eigenvalues[i] * (1.0 - sc.eigenvalues[i])); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const bool px = musq(x) > kPairedMuSq, py = musq(y) > kPairedMuSq;
    if (px != py) return px;
    return sc.eigenvalues[x] < sc.eigenvalues[y];
  });
  std::size_t paired = 0;
  while (paired < m + l && musq(order[paired]) > kPairedMuSq) ++paired;
  if (paired > m) throw std::invalid_argument("canonical_form: rank of the off-diagonal block exceeds m; not a projection");

  Matrix u2(m + l, m + l);
  for (std::size_t col = 0; col < m + l; ++col)
    for (std::size_t row = 0; row < m + l; ++row) u2(row, col) = sc.basis(row, order[col]);

  CanonicalForm form{m, l, s, plus, minus, std::vector<double>(m, 0.0), std::vector<double>(m, 0.0),
                     std::vector<double>(m, 0.0), std::vector<double>(l, 0.0), Matrix(m, m), u2};
  for (std::size_t i = 0; i < m; ++i) form.d3[i] = sc.eigenvalues[order[i]];
  for (std::size_t i = 0; i < l; ++i) form.d4[i] = sc.eigenvalues[order[m + i]];

  // Polar factor of the paired columns of B U2, completed to a unitary.
  const Matrix bu2 = b * u2;
  Matrix seed(m, m);
  for (std::size_t i = 0; i < paired; ++i) {
    const double mu = std::sqrt(musq(order[i]));
    form.d2[i] = mu;
    for (std::size_t row = 0; row < m; ++row) seed(row, i) = bu2(row, i) / mu;
  }
  std::vector<std::vector<Complex>> cols;
  auto add_orthogonal = [&](std::vector<Complex> v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : cols) {
        Complex dot = 0.0;
        for (std::size_t r = 0; r < m; ++r) dot += std::conj(q[r]) * v[r];
        for (std::size_t r = 0; r < m; ++r) v[r] -= dot * q[r];
      }
    double norm = 0.0;
    for (const auto& x : v) norm += std::norm(x);
    norm = std::sqrt(norm);
    if (norm < 1e-6) return false;
    for (auto& x : v) x /= norm;
    cols.push_back(std::move(v));
    return true;
  };
  for (std::size_t i = 0; i < paired; ++i) {
    std::vector<Complex> v(m);
    for (std::size_t r = 0; r < m; ++r) v[r] = seed(r, i);
    if (!add_orthogonal(std::move(v))) throw std::logic_error("canonical_form: paired directions are not orthogonal");
  }
  for (std::size_t e = 0; e < m && cols.size() < m; ++e) {
    std::vector<Complex> v(m, 0.0);
    v[e] = 1.0;
    add_orthogonal(std::move(v));
  }
  Matrix u1(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t r = 0; r < m; ++r) u1(r, j) = cols[j][r];

  // Diagonalize the residual block of U1^H A U1 on the unpaired columns.
  if (paired < m) {
    std::vector<std::size_t> rest;
    for (std::size_t j = paired; j < m; ++j) rest.push_back(j);
    const Matrix ures = select_columns(u1, rest);
    const Matrix resid = ures.adjoint() * a * ures;
    const auto sr = hermitian_eig(0.5 * (resid + resid.adjoint()));
    const Matrix rotated = ures * sr.basis;
    for (std::size_t j = 0; j < rest.size(); ++j)
      for (std::size_t r = 0; r < m; ++r) u1(r, rest[j]) = rotated(r, j);
  }
  form.u1 = u1;
  const Matrix dA = u1.adjoint() * a * u1;
  for (std::size_t i = 0; i < m; ++i) form.d1[i] = dA(i, i).real();
  return form;
}

double reconstruction_defect(const GramProjection& p, const CanonicalForm& f) {
  const std::size_t m = f.m, l = f.l, n = 2 * m + l;
  std::vector<std::size_t> perm(f.plus_indices);
  perm.insert(perm.end(), f.minus_indices.begin(), f.minus_indices.end());
  const Matrix pp = principal_compression(p.gram(), perm);
  Matrix u(n, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) u(i, j) = f.u1(i, j);
  for (std::size_t i = 0; i < m + l; ++i)
    for (std::size_t j = 0; j < m + l; ++j) u(m + i, m + j) = f.u2(i, j);
  const Matrix conj = u.adjoint() * pp * u;
  Matrix pattern(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    pattern(i, i) = f.d1[i];
    pattern(i, m + i) = pattern(m + i, i) = f.d2[i];
    pattern(m + i, m + i) = f.d3[i];
  }
  for (std::size_t i = 0; i < l; ++i) pattern(2 * m + i, 2 * m + i) = f.d4[i];
  return max_abs_diff(conj, pattern);
}

double psp_norm_via_spectra(const GramProjection& p, const SymmetryVector& s) {
  require_size(p.n(), s, "psp_norm_via_spectra");
  std::vector<std::size_t> plus, minus;
  for (std::size_t i = 0; i < p.n(); ++i) (s[i] > 0 ? plus : minus).push_back(i);
  double best = 0.0;
  if (!plus.empty()) best = std::max(best, spectral_max(principal_compression(p.gram(), plus)));
  if (!minus.empty()) best = std::max(best, spectral_max(principal_compression(p.gram(), minus)));
  return best;
}

double psp_norm_from_form(const CanonicalForm& f) {
  double best = 0.0;
  auto take = [&](double lambda) {
    if (std::abs(lambda) > tol::kNonzeroSpectrum) best = std::max(best, std::abs(1.0 - 2.0 * lambda));
  };
  for (double v : f.d1) take(v);
  for (double v : f.d3) take(v);
  for (double v : f.d4) take(v);
  return best;
}

namespace {

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
  std::vector<int> signs;
  bool better_than(const Candidate& o) const { return value < o.value || (value == o.value && index < o.index); }
};

Candidate reduce(std::vector<Candidate>& parts) {
  Candidate best;
  for (auto& c : parts)
    if (c.better_than(best)) best = std::move(c);
  return best;
}

std::vector<int> signs_from_mask(std::size_t n, std::uint64_t mask) {
  // Position 1 is the most significant bit so mask order is lexicographic with +1 < -1.
  std::vector<int> s(n, 1);
  for (std::size_t i = 1; i < n; ++i)
    if (mask >> (n - 1 - i) & 1) s[i] = -1;
  return s;
}

// Per-sample generator so results do not depend on how samples are split.
std::vector<int> random_signs(std::size_t n, std::uint64_t seed, std::uint64_t i) {
  std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (i + 1));
  std::vector<int> s(n);
  for (std::size_t j = 0; j < n; j += 64) {
    const std::uint64_t bits = rng();
    for (std::size_t b = 0; b < 64 && j + b < n; ++b) s[j + b] = (bits >> b & 1) ? -1 : 1;
  }
  if (s[0] < 0)
    for (auto& x : s) x = -x;
  return s;
}

}  // namespace

SymmetrySearchResult min_symmetry_norm(const GramProjection& p, const SymmetrySearchOptions& opts) {
  const std::size_t n = p.n();
  const Matrix v = p.rank() == 0 ? Matrix(1, n) : spectral_factor(p);
  auto value = [&](const std::vector<int>& s) { return psp_norm_factored(v, SymmetryVector(s)); };
  const std::size_t threads = resolve_threads(opts.threads);

  switch (opts.strategy) {
    case SymmetryStrategy::kExhaustive: {
      if (n > kExhaustiveSymmetryHardLimit)
        throw std::invalid_argument("min_symmetry_norm: exhaustive scan beyond n = " +
                                    std::to_string(kExhaustiveSymmetryHardLimit) + " is not supported; use the random or greedy-flip strategy");
      if (n > opts.max_exhaustive_n)
        throw std::invalid_argument("min_symmetry_norm: n = " + std::to_string(n) + " exceeds the exhaustive budget of " +
                                    std::to_string(opts.max_exhaustive_n) + "; raise it (up to " +
                                    std::to_string(kExhaustiveSymmetryHardLimit) + ") or use the random strategy");
      const std::uint64_t total = std::uint64_t{1} << (n - 1);
      std::vector<Candidate> parts(threads);
      parallel_chunks(total, threads, [&](std::size_t t, std::size_t begin, std::size_t end) {
        Candidate local;
        for (std::uint64_t mask = begin; mask < end; ++mask) {
          auto s = signs_from_mask(n, mask);
          const double val = value(s);
          if (val < local.value) local = {val, mask, std::move(s)};
        }
        parts[t] = std::move(local);
      });
      auto best = reduce(parts);
      return {SymmetryVector(best.signs), best.value, total, "exhaustive", {{"canonical_first_sign", 1}}};
    }
    case SymmetryStrategy::kRandom: {
      if (opts.samples == 0) throw std::invalid_argument("min_symmetry_norm: need at least one sample");
      std::vector<Candidate> parts(threads);
      parallel_chunks(opts.samples, threads, [&](std::size_t t, std::size_t begin, std::size_t end) {
        Candidate local;
        for (std::uint64_t i = begin; i < end; ++i) {
          auto s = random_signs(n, opts.seed, i);
          const double val = value(s);
          if (val < local.value) local = {val, i, std::move(s)};
        }
        parts[t] = std::move(local);
      });
      auto best = reduce(parts);
      return {SymmetryVector(best.signs), best.value, opts.samples, "random",
              {{"seed", opts.seed}, {"samples", opts.samples}, {"argmin_sample", best.index}}};
    }
    case SymmetryStrategy::kGreedyFlip: {
      if (opts.restarts == 0) throw std::invalid_argument("min_symmetry_norm: need at least one restart");
      std::vector<Candidate> results(opts.restarts);
      std::vector<std::uint64_t> evals(opts.restarts, 0);
      parallel_chunks(opts.restarts, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
          auto s = random_signs(n, opts.seed, r);
          double cur = value(s);
          std::uint64_t count = 1;
          while (true) {
            double best = cur;
            std::size_t flip = n;
            for (std::size_t i = 1; i < n; ++i) {
              s[i] = -s[i];
              const double val = value(s);
              ++count;
              s[i] = -s[i];
              if (val < best) {
                best = val;
                flip = i;
              }
            }
            if (flip == n) break;
            s[flip] = -s[flip];
            cur = best;
          }
          results[r] = {cur, r, std::move(s)};
          evals[r] = count;
        }
      });
      std::uint64_t scanned = 0;
      for (auto e : evals) scanned += e;
      auto best = reduce(results);
      return {SymmetryVector(best.signs), best.value, scanned, "greedy-flip",
              {{"seed", opts.seed}, {"restarts", opts.restarts}, {"argmin_restart", best.index}}};
    }
  }
  throw std::invalid_argument("min_symmetry_norm: unknown strategy");
}

SymmetrySearchResult min_over_symmetries(const GramProjection& p, std::span<const SymmetryVector> list) {
  if (list.empty()) throw std::invalid_argument("min_over_symmetries: empty list");
  const Matrix v = spectral_factor(p);
  Candidate best;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const double val = psp_norm_factored(v, list[i]);
    if (val < best.value) best = {val, i, list[i].signs()};
  }
  return {SymmetryVector(best.signs), best.value, list.size(), "list", {{"argmin_index", best.index}}};
}

std::vector<SymmetryVector> interval_symmetries(std::size_t n) {
  if (n < 2) throw std::invalid_argument("interval_symmetries: need n >= 2");
  std::vector<SymmetryVector> out;
  for (std::size_t len : {n / 2, n - n / 2}) {
    for (std::size_t start = 0; start < n; ++start) {
      std::vector<int> s(n, 1);
      for (std::size_t t = 0; t < len; ++t) s[(start + t) % n] = -1;
      out.emplace_back(std::move(s));
    }
  }
  return out;
}

std::string int128_to_string(__int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string out;
  while (u > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

ConjACertificate conjA_certificate(std::size_t n, std::size_t k) {
  if (k == 0 || n <= 2 * k)
    throw std::invalid_argument("conjA_certificate: need n > 2k (got n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
  const __int128 nn = n, kk = k;
  ConjACertificate c{n, k, (kk - 1) * nn * nn, 4 * kk * kk * (nn - 1), false, ""};
  c.is_counterexample = c.lhs > c.rhs;
  std::ostringstream os;
  os << "(k-1)n^2 = " << int128_to_string(c.lhs) << (c.is_counterexample ? " > " : " <= ") << "4k^2(n-1) = "
     << int128_to_string(c.rhs) << "; ";
  if (c.is_counterexample)
    os << "for every diagonal symmetry S on any uniform equiangular (" << n << "," << k << ") Gram, ||PSP|| > 2k/n = "
       << 2.0 * static_cast<double>(k) / static_cast<double>(n);
  else
    os << "no conclusion";
  c.statement = os.str();
  return c;
}

std::pair<std::size_t, std::size_t> singer_parameters(std::size_t q, std::size_t m) {
  if (q < 2 || m < 1) throw std::invalid_argument("singer_parameters: need q >= 2 and m >= 1");
  std::size_t power = 1, k = 0;
  for (std::size_t i = 0; i < m; ++i) {
    k += power;
    power *= q;
  }
  return {k + power, k};
}

nlohmann::json conjA_to_json(const ConjACertificate& c) {
  auto as_json = [](__int128 v) {
    if (v <= static_cast<__int128>(std::numeric_limits<std::int64_t>::max())) return nlohmann::json(static_cast<std::int64_t>(v));
    return nlohmann::json(int128_to_string(v));
  };
  return {{"n", c.n}, {"k", c.k}, {"lhs", as_json(c.lhs)}, {"rhs", as_json(c.rhs)},
          {"is_counterexample", c.is_counterexample}, {"statement", c.statement}};
}

TraceReport conjB_trace_suite(const GramProjection& g, std::span<const std::size_t> r, std::optional<double> eps) {
  const std::size_t n = g.n();
  std::vector<char> in_r(n, 0);
  for (auto i : r) {
    if (i >= n) throw std::invalid_argument("conjB_trace_suite: index out of range");
    in_r[i] = 1;
  }
  std::vector<std::size_t> rs, ts;
  for (std::size_t i = 0; i < n; ++i) (in_r[i] ? rs : ts).push_back(i);
  if (rs.empty() || ts.empty()) throw std::invalid_argument("conjB_trace_suite: R and its complement must both be nonempty");

  TraceReport out;
  out.n = n;
  out.k = g.rank();
  out.r_size = rs.size();
  const Matrix& p = g.gram();
  const Matrix qr = compress_in_place(Matrix::identity(n), rs);
  const Matrix qt = compress_in_place(Matrix::identity(n), ts);
  out.trace_matrix = (qr * p * qt * p * qr).trace().real();

  // Frame route: inner products of the recovered synthesis columns.
  const Matrix v = spectral_factor(g);
  for (auto i : rs)
    for (auto j : ts) {
      Complex ip = 0.0;
      for (std::size_t a = 0; a < v.rows(); ++a) ip += v(a, i) * std::conj(v(a, j));
      out.trace_sum += std::norm(ip);
    }
  out.discrepancy = std::abs(out.trace_matrix - out.trace_sum);
  if (out.discrepancy > 1e-10) {
    std::ostringstream os;
    os << "conjB_trace_suite: matrix trace " << out.trace_matrix << " and frame double sum " << out.trace_sum << " disagree";
    throw std::logic_error(os.str());
  }
  const double kd = static_cast<double>(out.k), nd = static_cast<double>(n);
  out.final_bound = kd / 4.0 * (1.0 - kd / nd);
  if (eps) {
    out.eps = eps;
    out.pa_bound = kd * *eps * (2.0 - *eps) / 4.0;
  }

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        lo = std::min(lo, std::abs(p(i, j)));
        hi = std::max(hi, std::abs(p(i, j)));
      }
  if (n > 1 && out.k < n && hi - lo <= 1e-9) {
    const double c = hi;
    const double mm = static_cast<double>(std::min(rs.size(), ts.size()));
    out.equiangular_c = c;
    out.equiangular_trace = mm * (nd - mm) * c * c;
    out.equiangular_cap = kd * (nd - kd) / (4.0 * (nd - 1.0));
    out.eps_relation = (nd - kd) / (nd - 1.0);
  }
  return out;
}

nlohmann::json trace_report_to_json(const TraceReport& t) {
  nlohmann::json j = {{"n", t.n},
                      {"k", t.k},
                      {"r_size", t.r_size},
                      {"trace_matrix", t.trace_matrix},
                      {"trace_sum", t.trace_sum},
                      {"discrepancy", t.discrepancy},
                      {"final_bound", t.final_bound}};
  if (t.eps) j["eps"] = *t.eps;
  if (t.pa_bound) j["pa_bound"] = *t.pa_bound;
  if (t.equiangular_c) {
    j["equiangular_c"] = *t.equiangular_c;
    j["equiangular_trace"] = *t.equiangular_trace;
    j["equiangular_cap"] = *t.equiangular_cap;
    j["eps_relation"] = *t.eps_relation;
  }
  return j;
}

}  // namespace paving_lab
