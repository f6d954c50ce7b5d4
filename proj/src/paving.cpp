#include "paving_lab/paving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "paving_lab/parallel.hpp"

namespace paving_lab {

namespace {

double block_norm(const Matrix& t, std::span<const std::size_t> block) {
  if (block.empty()) return 0.0;
  return operator_norm(principal_compression(t, block));
}

std::vector<std::size_t> members(std::span<const std::uint8_t> labels, std::uint8_t b) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == b) out.push_back(i);
  return out;
}

void require_square(const Matrix& t, const char* what) {
  if (!t.is_square()) throw std::invalid_argument(std::string(what) + ": operator must be square, got " + describe_shape(t));
}

}  // namespace

Partition Partition::from_blocks(std::size_t n, std::vector<std::vector<std::size_t>> blocks) {
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> kept;
  for (auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("partition: empty block");
    std::sort(b.begin(), b.end());
    for (auto i : b) {
      if (i >= n) throw std::invalid_argument("partition: index " + std::to_string(i) + " out of range for n = " + std::to_string(n));
      if (seen[i]) throw std::invalid_argument("partition: index " + std::to_string(i) + " appears twice");
      seen[i] = 1;
    }
    kept.push_back(std::move(b));
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i]) throw std::invalid_argument("partition: index " + std::to_string(i) + " is not covered");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return Partition(n, std::move(kept));
}

Partition Partition::from_labels(std::span<const std::size_t> labels) {
  if (labels.empty()) throw std::invalid_argument("partition: no indices");
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> seen_labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(seen_labels.begin(), seen_labels.end(), labels[i]);
    if (it == seen_labels.end()) {
      seen_labels.push_back(labels[i]);
      blocks.push_back({i});
    } else {
      blocks[static_cast<std::size_t>(it - seen_labels.begin())].push_back(i);
    }
  }
  return Partition(labels.size(), std::move(blocks));
}

Partition Partition::singletons(std::size_t n) {
  std::vector<std::vector<std::size_t>> blocks(n);
  for (std::size_t i = 0; i < n; ++i) blocks[i] = {i};
  return Partition(n, std::move(blocks));
}

Partition Partition::whole(std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return Partition(n, {std::move(all)});
}

std::vector<std::size_t> Partition::labels() const {
  std::vector<std::size_t> out(n_);
  for (std::size_t j = 0; j < blocks_.size(); ++j)
    for (auto i : blocks_[j]) out[i] = j;
  return out;
}

Partition Partition::restrict_to_prefix(std::size_t m) const {
  if (m == 0 || m > n_) throw std::invalid_argument("partition: prefix length out of range");
  std::vector<std::vector<std::size_t>> blocks;
  for (const auto& b : blocks_) {
    std::vector<std::size_t> kept;
    for (auto i : b)
      if (i < m) kept.push_back(i);
    if (!kept.empty()) blocks.push_back(std::move(kept));
  }
  return from_blocks(m, std::move(blocks));
}

Partition Partition::refine(const Partition& other) const {
  if (other.n_ != n_) throw std::invalid_argument("partition: refining partitions of different sizes");
  const auto a = labels(), b = other.labels();
  std::vector<std::size_t> joint(n_);
  for (std::size_t i = 0; i < n_; ++i) joint[i] = a[i] * other.size() + b[i];
  return from_labels(joint);
}

std::size_t Partition::largest_block() const {
  std::size_t best = 0;
  for (const auto& b : blocks_) best = std::max(best, b.size());
  return best;
}

std::uint64_t count_partitions(std::size_t n, std::size_t r) {
  // Stirling numbers of the second kind, row by row, saturating.
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> s(r + 1, 0);
  s[0] = 1;
  for (std::size_t m = 1; m <= n; ++m) {
    for (std::size_t j = std::min(m, r); j >= 1; --j) {
      const std::uint64_t a = s[j], b = s[j - 1];
      std::uint64_t prod = 0;
      if (__builtin_mul_overflow(a, static_cast<std::uint64_t>(j), &prod) || __builtin_add_overflow(prod, b, &prod))
        prod = kMax;
      s[j] = prod;
    }
    s[0] = 0;
  }
  std::uint64_t total = 0;
  for (std::size_t j = 1; j <= r; ++j)
    if (__builtin_add_overflow(total, s[j], &total)) return kMax;
  return total;
}

std::vector<std::vector<std::uint8_t>> restricted_growth_strings(std::size_t n, std::size_t r) {
  if (n == 0 || r == 0) throw std::invalid_argument("restricted_growth_strings: need n >= 1 and r >= 1");
  if (r > 255) r = 255;
  std::vector<std::vector<std::uint8_t>> out;
  std::vector<std::uint8_t> a(n, 0), maxprefix(n, 0);  // maxprefix[i] = max(a[0..i-1])
  while (true) {
    out.push_back(a);
    // Increment the rightmost position that may still grow.
    std::size_t i = n;
    while (i-- > 1) {
      if (a[i] <= maxprefix[i] && static_cast<std::size_t>(a[i]) + 1 < r) break;
    }
    if (i == 0 || i >= n) break;
    ++a[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      maxprefix[j] = std::max(maxprefix[j - 1], a[j - 1]);
    }
  }
  return out;
}

PavedOperator paving_norm(const Matrix& t, const Partition& p) {
  require_square(t, "paving_norm");
  if (p.n() != t.rows())
    throw std::invalid_argument("paving_norm: partition of " + std::to_string(p.n()) + " indices for a " +
                                describe_shape(t) + " operator");
  PavedOperator out{t, p, {}, 0.0, "given", std::nullopt};
  for (const auto& b : p.blocks()) {
    out.per_block_norms.push_back(block_norm(t, b));
    out.epsilon = std::max(out.epsilon, out.per_block_norms.back());
  }
  return out;
}

nlohmann::json paved_to_json(const PavedOperator& paved) {
  nlohmann::json prov = {{"strategy", paved.strategy}};
  prov["seed"] = paved.seed ? nlohmann::json(*paved.seed) : nlohmann::json(nullptr);
  return {{"n", paved.partition.n()},
          {"partition", paved.partition.blocks()},
          {"per_block_norms", paved.per_block_norms},
          {"epsilon", paved.epsilon},
          {"provenance", prov}};
}

PavedOperator paved_from_json(const nlohmann::json& j, const Matrix& op) {
  auto p = Partition::from_blocks(op.rows(), j.at("partition").get<std::vector<std::vector<std::size_t>>>());
  auto out = paving_norm(op, p);
  const auto stored = j.at("per_block_norms").get<std::vector<double>>();
  if (stored.size() != out.per_block_norms.size()) throw std::invalid_argument("paved operator json: block norm count mismatch");
  for (std::size_t b = 0; b < stored.size(); ++b)
    if (std::abs(stored[b] - out.per_block_norms[b]) > 1e-10)
      throw std::invalid_argument("paved operator json: stored norm of block " + std::to_string(b) + " does not match");
  if (std::abs(j.at("epsilon").get<double>() - out.epsilon) > 1e-10)
    throw std::invalid_argument("paved operator json: stored epsilon does not match");
  const auto& prov = j.at("provenance");
  out.strategy = prov.at("strategy").get<std::string>();
  if (!prov.at("seed").is_null()) out.seed = prov.at("seed").get<std::uint64_t>();
  return out;
}

PavedOperator exhaustive_pave(const Matrix& t, std::size_t r, const ExhaustiveOptions& opts) {
  require_square(t, "exhaustive_pave");
  if (r == 0) throw std::invalid_argument("exhaustive_pave: r must be positive");
  const std::size_t n = t.rows();
  const std::uint64_t count = count_partitions(n, r);
  if (count > opts.max_partitions) {
    std::ostringstream os;
    os << "exhaustive_pave: " << count << " partitions of " << n << " indices into at most " << r
       << " blocks exceed the budget of " << opts.max_partitions << "; use local_search_pave";
    throw BudgetExceeded(os.str());
  }
  const auto strings = restricted_growth_strings(n, r);

  struct Best {
    double eps = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
  };
  const std::size_t threads = std::min<std::size_t>(resolve_threads(opts.threads), strings.size());
  std::vector<Best> best(threads);
  parallel_chunks(strings.size(), threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Best local;
    for (std::size_t s = begin; s < end; ++s) {
      const auto& labels = strings[s];
      const std::uint8_t blocks = *std::max_element(labels.begin(), labels.end()) + 1;
      double eps = 0.0;
      for (std::uint8_t b = 0; b < blocks && eps <= local.eps; ++b) eps = std::max(eps, block_norm(t, members(labels, b)));
      // Later indices only win on strict improvement.
      if (eps < local.eps) local = {eps, s};
    }
    best[chunk] = local;
  });
  Best winner;
  for (const auto& b : best)
    if (b.eps < winner.eps || (b.eps == winner.eps && b.index < winner.index)) winner = b;

  std::vector<std::size_t> labels(strings[winner.index].begin(), strings[winner.index].end());
  auto out = paving_norm(t, Partition::from_labels(labels));
  out.strategy = "exhaustive";
  return out;
}

namespace {

struct Objective {
  double eps;
  double sum;
  bool operator<(const Objective& o) const { return eps < o.eps || (eps == o.eps && sum < o.sum); }
};

class LocalState {
 public:
  LocalState(const Matrix& t, std::size_t r, std::vector<std::uint8_t> labels) : t_(t), labels_(std::move(labels)), norms_(r) {
    for (std::size_t b = 0; b < r; ++b) norms_[b] = norm_of(static_cast<std::uint8_t>(b));
  }

  Objective objective() const { return objective_with({}); }
  const std::vector<std::uint8_t>& labels() const { return labels_; }

  // Objective after relabeling the listed indices; the touched blocks are recomputed.
  Objective trial(std::span<const std::pair<std::size_t, std::uint8_t>> moves, std::vector<std::pair<std::uint8_t, double>>& changed) {
    std::vector<std::uint8_t> old;
    for (auto [i, b] : moves) {
      old.push_back(labels_[i]);
      labels_[i] = b;
    }
    changed.clear();
    auto touch = [&](std::uint8_t b) {
      for (auto& c : changed)
        if (c.first == b) return;
      changed.emplace_back(b, norm_of(b));
    };
    for (std::size_t m = 0; m < moves.size(); ++m) {
      touch(old[m]);
      touch(moves[m].second);
    }
    const Objective obj = objective_with(changed);
    for (std::size_t m = moves.size(); m-- > 0;) labels_[moves[m].first] = old[m];
    return obj;
  }

  void apply(std::span<const std::pair<std::size_t, std::uint8_t>> moves, const std::vector<std::pair<std::uint8_t, double>>& changed) {
    for (auto [i, b] : moves) labels_[i] = b;
    for (auto [b, v] : changed) norms_[b] = v;
  }

 private:
  double norm_of(std::uint8_t b) const { return block_norm(t_, members(labels_, b)); }

  Objective objective_with(std::span<const std::pair<std::uint8_t, double>> changed) const {
    Objective o{0.0, 0.0};
    for (std::size_t b = 0; b < norms_.size(); ++b) {
      double v = norms_[b];
      for (auto [cb, cv] : changed)
        if (cb == b) v = cv;
      o.eps = std::max(o.eps, v);
      o.sum += v;
    }
    return o;
  }

  const Matrix& t_;
  std::vector<std::uint8_t> labels_;
  std::vector<double> norms_;
};

std::vector<std::uint8_t> descend(const Matrix& t, std::size_t r, std::vector<std::uint8_t> start, bool swaps) {
  const std::size_t n = start.size();
  LocalState state(t, r, std::move(start));
  Objective current = state.objective();
  std::vector<std::pair<std::uint8_t, double>> changed, best_changed;
  while (true) {
    std::vector<std::pair<std::size_t, std::uint8_t>> best_moves;
    Objective best = current;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t b = 0; b < r; ++b) {
        if (b == state.labels()[i]) continue;
        const std::pair<std::size_t, std::uint8_t> mv[] = {{i, static_cast<std::uint8_t>(b)}};
        const Objective o = state.trial(mv, changed);
        if (o < best) {
          best = o;
          best_moves.assign(std::begin(mv), std::end(mv));
          best_changed = changed;
        }
      }
    }
    if (best_moves.empty() && swaps) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const auto li = state.labels()[i], lj = state.labels()[j];
          if (li == lj) continue;
          const std::pair<std::size_t, std::uint8_t> mv[] = {{i, lj}, {j, li}};
          const Objective o = state.trial(mv, changed);
          if (o < best) {
            best = o;
            best_moves.assign(std::begin(mv), std::end(mv));
            best_changed = changed;
          }
        }
    }
    if (best_moves.empty()) break;
    state.apply(best_moves, best_changed);
    current = best;
  }
  return state.labels();
}

}  // namespace

PavedOperator local_search_pave(const Matrix& t, std::size_t r, const LocalSearchOptions& opts) {
  require_square(t, "local_search_pave");
  if (r == 0) throw std::invalid_argument("local_search_pave: r must be positive");
  if (opts.restarts == 0) throw std::invalid_argument("local_search_pave: need at least one restart");
  const std::size_t n = t.rows();
  r = std::min({r, n, std::size_t{255}});

  struct Result {
    Objective obj{std::numeric_limits<double>::infinity(), 0.0};
    std::vector<std::uint8_t> labels;
  };
  std::vector<Result> results(opts.restarts);
  parallel_chunks(opts.restarts, opts.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(k)};
      std::mt19937_64 rng(seq);
      std::uniform_int_distribution<int> pick(0, static_cast<int>(r) - 1);
      std::vector<std::uint8_t> start(n);
      for (auto& l : start) l = static_cast<std::uint8_t>(pick(rng));
      auto labels = descend(t, r, std::move(start), opts.swap_fallback);
      LocalState final_state(t, r, labels);
      results[k] = {final_state.objective(), std::move(labels)};
    }
  });
  std::size_t win = 0;
  for (std::size_t k = 1; k < results.size(); ++k)
    if (results[k].obj < results[win].obj) win = k;

  std::vector<std::size_t> labels(results[win].labels.begin(), results[win].labels.end());
  auto out = paving_norm(t, Partition::from_labels(labels));
  out.strategy = "local";
  out.seed = opts.seed;
  return out;
}

namespace {

void require_weights(const Matrix& w) {
  require_square(w, "bhkw_partition");
  const double scale = std::max(1.0, w.max_abs());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      const Complex v = w(i, j);
      if (std::abs(v.imag()) > tol::kHermitianRel * scale || v.real() < 0.0)
        throw std::invalid_argument("bhkw_partition: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") is not a nonnegative real");
      if (v != w(j, i))
        throw std::invalid_argument("bhkw_partition: not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    if (w(i, i) != 0.0) throw std::invalid_argument("bhkw_partition: nonzero diagonal at (" + std::to_string(i) + "," + std::to_string(i) + ")");
  }
}

std::vector<double> row_sums(const Matrix& w, const std::vector<std::size_t>& labels, std::size_t i, std::size_t r) {
  std::vector<double> s(r, 0.0);
  for (std::size_t m = 0; m < labels.size(); ++m) s[labels[m]] += w(i, m).real();
  return s;
}

}  // namespace

Partition bhkw_partition(const Matrix& w, std::size_t r) {
  require_weights(w);
  if (r == 0) throw std::invalid_argument("bhkw_partition: r must be positive");
  const std::size_t n = w.rows();
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % r;
  // Each move lowers the total intra-block weight by 2 (s_own - s_min) > 0.
  constexpr double kSlack = 1e-13;
  while (true) {
    bool moved = false;
    for (std::size_t i = 0; i < n && !moved; ++i) {
      const auto s = row_sums(w, labels, i, r);
      const std::size_t target = static_cast<std::size_t>(std::min_element(s.begin(), s.end()) - s.begin());
      if (s[labels[i]] > s[target] + kSlack) {
        labels[i] = target;
        moved = true;
      }
    }
    if (!moved) break;
  }
  return Partition::from_labels(labels);
}

double bhkw_violation(const Matrix& w, const Partition& p) {
  const auto labels = p.labels();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto s = row_sums(w, labels, i, p.size());
    for (std::size_t l = 0; l < p.size(); ++l)
      if (l != labels[i]) worst = std::max(worst, s[labels[i]] - s[l]);
  }
  return worst;
}

bool columns_independent(const Matrix& synthesis, std::span<const std::size_t> block) {
  if (block.empty()) return true;
  if (block.size() > synthesis.rows()) return false;
  return singular_values(select_columns(synthesis, block)).back() > tol::kRank;
}

namespace {

// Edmonds matroid partition: insert each element along a shortest exchange path.
bool augment(const Matrix& v, std::vector<std::vector<std::size_t>>& sets, std::vector<int>& owner, std::size_t x) {
  const std::size_t n = owner.size();
  const std::size_t r = sets.size();
  auto with = [](std::vector<std::size_t> s, std::size_t add, std::optional<std::size_t> drop) {
    if (drop) s.erase(std::find(s.begin(), s.end(), *drop));
    s.push_back(add);
    return s;
  };
  std::vector<int> parent(n, -1), via(n, -1);
  std::vector<char> visited(n, 0);
  std::vector<std::size_t> queue{x};
  visited[x] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t y = queue[head];
    for (std::size_t j = 0; j < r; ++j) {
      if (owner[y] == static_cast<int>(j)) continue;
      if (columns_independent(v, with(sets[j], y, std::nullopt))) {
        // Unwind: y joins set j, and each predecessor replaces its successor.
        std::size_t cur = y;
        int target = static_cast<int>(j);
        while (true) {
          const int prev_owner = owner[cur];
          if (prev_owner >= 0) {
            auto& s = sets[static_cast<std::size_t>(prev_owner)];
            s.erase(std::find(s.begin(), s.end(), cur));
          }
          sets[static_cast<std::size_t>(target)].push_back(cur);
          owner[cur] = target;
          if (parent[cur] < 0) break;
          target = via[cur];
          cur = static_cast<std::size_t>(parent[cur]);
        }
        return true;
      }
      for (auto z : sets[j]) {
        if (visited[z]) continue;
        if (columns_independent(v, with(sets[j], y, z))) {
          visited[z] = 1;
          parent[z] = static_cast<int>(y);
          via[z] = static_cast<int>(j);
          queue.push_back(z);
        }
      }
    }
  }
  return false;
}

}  // namespace

std::optional<Partition> rado_horn_partition(const GramProjection& g, std::size_t r) {
  if (r == 0) throw std::invalid_argument("rado_horn_partition: r must be positive");
  const std::size_t n = g.n();
  const double need = 1.0 / static_cast<double>(r) - 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.gram()(i, i).real() < need) {
      std::ostringstream os;
      os << "rado_horn_partition: diagonal entry " << i << " is " << g.gram()(i, i).real() << " < 1/" << r;
      throw std::invalid_argument(os.str());
    }
  }
  const Matrix v = spectral_factor(g);
  std::vector<std::vector<std::size_t>> sets(r);
  std::vector<int> owner(n, -1);
  bool ok = true;
  for (std::size_t x = 0; x < n && ok; ++x) ok = augment(v, sets, owner, x);
  if (ok) {
    std::vector<std::vector<std::size_t>> blocks;
    for (auto& s : sets)
      if (!s.empty()) blocks.push_back(std::move(s));
    return Partition::from_blocks(n, std::move(blocks));
  }
  if (n <= 10) {
    for (const auto& labels : restricted_growth_strings(n, r)) {
      const std::uint8_t blocks = *std::max_element(labels.begin(), labels.end()) + 1;
      bool all = true;
      for (std::uint8_t b = 0; b < blocks && all; ++b) all = columns_independent(v, members(labels, b));
      if (all) {
        std::vector<std::size_t> wide(labels.begin(), labels.end());
        return Partition::from_labels(wide);
      }
    }
  }
  return std::nullopt;
}

RieszBound riesz_paving_bound(const GramProjection& g, const Partition& p) {
  if (p.n() != g.n()) throw std::invalid_argument("riesz_paving_bound: partition size does not match the Gram matrix");
  RieszBound out;
  for (const auto& b : p.blocks()) {
    const double c = hermitian_eigenvalues(principal_compression(g.gram(), b)).front();
    out.lower_bounds.push_back(c);
    out.levels.push_back(1.0 - c);
    out.epsilon = std::max(out.epsilon, 1.0 - c);
  }
  return out;
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kConference: return "conference";
    case BoundKind::kHalfProjection: return "half_projection";
    case BoundKind::kBigBlock: return "big_block";
  }
  return "unknown";
}

namespace {

BoundKind kind_from_string(const std::string& s) {
  if (s == "conference") return BoundKind::kConference;
  if (s == "half_projection") return BoundKind::kHalfProjection;
  if (s == "big_block") return BoundKind::kBigBlock;
  throw std::invalid_argument("bound certificate: unknown kind '" + s + "'");
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

double evaluate_bound(BoundKind kind, std::size_t n, std::size_t k, std::size_t r) {
  if (r < 2) throw std::invalid_argument("bound certificates need r >= 2");
  switch (kind) {
    case BoundKind::kConference:
      if (n < 2) throw std::invalid_argument("conference bound needs n >= 2");
      return std::sqrt(static_cast<double>(ceil_div(n, r) - 1) / static_cast<double>(n - 1));
    case BoundKind::kHalfProjection:
      return static_cast<double>(r) / (2.0 * static_cast<double>(r - 1));
    case BoundKind::kBigBlock:
      if (k > n) throw std::invalid_argument("big-block bound needs k <= n");
      return ceil_div(n, r) >= n - k + 1 ? 1.0 : 0.0;
  }
  return 0.0;
}

std::vector<BoundCertificate> bound_certificates(std::size_t n, std::size_t k, std::size_t r) {
  if (r < 2) throw std::invalid_argument("bound_certificates: r must be at least 2");
  std::vector<BoundCertificate> out;
  const std::size_t m = ceil_div(n, r);
  {
    std::ostringstream os;
    os << "A = C/sqrt(n-1) has zero diagonal and A^2 = I. Some block of any " << r << "-partition has d >= " << m
       << " indices, and the d x d compression A_j satisfies ||A_j^* A_j|| >= (d-1)/(n-1), so eps^2 >= (" << m
       << "-1)/(" << n << "-1)";
    out.push_back({BoundKind::kConference, r, n, k, evaluate_bound(BoundKind::kConference, n, k, r), os.str()});
  }
  {
    std::ostringstream os;
    os << "a uniform Parseval (mr, m(r-1)+1) frame gives a projection Q with diagonal 1/2 + delta, delta = (m(r-2)+2)/(2mr) "
          "recomputed from the diagonal; an eps-paving of the half-diagonal class paves Q at (1+2 delta) eps, and some block has "
          "m = n-k+1 indices so that level is 1; hence eps >= mr/(m(2r-2)+2), which tends to r/(2(r-1)) = "
       << evaluate_bound(BoundKind::kHalfProjection, n, k, r);
    out.push_back({BoundKind::kHalfProjection, r, n, k, evaluate_bound(BoundKind::kHalfProjection, n, k, r), os.str()});
  }
  {
    std::ostringstream os;
    os << "some block has at least ceil(" << n << "/" << r << ") = " << m << " indices; ";
    if (m >= n - k + 1)
      os << m << " >= n-k+1 = " << n - k + 1 << ", so the block meets the range of P nontrivially and its compression has norm 1";
    else
      os << m << " < n-k+1 = " << n - k + 1 << ", no conclusion";
    out.push_back({BoundKind::kBigBlock, r, n, k, evaluate_bound(BoundKind::kBigBlock, n, k, r), os.str()});
  }
  return out;
}

nlohmann::json certificate_to_json(const BoundCertificate& c) {
  return {{"kind", to_string(c.kind)}, {"r", c.r}, {"n", c.n}, {"k", c.k}, {"bound", c.bound}, {"derivation", c.derivation}};
}

BoundCertificate certificate_from_json(const nlohmann::json& j) {
  BoundCertificate c{kind_from_string(j.at("kind").get<std::string>()), j.at("r").get<std::size_t>(),
                     j.at("n").get<std::size_t>(), j.at("k").get<std::size_t>(), j.at("bound").get<double>(),
                     j.value("derivation", std::string{})};
  const double expected = evaluate_bound(c.kind, c.n, c.k, c.r);
  if (std::abs(expected - c.bound) > 1e-12) {
    std::ostringstream os;
    os << "bound certificate: stored bound " << c.bound << " differs from re-evaluated " << expected;
    throw std::invalid_argument(os.str());
  }
  if (c.bound < 0.0 || c.bound > 1.0) throw std::invalid_argument("bound certificate: bound outside [0,1]");
  return c;
}

}  // namespace paving_lab
