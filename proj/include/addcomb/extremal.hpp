#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "addcomb/counting.hpp"
#include "addcomb/error.hpp"
#include "addcomb/forms.hpp"
#include "addcomb/numtheory.hpp"
#include "addcomb/random.hpp"
#include "addcomb/rational.hpp"

namespace addcomb {

enum class Method { exact, heuristic, construction };
enum class BoundKind { equals, upperBound, lowerBound };

inline std::string toString(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::heuristic: return "heuristic";
    case Method::construction: return "construction";
  }
  return "?";
}

inline std::string toString(BoundKind b) {
  switch (b) {
    case BoundKind::equals: return "equals";
    case BoundKind::upperBound: return "upperBound";
    case BoundKind::lowerBound: return "lowerBound";
  }
  return "?";
}

struct ExtremalResult {
  /// Present for exact and construction results; heuristic values are in `value` only.
  std::optional<Rational> exactValue;
  double value = 0;
  SubsetOfZN certificate;
  Method method = Method::exact;
  BoundKind boundKind = BoundKind::equals;
  nlohmann::json verification = nlohmann::json::object();

  nlohmann::json toJson() const {
    nlohmann::json j;
    j["value"] = exactValue ? nlohmann::json(toString(*exactValue)) : nlohmann::json(value);
    j["valueDecimal"] = value;
    j["certificate"] = {{"N", certificate.modulus()}, {"members", certificate.members()}};
    j["method"] = toString(method);
    j["boundKind"] = toString(boundKind);
    j["verification"] = verification;
    return j;
  }
};

/// Work limits for the exact searches and the local-search heuristics.
struct SearchBudget {
  std::uint64_t maxNodes = 200'000'000;
  /// Wall-clock limit; exact searches throw BudgetExceeded, heuristics stop at the last full epoch.
  std::optional<std::chrono::milliseconds> timeLimit;
  std::uint64_t maxConfigurationPoints = 20'000'000;
};

/// Configuration policy for freeness: strict forbids every tuple in the image,
/// including the constant ones; the relaxed variant ignores tuples whose coordinates all coincide.
enum class DegeneracyPolicy { strict, excludeConstant };

namespace detail {

class Deadline {
 public:
  explicit Deadline(const SearchBudget& b)
      : limit_(b.timeLimit), start_(std::chrono::steady_clock::now()) {}
  bool expired() const { return limit_ && std::chrono::steady_clock::now() - start_ > *limit_; }
  double elapsedMs() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::optional<std::chrono::milliseconds> limit_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// The multiset {psi(n) : n in (Z/N)^D}, grouped by the set of distinct coordinates.
/// Sol(1_A) * N^D is the total weight of groups whose coordinate set lies in A.
class ConfigurationIndex {
 public:
  ConfigurationIndex(const LinearFormSystem& s, std::int64_t n, std::uint64_t maxPoints = 20'000'000)
      : n_(n), width_(s.formCount()) {
    detail::require(n >= 1, "modulus must be positive");
    auto total = detail::checkedPower(static_cast<std::uint64_t>(n), s.variableCount(), maxPoints);
    if (!total || *total > maxPoints)
      throw BudgetExceeded("configuration index: N^D exceeds the cap of " + std::to_string(maxPoints));
    total_ = *total;
    std::vector<std::int32_t> flat;
    flat.reserve(total_ * width_);
    std::vector<std::int32_t> key(width_);
    detail::forEachImage(s, n, [&](const std::vector<std::int64_t>& v) {
      for (std::size_t i = 0; i < width_; ++i) key[i] = static_cast<std::int32_t>(v[i]);
      std::sort(key.begin(), key.end());
      auto end = std::unique(key.begin(), key.end());
      std::fill(end, key.end(), -1);
      flat.insert(flat.end(), key.begin(), key.end());
    });
    std::vector<std::uint32_t> order(total_);
    std::iota(order.begin(), order.end(), 0u);
    auto less = [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(flat.begin() + a * width_, flat.begin() + (a + 1) * width_,
                                          flat.begin() + b * width_, flat.begin() + (b + 1) * width_);
    };
    auto same = [&](std::uint32_t a, std::uint32_t b) {
      return std::equal(flat.begin() + a * width_, flat.begin() + (a + 1) * width_, flat.begin() + b * width_);
    };
    std::sort(order.begin(), order.end(), less);
    incidence_.assign(n, {});
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j < order.size() && same(order[i], order[j])) ++j;
      const std::uint32_t g = static_cast<std::uint32_t>(weights_.size());
      weights_.push_back(j - i);
      std::uint8_t sz = 0;
      for (std::size_t c = 0; c < width_; ++c) {
        std::int32_t x = flat[order[i] * width_ + c];
        if (x < 0) break;
        incidence_[x].push_back(g);
        ++sz;
      }
      sizes_.push_back(sz);
      i = j;
    }
  }

  std::int64_t modulus() const { return n_; }
  std::uint64_t total() const { return total_; }
  std::size_t groupCount() const { return weights_.size(); }
  std::uint64_t weight(std::size_t g) const { return weights_[g]; }
  std::uint8_t groupSize(std::size_t g) const { return sizes_[g]; }
  const std::vector<std::uint32_t>& incidence(std::int64_t x) const { return incidence_[x]; }

  /// Coordinates of each group (recomputed from the incidence lists).
  std::vector<std::vector<std::int64_t>> groups() const {
    std::vector<std::vector<std::int64_t>> out(weights_.size());
    for (std::int64_t x = 0; x < n_; ++x)
      for (auto g : incidence_[x]) out[g].push_back(x);
    return out;
  }

 private:
  std::int64_t n_;
  std::size_t width_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> weights_;
  std::vector<std::uint8_t> sizes_;
  std::vector<std::vector<std::uint32_t>> incidence_;
};

/// Incrementally maintained configuration count of a changing set.
class ConfigurationTracker {
 public:
  explicit ConfigurationTracker(const ConfigurationIndex& idx, bool startFull = false)
      : idx_(&idx), in_(idx.modulus(), startFull ? 1 : 0), missing_(idx.groupCount()) {
    for (std::size_t g = 0; g < idx.groupCount(); ++g) {
      missing_[g] = startFull ? 0 : idx.groupSize(g);
      if (startFull) count_ += idx.weight(g);
    }
    size_ = startFull ? static_cast<std::size_t>(idx.modulus()) : 0;
  }

  std::uint64_t count() const { return count_; }
  std::size_t size() const { return size_; }
  bool contains(std::int64_t x) const { return in_[x] != 0; }

  void add(std::int64_t x) {
    if (in_[x]) return;
    in_[x] = 1;
    ++size_;
    for (auto g : idx_->incidence(x))
      if (--missing_[g] == 0) count_ += idx_->weight(g);
  }

  void remove(std::int64_t x) {
    if (!in_[x]) return;
    in_[x] = 0;
    --size_;
    for (auto g : idx_->incidence(x))
      if (missing_[g]++ == 0) count_ -= idx_->weight(g);
  }

  /// Count after adding x, without changing the state.
  std::uint64_t countWith(std::int64_t x) const {
    if (in_[x]) return count_;
    std::uint64_t c = count_;
    for (auto g : idx_->incidence(x))
      if (missing_[g] == 1) c += idx_->weight(g);
    return c;
  }

  SubsetOfZN set() const { return SubsetOfZN::fromMask(in_); }

 private:
  const ConfigurationIndex* idx_;
  std::vector<std::uint8_t> in_;
  std::vector<std::uint32_t> missing_;
  std::uint64_t count_ = 0;
  std::size_t size_ = 0;
};

namespace detail {

inline std::int64_t ceilTimes(const Rational& alpha, std::int64_t n) {
  Rational x = alpha * n;
  Integer f = floorOf(x);
  return (isIntegral(x) ? f : f + 1).convert_to<std::int64_t>();
}

inline std::int64_t floorTimes(const Rational& alpha, std::int64_t n) { return floorOf(alpha * n).convert_to<std::int64_t>(); }

inline void requireAlpha(const Rational& alpha) {
  require(alpha >= 0 && alpha <= 1, "alpha must lie in [0, 1]");
}

/// Re-evaluates a certificate with solBrute and records the outcome.
inline void verifyCount(ExtremalResult& r, const LinearFormSystem& s) {
  auto sol = solBrute(r.certificate, s);
  Rational v = sol.exact();
  r.verification["solBrute"] = toString(v);
  r.verification["size"] = r.certificate.size();
  if (r.exactValue) {
    ensure(v == *r.exactValue, "certificate does not reproduce the claimed value");
  } else {
    ensure(std::abs(toDouble(v) - r.value) <= 1e-9, "heuristic certificate does not reproduce its value");
  }
  r.verification["reproduced"] = true;
}

/// Include/exclude branch and bound over subsets of Z/N. `minimize` picks the
/// objective; sizes range over [lo, hi]. Sol is monotone under inclusion for
/// indicator sets, so the chosen set bounds the minimum from below and the chosen
/// plus undecided elements bound the maximum from above.
class SubsetSearch {
 public:
  SubsetSearch(const ConfigurationIndex& idx, bool minimize, std::int64_t lo, std::int64_t hi, bool anchorZero,
               const SearchBudget& budget)
      : idx_(idx), minimize_(minimize), lo_(lo), hi_(hi), anchor_(anchorZero), budget_(budget), deadline_(budget),
        chosen_(idx), possible_(idx, true) {}

  std::pair<std::uint64_t, SubsetOfZN> run() {
    if (anchor_ && lo_ >= 1) {
      // Translation invariance: some optimal set contains 0.
      chosen_.add(0);
    }
    dfs(anchor_ && lo_ >= 1 ? 1 : 0);
    ensure(best_.has_value(), "subset search found no feasible set");
    return {*best_, bestSet_};
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  void offer(const ConfigurationTracker& t) {
    const std::uint64_t c = t.count();
    if (!best_ || (minimize_ ? c < *best_ : c > *best_)) {
      best_ = c;
      bestSet_ = t.set();
    }
  }

  void dfs(std::int64_t next) {
    if (++nodes_ > budget_.maxNodes) throw BudgetExceeded("exact search exceeded " + std::to_string(budget_.maxNodes) + " nodes");
    if ((nodes_ & 0xFFF) == 0 && deadline_.expired()) throw BudgetExceeded("exact search exceeded its time limit");
    const auto size = static_cast<std::int64_t>(chosen_.size());
    const auto room = static_cast<std::int64_t>(possible_.size());
    if (room < lo_) return;
    if (minimize_) {
      if (best_ && chosen_.count() >= *best_) return;
      if (size >= lo_) {
        // Supersets cannot do better.
        offer(chosen_);
        return;
      }
    } else {
      if (best_ && possible_.count() <= *best_) return;
      if (room <= hi_) {
        offer(possible_);
        return;
      }
      if (size == hi_) {
        offer(chosen_);
        return;
      }
    }
    if (next >= idx_.modulus()) return;
    chosen_.add(next);
    dfs(next + 1);
    chosen_.remove(next);
    possible_.remove(next);
    dfs(next + 1);
    possible_.add(next);
  }

  const ConfigurationIndex& idx_;
  bool minimize_;
  std::int64_t lo_, hi_;
  bool anchor_;
  SearchBudget budget_;
  Deadline deadline_;
  ConfigurationTracker chosen_, possible_;
  std::optional<std::uint64_t> best_;
  SubsetOfZN bestSet_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// m(alpha, N) = min over |A| >= alpha N of Sol(1_A), exactly.
inline ExtremalResult minSolExact(const LinearFormSystem& s, const Rational& alpha, std::int64_t n,
                                  const SearchBudget& budget = {}) {
  detail::requireAlpha(alpha);
  detail::require(n >= 1, "modulus must be positive");
  const std::int64_t k = detail::ceilTimes(alpha, n);
  ConfigurationIndex idx(s, n, budget.maxConfigurationPoints);
  detail::SubsetSearch search(idx, true, k, n, isInvariant(s), budget);
  auto [count, set] = search.run();
  ExtremalResult r;
  r.exactValue = Rational(Integer(count), Integer(idx.total()));
  r.value = toDouble(*r.exactValue);
  r.certificate = set;
  r.method = Method::exact;
  r.boundKind = BoundKind::equals;
  r.verification["nodes"] = search.nodes();
  r.verification["sizesScanned"] = {k, n};
  detail::verifyCount(r, s);
  return r;
}

/// M(alpha, N) = max over |A| <= alpha N of Sol(1_A), exactly.
inline ExtremalResult maxSolExact(const LinearFormSystem& s, const Rational& alpha, std::int64_t n,
                                  const SearchBudget& budget = {}) {
  detail::requireAlpha(alpha);
  detail::require(n >= 1, "modulus must be positive");
  const std::int64_t k = detail::floorTimes(alpha, n);
  ConfigurationIndex idx(s, n, budget.maxConfigurationPoints);
  detail::SubsetSearch search(idx, false, 0, k, isInvariant(s) && k >= 1, budget);
  auto [count, set] = search.run();
  ExtremalResult r;
  r.exactValue = Rational(Integer(count), Integer(idx.total()));
  r.value = toDouble(*r.exactValue);
  r.certificate = set;
  r.method = Method::exact;
  r.boundKind = BoundKind::equals;
  r.verification["nodes"] = search.nodes();
  r.verification["sizesScanned"] = {0, k};
  detail::verifyCount(r, s);
  return r;
}

struct AnnealingOptions {
  std::uint64_t iterations = 200'000;
  /// Restart epoch length; each epoch cools geometrically from its start temperature.
  std::uint64_t epochLength = 20'000;
  double coolingRatio = 1e-3;  // final temperature / initial temperature within an epoch
};

namespace detail {

/// Swap-neighbourhood annealing over sets of fixed size k. Every epoch restarts
/// from the best set so far with the same schedule, so the best value after
/// m epochs never depends on how many epochs follow.
inline std::pair<std::uint64_t, SubsetOfZN> anneal(const ConfigurationIndex& idx, std::int64_t k, bool minimize,
                                                  std::uint64_t seed, const AnnealingOptions& opt,
                                                  const SearchBudget& budget, std::uint64_t& epochsRun) {
  const std::int64_t n = idx.modulus();
  Rng rng(seed);
  std::vector<std::int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::int64_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);

  ConfigurationTracker t(idx);
  for (std::int64_t i = 0; i < k; ++i) t.add(perm[i]);
  std::vector<std::int64_t> in(perm.begin(), perm.begin() + k), out(perm.begin() + k, perm.end());
  std::uint64_t best = t.count();
  SubsetOfZN bestSet = t.set();
  epochsRun = 0;
  if (k == 0 || k == n) return {best, bestSet};

  auto signedDelta = [&](std::int64_t before, std::int64_t after) {
    return minimize ? static_cast<double>(after - before) : static_cast<double>(before - after);
  };
  // Temperature scale from the mean |delta| of a few trial swaps.
  double scale = 0;
  for (int probe = 0; probe < 32; ++probe) {
    auto i = rng.below(in.size()), j = rng.below(out.size());
    const auto before = static_cast<std::int64_t>(t.count());
    t.remove(in[i]);
    t.add(out[j]);
    scale += std::abs(static_cast<double>(static_cast<std::int64_t>(t.count()) - before));
    t.remove(out[j]);
    t.add(in[i]);
  }
  const double t0 = std::max(scale / 32.0, 1.0);

  Deadline deadline(budget);
  const std::uint64_t epochs = std::max<std::uint64_t>(1, opt.iterations / std::max<std::uint64_t>(1, opt.epochLength));
  const double decay = std::pow(opt.coolingRatio, 1.0 / static_cast<double>(opt.epochLength));
  for (std::uint64_t e = 0; e < epochs; ++e) {
    if (e > 0 && deadline.expired()) break;
    double temp = t0;
    for (std::uint64_t it = 0; it < opt.epochLength; ++it, temp *= decay) {
      auto i = rng.below(in.size()), j = rng.below(out.size());
      const auto before = static_cast<std::int64_t>(t.count());
      t.remove(in[i]);
      t.add(out[j]);
      const double d = signedDelta(before, static_cast<std::int64_t>(t.count()));
      const double u = rng.unit();
      if (d <= 0 || u < std::exp(-d / temp)) {
        std::swap(in[i], out[j]);
        if (minimize ? t.count() < best : t.count() > best) {
          best = t.count();
          bestSet = t.set();
        }
      } else {
        t.remove(out[j]);
        t.add(in[i]);
      }
    }
    ++epochsRun;
    // Restart the next epoch from the best set.
    for (auto x : in) t.remove(x);
    in = bestSet.members();
    out.clear();
    for (std::int64_t x = 0; x < n; ++x)
      if (!bestSet.contains(x)) out.push_back(x);
    for (auto x : in) t.add(x);
  }
  return {best, bestSet};
}

}  // namespace detail

/// Certificate-backed upper bound on m(alpha, N) by annealing over sets of size ceil(alpha N).
inline ExtremalResult minSolHeuristic(const LinearFormSystem& s, const Rational& alpha, std::int64_t n,
                                      std::uint64_t seed, const AnnealingOptions& opt = {},
                                      const SearchBudget& budget = {}) {
  detail::requireAlpha(alpha);
  const std::int64_t k = detail::ceilTimes(alpha, n);
  ConfigurationIndex idx(s, n, budget.maxConfigurationPoints);
  std::uint64_t epochs = 0;
  auto [count, set] = detail::anneal(idx, k, true, seed, opt, budget, epochs);
  ExtremalResult r;
  r.value = static_cast<double>(count) / static_cast<double>(idx.total());
  r.certificate = set;
  r.method = Method::heuristic;
  r.boundKind = BoundKind::upperBound;
  r.verification["epochs"] = epochs;
  r.verification["seed"] = seed;
  detail::verifyCount(r, s);
  return r;
}

/// Certificate-backed lower bound on M(alpha, N).
inline ExtremalResult maxSolHeuristic(const LinearFormSystem& s, const Rational& alpha, std::int64_t n,
                                      std::uint64_t seed, const AnnealingOptions& opt = {},
                                      const SearchBudget& budget = {}) {
  detail::requireAlpha(alpha);
  const std::int64_t k = detail::floorTimes(alpha, n);
  ConfigurationIndex idx(s, n, budget.maxConfigurationPoints);
  std::uint64_t epochs = 0;
  auto [count, set] = detail::anneal(idx, k, false, seed, opt, budget, epochs);
  ExtremalResult r;
  r.value = static_cast<double>(count) / static_cast<double>(idx.total());
  r.certificate = set;
  r.method = Method::heuristic;
  r.boundKind = BoundKind::lowerBound;
  r.verification["epochs"] = epochs;
  r.verification["seed"] = seed;
  detail::verifyCount(r, s);
  return r;
}

enum class SolveMode { exact, heuristic };

inline ExtremalResult maxSol(const LinearFormSystem& s, const Rational& alpha, std::int64_t n, SolveMode mode,
                             std::uint64_t seed = 0, const SearchBudget& budget = {}) {
  return mode == SolveMode::exact ? maxSolExact(s, alpha, n, budget) : maxSolHeuristic(s, alpha, n, seed, {}, budget);
}

// ---- free sets -----------------------------------------------------------------------

/// Forbidden coordinate sets for a family: A is free iff it contains none of them.
class ForbiddenHypergraph {
 public:
  ForbiddenHypergraph(const std::vector<LinearFormSystem>& family, std::int64_t n, DegeneracyPolicy policy,
                      std::uint64_t maxPoints = 20'000'000)
      : n_(n), incidence_(n), blocked_(n, 0) {
    std::vector<std::vector<std::int64_t>> edges;
    for (const auto& s : family) {
      ConfigurationIndex idx(s, n, maxPoints);
      for (auto& g : idx.groups()) {
        if (policy == DegeneracyPolicy::excludeConstant && g.size() == 1 && s.formCount() > 1) continue;
        edges.push_back(std::move(g));
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& e : edges) {
      if (e.size() == 1) {
        blocked_[e[0]] = 1;
        continue;
      }
      const auto id = static_cast<std::uint32_t>(edges_.size());
      edges_.push_back(e);
      for (auto x : e) incidence_[x].push_back(id);
    }
  }

  std::int64_t modulus() const { return n_; }
  bool blocked(std::int64_t x) const { return blocked_[x] != 0; }
  const std::vector<std::vector<std::int64_t>>& edges() const { return edges_; }
  const std::vector<std::uint32_t>& incidence(std::int64_t x) const { return incidence_[x]; }

 private:
  std::int64_t n_;
  std::vector<std::vector<std::int64_t>> edges_;
  std::vector<std::vector<std::uint32_t>> incidence_;
  std::vector<std::uint8_t> blocked_;
};

namespace detail {

/// Maximum independent set of one connected component, by branch and bound.
class IndependentSetSearch {
 public:
  IndependentSetSearch(const ForbiddenHypergraph& h, std::vector<std::int64_t> order, const SearchBudget& budget,
                       std::uint64_t& nodes, const Deadline& deadline)
      : h_(h), order_(std::move(order)), budget_(budget), nodes_(nodes), deadline_(deadline),
        state_(h.modulus(), 0), missing_(h.edges().size()) {
    for (std::size_t e = 0; e < h.edges().size(); ++e) missing_[e] = static_cast<std::uint32_t>(h.edges()[e].size());
    position_.assign(h.modulus(), -1);
    for (std::size_t i = 0; i < order_.size(); ++i) position_[order_[i]] = static_cast<std::int64_t>(i);
  }

  std::vector<std::int64_t> run() {
    dfs(0);
    return best_;
  }

 private:
  enum : std::uint8_t { undecided = 0, in = 1, out = 2 };

  bool insertable(std::int64_t x) const {
    for (auto e : h_.incidence(x))
      if (missing_[e] == 1) return false;
    return true;
  }

  void setIn(std::int64_t x) {
    state_[x] = in;
    current_.push_back(x);
    for (auto e : h_.incidence(x)) --missing_[e];
  }
  void unsetIn(std::int64_t x) {
    state_[x] = undecided;
    current_.pop_back();
    for (auto e : h_.incidence(x)) ++missing_[e];
  }

  /// |current| + a greedy pairing bound on the remaining insertable vertices:
  /// two remaining vertices forming a 2-edge contribute at most one.
  std::size_t upperBound(std::size_t from) const {
    std::vector<std::int64_t> cand;
    for (std::size_t i = from; i < order_.size(); ++i)
      if (insertable(order_[i])) cand.push_back(order_[i]);
    std::vector<std::uint8_t> used(cand.size(), 0);
    std::size_t bound = 0;
    std::vector<std::int64_t> slot(h_.modulus(), -1);
    for (std::size_t i = 0; i < cand.size(); ++i) slot[cand[i]] = static_cast<std::int64_t>(i);
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (used[i]) continue;
      used[i] = 1;
      ++bound;
      for (auto e : h_.incidence(cand[i])) {
        const auto& edge = h_.edges()[e];
        if (edge.size() != 2) continue;
        const std::int64_t other = edge[0] == cand[i] ? edge[1] : edge[0];
        const std::int64_t j = slot[other];
        if (j >= 0 && !used[j]) {
          used[j] = 1;
          break;
        }
      }
    }
    return current_.size() + bound;
  }

  void dfs(std::size_t i) {
    if (++nodes_ > budget_.maxNodes) throw BudgetExceeded("free-set search exceeded " + std::to_string(budget_.maxNodes) + " nodes");
    if ((nodes_ & 0xFFF) == 0 && deadline_.expired()) throw BudgetExceeded("free-set search exceeded its time limit");
    if (current_.size() > best_.size()) best_ = current_;
    if (i >= order_.size()) return;
    if (upperBound(i) <= best_.size()) return;
    const std::int64_t x = order_[i];
    if (insertable(x)) {
      setIn(x);
      dfs(i + 1);
      unsetIn(x);
    }
    dfs(i + 1);
  }

  const ForbiddenHypergraph& h_;
  std::vector<std::int64_t> order_;
  SearchBudget budget_;
  std::uint64_t& nodes_;
  const Deadline& deadline_;
  std::vector<std::uint8_t> state_;
  std::vector<std::uint32_t> missing_;
  std::vector<std::int64_t> position_;
  std::vector<std::int64_t> current_, best_;
};

inline void verifyFree(ExtremalResult& r, const std::vector<LinearFormSystem>& family, DegeneracyPolicy policy) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& s : family) {
    if (policy == DegeneracyPolicy::strict) {
      auto count = *solBrute(r.certificate, s).count;
      ensure(count == 0, "certificate is not free for " + s.name());
      per.push_back({{"system", s.toJson()}, {"solBrute", "0"}});
    } else {
      // Only non-constant configurations are forbidden.
      std::uint64_t bad = 0;
      ConfigurationIndex idx(s, r.certificate.modulus());
      const auto groups = idx.groups();
      for (std::size_t g = 0; g < groups.size(); ++g)
        if (groups[g].size() > 1 || s.formCount() == 1) {
          bool all = true;
          for (auto x : groups[g]) all = all && r.certificate.contains(x);
          if (all) bad += idx.weight(g);
        }
      ensure(bad == 0, "certificate contains a non-constant configuration of " + s.name());
      per.push_back({{"system", s.toJson()}, {"nonConstantConfigurations", 0}});
    }
  }
  r.verification["free"] = per;
  r.verification["policy"] = policy == DegeneracyPolicy::strict ? "strict" : "excludeConstant";
}

}  // namespace detail

/// d_F(Z/N) exactly, by branch and bound per connected component of the forbidden hypergraph.
inline ExtremalResult maxFreeDensityExact(const std::vector<LinearFormSystem>& family, std::int64_t n,
                                          DegeneracyPolicy policy = DegeneracyPolicy::strict,
                                          const SearchBudget& budget = {}) {
  detail::require(n >= 1, "modulus must be positive");
  ForbiddenHypergraph h(family, n, policy, budget.maxConfigurationPoints);
  detail::Deadline deadline(budget);
  std::uint64_t nodes = 0;
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::int64_t> chosen;
  std::size_t components = 0;
  for (std::int64_t start = 0; start < n; ++start) {
    if (seen[start] || h.blocked(start)) continue;
    // Breadth-first order keeps neighbours close, which helps the pairing bound.
    std::vector<std::int64_t> order{start};
    seen[start] = 1;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (auto e : h.incidence(order[i]))
        for (auto y : h.edges()[e])
          if (!seen[y] && !h.blocked(y)) {
            seen[y] = 1;
            order.push_back(y);
          }
    ++components;
    detail::IndependentSetSearch search(h, std::move(order), budget, nodes, deadline);
    auto best = search.run();
    chosen.insert(chosen.end(), best.begin(), best.end());
  }
  ExtremalResult r;
  r.certificate = SubsetOfZN(n, chosen);
  r.exactValue = r.certificate.density();
  r.value = toDouble(*r.exactValue);
  r.method = Method::exact;
  r.boundKind = BoundKind::equals;
  r.verification["nodes"] = nodes;
  r.verification["components"] = components;
  detail::verifyFree(r, family, policy);
  return r;
}

/// Lower bound on d_F(Z/N) by iterated greedy with random kicks.
inline ExtremalResult maxFreeDensityHeuristic(const std::vector<LinearFormSystem>& family, std::int64_t n,
                                              std::uint64_t seed, std::uint64_t iterations = 2'000,
                                              DegeneracyPolicy policy = DegeneracyPolicy::strict,
                                              const SearchBudget& budget = {}) {
  detail::require(n >= 1, "modulus must be positive");
  ForbiddenHypergraph h(family, n, policy, budget.maxConfigurationPoints);
  detail::Deadline deadline(budget);
  Rng rng(seed);
  std::vector<std::uint32_t> missing(h.edges().size());
  for (std::size_t e = 0; e < missing.size(); ++e) missing[e] = static_cast<std::uint32_t>(h.edges()[e].size());
  std::vector<std::uint8_t> in(n, 0);
  auto insertable = [&](std::int64_t x) {
    if (in[x] || h.blocked(x)) return false;
    for (auto e : h.incidence(x))
      if (missing[e] == 1) return false;
    return true;
  };
  auto add = [&](std::int64_t x) {
    in[x] = 1;
    for (auto e : h.incidence(x)) --missing[e];
  };
  auto drop = [&](std::int64_t x) {
    in[x] = 0;
    for (auto e : h.incidence(x)) ++missing[e];
  };
  std::vector<std::int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  auto fill = [&]() {
    for (std::int64_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
    for (auto x : perm)
      if (insertable(x)) add(x);
  };
  auto size = [&]() { return static_cast<std::size_t>(std::count(in.begin(), in.end(), 1)); };
  fill();
  std::vector<std::uint8_t> best = in;
  std::size_t bestSize = size();
  std::uint64_t done = 0;
  for (; done < iterations; ++done) {
    if ((done & 63) == 0 && done > 0 && deadline.expired()) break;
    // Kick: drop a few members, then refill greedily in random order.
    const std::uint64_t kicks = 1 + rng.below(3);
    for (std::uint64_t j = 0; j < kicks; ++j) {
      std::vector<std::int64_t> members;
      for (std::int64_t x = 0; x < n; ++x)
        if (in[x]) members.push_back(x);
      if (members.empty()) break;
      drop(members[rng.below(members.size())]);
    }
    fill();
    const std::size_t sz = size();
    if (sz >= bestSize) {
      if (sz > bestSize) bestSize = sz;
      best = in;
    } else {
      for (std::int64_t x = 0; x < n; ++x)
        if (in[x]) drop(x);
      for (std::int64_t x = 0; x < n; ++x)
        if (best[x]) add(x);
    }
  }
  ExtremalResult r;
  r.certificate = SubsetOfZN::fromMask(best);
  r.exactValue = r.certificate.density();
  r.value = toDouble(*r.exactValue);
  r.method = Method::heuristic;
  r.boundKind = BoundKind::lowerBound;
  r.verification["iterations"] = done;
  r.verification["seed"] = seed;
  detail::verifyFree(r, family, policy);
  return r;
}

// ---- the dependent pair (n1, k n1) ----------------------------------------------------

struct DependentPairResult {
  std::int64_t k = 0;
  std::int64_t n = 0;
  std::int64_t order = 0;  // multiplicative order of k mod N
  Rational d;              // maximal density of a set with A ∩ k^{-1}A empty
  SubsetOfZN freeCertificate;
  std::optional<Rational> alpha;
  std::optional<Rational> m;  // min Sol over |A| >= alpha N
  std::optional<SubsetOfZN> minCertificate;

  nlohmann::json toJson() const {
    nlohmann::json j{{"k", k}, {"N", n}, {"order", order}, {"d", toString(d)}, {"dDecimal", toDouble(d)},
                     {"freeCertificate", freeCertificate.members()}};
    if (m) {
      j["alpha"] = toString(*alpha);
      j["m"] = toString(*m);
      j["mDecimal"] = toDouble(*m);
      j["minCertificate"] = minCertificate->members();
    }
    return j;
  }
};

/// Exact d and m(alpha) for (n1, k n1) over Z/p via the cycles of x -> kx.
inline DependentPairResult dependentPairExact(std::int64_t k, std::int64_t p, std::optional<Rational> alpha = std::nullopt) {
  detail::require(p >= 2 && isPrime(static_cast<std::uint64_t>(p)), "dependentPairExact needs a prime modulus");
  detail::require(k <= -2 || k >= 2, "dependentPairExact needs |k| >= 2");
  detail::require(mod(k, p) != 0, "k must be invertible mod N");
  DependentPairResult out;
  out.k = k;
  out.n = p;
  const std::int64_t km = mod(k, p);
  const auto ord = static_cast<std::int64_t>(multiplicativeOrder(km, static_cast<std::uint64_t>(p)));
  out.order = ord;
  const std::int64_t cycles = (p - 1) / ord;

  // Cycles of units under x -> kx, each listed along the orbit.
  std::vector<std::vector<std::int64_t>> orbit;
  std::vector<std::uint8_t> seen(p, 0);
  for (std::int64_t x = 1; x < p; ++x) {
    if (seen[x]) continue;
    std::vector<std::int64_t> c;
    for (std::int64_t y = x; !seen[y]; y = static_cast<std::int64_t>(mulMod(y, km, p))) {
      seen[y] = 1;
      c.push_back(y);
    }
    orbit.push_back(std::move(c));
  }
  detail::ensure(static_cast<std::int64_t>(orbit.size()) == cycles, "cycle count mismatch");

  // Free set: every other orbit position, floor(n/2) per cycle; 0 is excluded since (0, 0) is a solution.
  std::vector<std::int64_t> freeMembers;
  for (const auto& c : orbit)
    for (std::int64_t j = 0; j < ord / 2; ++j) freeMembers.push_back(c[2 * j]);
  out.freeCertificate = SubsetOfZN(p, freeMembers);
  out.d = Rational(cycles * (ord / 2), p);
  detail::ensure(out.freeCertificate.density() == out.d, "free certificate has the wrong size");
  detail::ensure(*solBrute(out.freeCertificate, systems::dependentPair(k)).count == 0, "free certificate is not free");

  if (alpha) {
    detail::requireAlpha(*alpha);
    out.alpha = alpha;
    const std::int64_t target = detail::ceilTimes(*alpha, p);
    // Choosing j of an n-cycle costs at least max(0, 2j - n) pairs (x, kx) inside A.
    // Node 0 is a fixed point and costs 1. DP over cycles: best[s] = min cost with s chosen.
    const std::int64_t inf = INT64_MAX / 4;
    std::vector<std::int64_t> best(p + 1, inf);
    best[0] = 0;
    std::vector<std::vector<std::int64_t>> choice(orbit.size() + 1, std::vector<std::int64_t>(p + 1, 0));
    std::int64_t reach = 0;
    for (std::size_t c = 0; c < orbit.size(); ++c) {
      std::vector<std::int64_t> next(p + 1, inf);
      for (std::int64_t s = 0; s <= reach; ++s) {
        if (best[s] >= inf) continue;
        for (std::int64_t j = 0; j <= ord; ++j) {
          const std::int64_t v = best[s] + std::max<std::int64_t>(0, 2 * j - ord);
          if (v < next[s + j]) {
            next[s + j] = v;
            choice[c][s + j] = j;
          }
        }
      }
      reach += ord;
      best.swap(next);
    }
    // Zero last.
    std::int64_t bestCost = inf, bestS = -1;
    bool useZero = false;
    for (std::int64_t s = target; s <= p; ++s) {
      if (s <= p - 1 && best[s] < bestCost) {
        bestCost = best[s];
        bestS = s;
        useZero = false;
      }
      if (s >= 1 && best[s - 1] + 1 < bestCost) {
        bestCost = best[s - 1] + 1;
        bestS = s - 1;
        useZero = true;
      }
    }
    detail::ensure(bestS >= 0, "dependent-pair DP found no feasible size");
    // Reconstruct: in a cycle take even positions first, then odd ones. Each even
    // position past floor(n/2) costs 1 (odd n, wrap-around), each odd one costs 2.
    std::vector<std::int64_t> members;
    if (useZero) members.push_back(0);
    std::int64_t s = bestS;
    for (std::size_t c = orbit.size(); c-- > 0;) {
      const std::int64_t j = choice[c][s];
      std::vector<std::int64_t> pos;
      for (std::int64_t q = 0; q < ord; q += 2) pos.push_back(q);
      for (std::int64_t q = 1; q < ord; q += 2) pos.push_back(q);
      for (std::int64_t q = 0; q < j; ++q) members.push_back(orbit[c][pos[q]]);
      s -= j;
    }
    SubsetOfZN cert(p, members);
    auto sol = solBrute(cert, systems::dependentPair(k));
    out.m = Rational(bestCost, p);
    detail::ensure(static_cast<std::int64_t>(cert.size()) >= target, "min certificate too small");
    detail::ensure(sol.exact() == *out.m, "min certificate does not reproduce the DP value");
    out.minCertificate = cert;
  }
  return out;
}

// ---- explicit constructions ------------------------------------------------------------

struct WeylSetParameters {
  Rational delta;
  std::int64_t center = 0;
  Rational lo, hi;  // the interval I
};

inline WeylSetParameters weylSetParameters(std::int64_t p, std::int64_t k, int d) {
  detail::require(k >= 2, "weylSet needs k >= 2");
  detail::require(d >= 2, "weylSet needs d > 1");
  Integer kd = 1;
  for (int i = 0; i < d; ++i) kd *= k;
  WeylSetParameters w;
  w.delta = Rational(1, 4 * kd * kd);
  w.center = (Integer(p) / kd).convert_to<std::int64_t>();
  w.lo = Rational(w.center) - w.delta * p;
  w.hi = Rational(w.center) + w.delta * p;
  return w;
}

/// A = {x : x^d mod p in I}, I = [floor(p/k^d) - delta p, floor(p/k^d) + delta p], delta = 1/(4k^{2d}).
inline SubsetOfZN weylSet(std::int64_t p, std::int64_t k, int d) {
  detail::require(p >= 2 && isPrime(static_cast<std::uint64_t>(p)), "weylSet needs a prime p");
  auto w = weylSetParameters(p, k, d);
  detail::require(w.lo > 0 && w.hi < p, "weylSet: interval I is not inside (0, p); p too small");
  const Integer lo = isIntegral(w.lo) ? floorOf(w.lo) : floorOf(w.lo) + 1, hi = floorOf(w.hi);
  detail::require(lo <= hi, "weylSet: interval I contains no integer; p too small");
  std::vector<std::int64_t> members;
  for (std::int64_t x = 0; x < p; ++x) {
    const auto y = static_cast<std::int64_t>(powMod(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(d),
                                                    static_cast<std::uint64_t>(p)));
    if (y >= lo && y <= hi) members.push_back(x);
  }
  SubsetOfZN a(p, members);
  detail::ensure(*solBrute(a, systems::dependentPair(k)).count == 0, "weylSet: constructed set is not free");
  return a;
}

/// A with A ∩ kA empty of density floor(n/2)/n * (p-1)/p, n = ord_p(k); k = -1 gives [1, (p-1)/2].
inline SubsetOfZN multiplicativeFreeSet(std::int64_t k, std::int64_t p) {
  detail::require(p >= 3 && isPrime(static_cast<std::uint64_t>(p)), "multiplicativeFreeSet needs an odd prime");
  const std::int64_t km = mod(k, p);
  detail::require(km != 0 && km != 1, "multiplicativeFreeSet needs k not 0 or 1 mod p");
  std::vector<std::int64_t> members;
  if (km == p - 1) {
    for (std::int64_t x = 1; x <= (p - 1) / 2; ++x) members.push_back(x);
  } else {
    const auto n = static_cast<std::int64_t>(multiplicativeOrder(km, static_cast<std::uint64_t>(p)));
    std::vector<std::int64_t> e;
    std::int64_t kk = static_cast<std::int64_t>(mulMod(km, km, p)), v = 1;
    for (std::int64_t j = 0; j < n / 2; ++j) {
      e.push_back(v);
      v = static_cast<std::int64_t>(mulMod(v, kk, p));
    }
    std::vector<std::uint8_t> covered(p, 0);
    for (std::int64_t y = 1; y < p; ++y) {
      if (covered[y]) continue;
      for (std::int64_t h = y, j = 0; j < n; ++j, h = static_cast<std::int64_t>(mulMod(h, km, p))) covered[h] = 1;
      for (auto x : e) members.push_back(static_cast<std::int64_t>(mulMod(y, x, p)));
    }
    detail::ensure(Rational(static_cast<std::int64_t>(members.size()), p) == Rational((p - 1) / n * (n / 2), p),
                   "multiplicativeFreeSet: wrong density");
  }
  SubsetOfZN a(p, members);
  detail::ensure(*solBrute(a, systems::dependentPair(k)).count == 0, "multiplicativeFreeSet: set is not free");
  return a;
}

struct IntervalFreeResult {
  std::optional<SubsetOfZN> set;
  std::int64_t lo = 0, hi = 0;  // [lo, hi)
  std::int64_t denominator = 0;
  std::int64_t a = 0, b = 0;  // endpoints a N / D0, b N / D0
  std::size_t candidatesTested = 0;

  nlohmann::json toJson() const {
    nlohmann::json j{{"found", set.has_value()}, {"candidatesTested", candidatesTested}};
    if (set) {
      j["interval"] = {lo, hi};
      j["rationalEndpoints"] = {std::to_string(a) + "/" + std::to_string(denominator),
                                std::to_string(b) + "/" + std::to_string(denominator)};
      j["density"] = toString(set->density());
    }
    return j;
  }
};

/// Densest interval [ceil(aN/D0), ceil(bN/D0)) with D0 <= maxDenominator whose indicator is free (Sol = 0 exactly).
inline IntervalFreeResult intervalFreeSet(const LinearFormSystem& s, std::int64_t n, std::int64_t maxDenominator = 64) {
  detail::require(!isInvariant(s), "intervalFreeSet needs a non-invariant system");
  detail::require(n >= 2, "modulus must be at least 2");
  struct Cand {
    std::int64_t lo, hi, den, a, b;
  };
  std::vector<Cand> cands;
  auto ceilDiv = [](std::int64_t x, std::int64_t y) { return (x + y - 1) / y; };
  std::set<std::pair<std::int64_t, std::int64_t>> have;
  for (std::int64_t den = 1; den <= maxDenominator; ++den)
    for (std::int64_t a = 0; a < den; ++a)
      for (std::int64_t b = a + 1; b <= den; ++b) {
        const std::int64_t lo = ceilDiv(a * n, den), hi = ceilDiv(b * n, den);
        if (lo >= hi || !have.insert({lo, hi}).second) continue;
        cands.push_back({lo, hi, den, a, b});
      }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& x, const Cand& y) { return x.hi - x.lo > y.hi - y.lo; });
  IntervalFreeResult out;
  ConfigurationIndex idx(s, n);
  for (const auto& c : cands) {
    ++out.candidatesTested;
    ConfigurationTracker t(idx);
    for (std::int64_t x = c.lo; x < c.hi; ++x) t.add(x);
    if (t.count() != 0) continue;
    std::vector<std::int64_t> m;
    for (std::int64_t x = c.lo; x < c.hi; ++x) m.push_back(x);
    SubsetOfZN a(n, m);
    // Independent check through the brute-force counter.
    detail::ensure(*solBrute(a, s).count == 0, "interval passed the index but fails solBrute");
    out.set = a;
    out.lo = c.lo;
    out.hi = c.hi;
    out.denominator = c.den;
    out.a = c.a;
    out.b = c.b;
    break;
  }
  return out;
}

/// Wraps a freeness construction as an ExtremalResult (boundKind lowerBound on d_F).
inline ExtremalResult constructionResult(const SubsetOfZN& a, const std::vector<LinearFormSystem>& family,
                                         nlohmann::json extra = nlohmann::json::object()) {
  ExtremalResult r;
  r.certificate = a;
  r.exactValue = a.density();
  r.value = toDouble(*r.exactValue);
  r.method = Method::construction;
  r.boundKind = BoundKind::lowerBound;
  r.verification = std::move(extra);
  detail::verifyFree(r, family, DegeneracyPolicy::strict);
  return r;
}

}  // namespace addcomb
