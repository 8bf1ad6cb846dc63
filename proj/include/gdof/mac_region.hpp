#pragma once

// GDoF achievability in a layered multiple access channel: M1 single-antenna
// streams at strength 1 and M2 at strength alpha, each backed off by P^-eta_k,
// an N-antenna receiver, and noise floors P^alpha_n. A tuple d' is achievable
// if for every nonempty subset S of streams with |S| = k
//
//   sum_{i in S} d'_i <= (largest min(k,N) gammas in S) - (smallest min(k,N) alpha_n)
//
// with gamma_k = (1 - eta_k)^+ for the first M1 streams, (alpha - eta_k)^+ after.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "gdof/gdof_core.hpp"

namespace gdof::mac {

/// Slack under which a constraint still counts as met (boundary is achievable).
inline constexpr double kTolerance = 1e-9;

struct MacProblem {
  int M1 = 0;
  int M2 = 0;
  double alpha = 1.0;
  std::vector<double> eta;           // M1 + M2 power back-off exponents
  std::vector<double> noise_levels;  // N noise-floor exponents alpha_n
  int N = 1;

  [[nodiscard]] int streams() const noexcept { return M1 + M2; }

  void validate() const {
    if (M1 < 0 || M2 < 0 || M1 + M2 < 1) throw std::invalid_argument("need at least one stream");
    if (N < 1) throw std::invalid_argument("N must be at least 1");
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
    if (eta.size() != static_cast<std::size_t>(M1 + M2)) throw std::invalid_argument("need one eta per stream");
    if (noise_levels.size() != static_cast<std::size_t>(N))
      throw std::invalid_argument("need one noise level per receive antenna");
    for (double e : eta)
      if (!(e >= 0.0)) throw std::invalid_argument("eta must be nonnegative");
    for (double a : noise_levels)
      if (!(a >= 0.0)) throw std::invalid_argument("noise levels must be nonnegative");
  }

  /// The constraint family is only claimed for N < M1 + M2; larger N is
  /// still evaluated with min(k, N) = k.
  [[nodiscard]] bool outside_stated_regime() const noexcept { return N >= M1 + M2; }
};

struct GdofTuple {
  std::vector<double> d;

  void validate() const {
    for (double x : d)
      if (!(x >= 0.0)) throw std::invalid_argument("GDoF tuple entries must be nonnegative");
  }
};

/// Received power level of each stream.
[[nodiscard]] inline std::vector<double> gamma_levels(const MacProblem& p) {
  p.validate();
  std::vector<double> g(p.eta.size());
  for (int k = 0; k < p.streams(); ++k)
    g[k] = positive_part((k < p.M1 ? 1.0 : p.alpha) - p.eta[k]);
  return g;
}

/// Worst subset of one cardinality.
struct SizeConstraint {
  int size = 0;                     // k = |S|
  double margin = 0.0;              // min over |S| = k of RHS - LHS
  std::vector<std::size_t> worst;   // a subset attaining the margin
  [[nodiscard]] bool violated() const noexcept { return margin < -kTolerance; }
  [[nodiscard]] bool tight() const noexcept { return std::abs(margin) <= kTolerance; }
};

struct MacVerdict {
  bool achievable = true;
  bool outside_stated_regime = false;
  std::vector<SizeConstraint> constraints;  // one per k = 1..streams

  /// Sizes whose constraint is tight or violated.
  [[nodiscard]] std::vector<SizeConstraint> binding() const {
    std::vector<SizeConstraint> out;
    for (const auto& c : constraints)
      if (c.tight() || c.violated()) out.push_back(c);
    return out;
  }
};

namespace detail {

inline void check_dimensions(std::span<const double> gamma, std::span<const double> noise, int N,
                             std::span<const double> d) {
  if (gamma.empty()) throw std::invalid_argument("need at least one stream");
  if (d.size() != gamma.size()) throw std::invalid_argument("GDoF tuple length must match stream count");
  if (N < 1 || noise.size() != static_cast<std::size_t>(N))
    throw std::invalid_argument("need one noise level per receive antenna");
}

/// Sum of the `count` smallest noise levels.
inline double smallest_noise_sum(std::span<const double> noise, int count) {
  std::vector<double> sorted(noise.begin(), noise.end());
  std::sort(sorted.begin(), sorted.end());
  return std::accumulate(sorted.begin(), sorted.begin() + count, 0.0);
}

/// Indices of the `count` largest values of `score` among `candidates`.
inline std::vector<std::size_t> top_by(const std::vector<std::size_t>& candidates, std::size_t count,
                                       const std::function<double(std::size_t)>& score) {
  std::vector<std::size_t> c = candidates;
  std::stable_sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) { return score(a) > score(b); });
  c.resize(std::min(count, c.size()));
  return c;
}

}  // namespace detail

/// Sort-and-sweep evaluation of every subset-size constraint.
///
/// For |S| = k <= N all of S is counted in the gamma sum, so the worst S
/// takes the k largest d_i - gamma_i. For k > N, order streams by gamma
/// (descending, index as tiebreak) and fix q, the N-th stream of S in that
/// order: S is then q, the best N-1 values of d - gamma before q, and the
/// best k-N values of d after q.
[[nodiscard]] inline MacVerdict check_achievable(std::span<const double> gamma, std::span<const double> noise, int N,
                                                 std::span<const double> d) {
  detail::check_dimensions(gamma, noise, N, d);
  const std::size_t n = gamma.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gamma[a] > gamma[b]; });

  auto excess = [&](std::size_t i) { return d[i] - gamma[i]; };
  auto load = [&](std::size_t i) { return d[i]; };

  MacVerdict v;
  v.outside_stated_regime = static_cast<std::size_t>(N) >= n;
  for (std::size_t k = 1; k <= n; ++k) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_set;

    if (k <= static_cast<std::size_t>(N)) {
      best_set = detail::top_by(order, k, excess);
      best = 0.0;
      for (std::size_t i : best_set) best += excess(i);
    } else {
      const std::size_t covered = static_cast<std::size_t>(N);
      const std::size_t uncovered = k - covered;
      for (std::size_t q = covered - 1; q + uncovered < n; ++q) {
        const std::vector<std::size_t> before(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(q));
        const std::vector<std::size_t> after(order.begin() + static_cast<std::ptrdiff_t>(q) + 1, order.end());
        std::vector<std::size_t> set = detail::top_by(before, covered - 1, excess);
        const std::vector<std::size_t> tail = detail::top_by(after, uncovered, load);
        double value = excess(order[q]);
        for (std::size_t i : set) value += excess(i);
        for (std::size_t i : tail) value += load(i);
        if (value > best) {
          best = value;
          set.push_back(order[q]);
          set.insert(set.end(), tail.begin(), tail.end());
          best_set = std::move(set);
        }
      }
    }

    const int m = static_cast<int>(std::min(k, static_cast<std::size_t>(N)));
    SizeConstraint c;
    c.size = static_cast<int>(k);
    c.margin = -best - detail::smallest_noise_sum(noise, m);
    std::sort(best_set.begin(), best_set.end());
    c.worst = std::move(best_set);
    if (c.violated()) v.achievable = false;
    v.constraints.push_back(std::move(c));
  }
  return v;
}

[[nodiscard]] inline MacVerdict check_achievable(const MacProblem& p, const GdofTuple& t) {
  t.validate();
  const std::vector<double> g = gamma_levels(p);
  MacVerdict v = check_achievable(g, p.noise_levels, p.N, t.d);
  v.outside_stated_regime = p.outside_stated_regime();
  return v;
}

inline constexpr int kBruteForceMaxStreams = 20;

using gdof::BudgetExceeded;

/// Literal enumeration of S, of S2 inside S and of S1 inside [N].
[[nodiscard]] inline bool check_achievable_bruteforce(std::span<const double> gamma, std::span<const double> noise,
                                                      int N, std::span<const double> d) {
  detail::check_dimensions(gamma, noise, N, d);
  const int n = static_cast<int>(gamma.size());
  if (n > kBruteForceMaxStreams || N > kBruteForceMaxStreams)
    throw BudgetExceeded("brute-force MAC check is limited to 20 streams and 20 antennas");

  // min over S1 subset of [N], |S1| = m, of sum alpha_n
  std::vector<double> noise_min(static_cast<std::size_t>(N) + 1, std::numeric_limits<double>::infinity());
  for (std::uint32_t mask = 0; mask < (1U << N); ++mask) {
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      if (mask >> i & 1U) s += noise[i];
    auto& slot = noise_min[static_cast<std::size_t>(std::popcount(mask))];
    slot = std::min(slot, s);
  }

  for (std::uint32_t S = 1; S < (1U << n); ++S) {
    const int k = std::popcount(S);
    const int m = std::min(k, N);
    double lhs = 0.0;
    for (int i = 0; i < n; ++i)
      if (S >> i & 1U) lhs += d[i];

    double gamma_max = -std::numeric_limits<double>::infinity();
    for (std::uint32_t sub = S;; sub = (sub - 1) & S) {
      if (std::popcount(sub) == m) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          if (sub >> i & 1U) s += gamma[i];
        gamma_max = std::max(gamma_max, s);
      }
      if (sub == 0) break;
    }
    if (lhs > gamma_max - noise_min[static_cast<std::size_t>(m)] + kTolerance) return false;
  }
  return true;
}

[[nodiscard]] inline bool check_achievable_bruteforce(const MacProblem& p, const GdofTuple& t) {
  t.validate();
  if (p.streams() > kBruteForceMaxStreams) throw BudgetExceeded("brute-force MAC check is limited to 20 streams");
  const std::vector<double> g = gamma_levels(p);
  return check_achievable_bruteforce(g, p.noise_levels, p.N, t.d);
}

}  // namespace gdof::mac
