#pragma once

// Brute-force aligned-image-set experiments on scalar lemma instances.
//
// Each of the sum M_i input streams carries a symbol of the alphabet
// {0, ..., Pbar^eta - 1} at each of T channel uses (P = Pbar^2). Two scalar
// observations are formed per channel use,
//
//   U_s(t) = sum_{i,m} floor_to_zero(g^s_{im}(t) * (V_{im}(t))^eta_{eta - lambda_{s,i}}),
//
// with s = 1, 2. The aligned image set of an input tuple nu is every input
// tuple whose U_2 sequence equals that of nu. The context variable W is
// fixed to a constant.

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gdof/det_model.hpp"
#include "gdof/gdof_core.hpp"
#include "gdof/lemma_coeff.hpp"

namespace gdof::ais {

enum class InputLaw { kUniform, kCustom };
enum class ReferenceMode { kZeros, kSampledMax };

inline constexpr std::uint64_t kDefaultSeed = 0x41495345ULL;
inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;

/// Pair sampling for the alignment-probability check.
struct AlignmentSettings {
  int pbar = 32;
  int pairs = 500;
  int draws = 10000;
};

struct AisConfig {
  LemmaInstance instance;
  std::vector<int> pbar_sweep{4, 8, 16, 32, 64};
  int T = 1;
  int trials = 200;
  InputLaw input_law = InputLaw::kUniform;
  std::map<int, std::vector<double>> custom_pmf;  // per Pbar, one probability per symbol
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t budget = kDefaultBudget;
  det::CoefficientLaw coefficient_law = det::CoefficientLaw::kUniformPositive;
  bool shared_coefficients = false;  // U_1 and U_2 reuse one set of draws
  ReferenceMode reference = ReferenceMode::kZeros;
  int reference_samples = 16;        // sampled references per trial in kSampledMax
  int partition_trials = 1;          // trials per Pbar that run the O(|space|^2) partition check
  std::uint64_t partition_limit = 4096;
  int threads = 1;
  std::optional<AlignmentSettings> alignment;

  [[nodiscard]] int streams() const { return instance.total_streams(); }

  [[nodiscard]] static double power(int pbar) { return static_cast<double>(pbar) * pbar; }

  [[nodiscard]] std::int64_t alphabet(int pbar) const { return det::power_level_count(power(pbar), instance.eta); }

  /// (Pbar^eta)^(T sum M_i), or +inf once it passes 2^63.
  [[nodiscard]] double input_space_size(int pbar) const {
    return std::pow(static_cast<double>(alphabet(pbar)), static_cast<double>(T) * streams());
  }

  void validate() const {
    instance.validate();
    if (instance.N1 != 1 || instance.N2 != 1)
      throw std::invalid_argument("aligned image set experiments need a scalar instance (N1 = N2 = 1)");
    if (T < 1 || T > 2) throw std::invalid_argument("T must be 1 or 2");
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    if (pbar_sweep.empty()) throw std::invalid_argument("Pbar sweep is empty");
    for (int pb : pbar_sweep)
      if (pb < 2) throw std::invalid_argument("Pbar must be at least 2");
    if (reference_samples < 1) throw std::invalid_argument("reference_samples must be at least 1");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (input_law == InputLaw::kCustom) {
      for (int pb : pbar_sweep) {
        const auto it = custom_pmf.find(pb);
        if (it == custom_pmf.end()) throw std::invalid_argument("custom input law has no pmf for Pbar " + std::to_string(pb));
        if (it->second.size() != static_cast<std::size_t>(alphabet(pb)))
          throw std::invalid_argument("custom pmf for Pbar " + std::to_string(pb) + " must have one entry per symbol");
        double total = 0.0;
        for (double q : it->second) {
          if (!(q >= 0.0)) throw std::invalid_argument("custom pmf entries must be nonnegative");
          total += q;
        }
        if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("custom pmf must sum to 1");
      }
    }
  }

  void check_budget(int pbar) const {
    const double size = input_space_size(pbar);
    if (!(size <= static_cast<double>(budget)))
      throw BudgetExceeded("input space of " + std::to_string(size) + " tuples at Pbar " + std::to_string(pbar) +
                           " exceeds the enumeration budget " + std::to_string(budget));
  }
};

/// Observation value over T <= 2 channel uses.
using Image = std::pair<std::int64_t, std::int64_t>;

struct ImageHash {
  std::size_t operator()(const Image& x) const noexcept {
    return static_cast<std::size_t>(det::splitmix64(static_cast<std::uint64_t>(x.first) * 0x9e3779b97f4a7c15ULL ^
                                                     static_cast<std::uint64_t>(x.second)));
  }
};

/// Sub-seed of one channel realization.
[[nodiscard]] inline std::uint64_t trial_seed(const AisConfig& cfg, int pbar, int trial) {
  return det::derive_seed(det::derive_seed(cfg.seed, static_cast<std::uint64_t>(pbar)), static_cast<std::uint64_t>(trial));
}

/// Both observation maps for one channel realization at one Pbar. Input
/// tuples are indexed in mixed radix, digit (t * streams + r) for stream r at
/// channel use t.
class Realization {
 public:
  Realization(const AisConfig& cfg, int pbar, const det::BoundedDensitySampler& sampler)
      : T_(cfg.T), streams_(cfg.streams()), alphabet_(cfg.alphabet(pbar)) {
    const double P = AisConfig::power(pbar);
    for (const auto& g : cfg.instance.groups) {
      for (int m = 0; m < g.streams; ++m) {
        div_[0].push_back(det::power_level_count(P, positive_part(cfg.instance.eta - g.level1)));
        div_[1].push_back(det::power_level_count(P, positive_part(cfg.instance.eta - g.level2)));
      }
    }
    for (int s = 0; s < 2; ++s) {
      const std::uint32_t receiver = cfg.shared_coefficients ? 0U : static_cast<std::uint32_t>(s);
      for (int t = 0; t < T_; ++t)
        for (int r = 0; r < streams_; ++r)
          g_[s].push_back(sampler.draw({receiver, 0U, static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(r)}));
    }
  }

  [[nodiscard]] int T() const noexcept { return T_; }
  [[nodiscard]] int streams() const noexcept { return streams_; }
  [[nodiscard]] std::int64_t alphabet() const noexcept { return alphabet_; }
  [[nodiscard]] std::uint64_t space_size() const {
    std::uint64_t n = 1;
    for (int i = 0; i < T_ * streams_; ++i) n *= static_cast<std::uint64_t>(alphabet_);
    return n;
  }

  [[nodiscard]] std::vector<std::int64_t> decode(std::uint64_t index) const {
    std::vector<std::int64_t> digits(static_cast<std::size_t>(T_ * streams_));
    for (auto& d : digits) {
      d = static_cast<std::int64_t>(index % static_cast<std::uint64_t>(alphabet_));
      index /= static_cast<std::uint64_t>(alphabet_);
    }
    return digits;
  }

  [[nodiscard]] std::uint64_t encode(std::span<const std::int64_t> digits) const {
    if (digits.size() != static_cast<std::size_t>(T_ * streams_)) throw std::invalid_argument("input tuple has wrong length");
    std::uint64_t index = 0;
    for (std::size_t i = digits.size(); i-- > 0;) {
      if (digits[i] < 0 || digits[i] >= alphabet_) throw std::out_of_range("input symbol outside the alphabet");
      index = index * static_cast<std::uint64_t>(alphabet_) + static_cast<std::uint64_t>(digits[i]);
    }
    return index;
  }

  /// side 0 is U_1, side 1 is U_2.
  [[nodiscard]] Image observe(int side, std::span<const std::int64_t> digits) const {
    std::int64_t out[2] = {0, 0};
    const auto& div = div_[side];
    const auto& g = g_[side];
    for (int t = 0; t < T_; ++t) {
      std::int64_t sum = 0;
      for (int r = 0; r < streams_; ++r) {
        const std::int64_t level = digits[static_cast<std::size_t>(t * streams_ + r)] / div[r];
        sum += det::floor_to_zero(g[static_cast<std::size_t>(t * streams_ + r)] * static_cast<double>(level));
      }
      out[t] = sum;
    }
    return {out[0], out[1]};
  }

  [[nodiscard]] Image observe_index(int side, std::uint64_t index) const { return observe(side, decode(index)); }

  /// Top-truncated level of stream r at channel use t as seen by side s.
  [[nodiscard]] std::int64_t level(int side, std::span<const std::int64_t> digits, int t, int r) const {
    return digits[static_cast<std::size_t>(t * streams_ + r)] / div_[side][static_cast<std::size_t>(r)];
  }

 private:
  int T_;
  int streams_;
  std::int64_t alphabet_;
  std::vector<std::int64_t> div_[2];
  std::vector<double> g_[2];
};

[[nodiscard]] inline Realization realize(const AisConfig& cfg, int pbar, int trial) {
  return Realization(cfg, pbar, det::BoundedDensitySampler(trial_seed(cfg, pbar, trial), cfg.coefficient_law));
}

struct AlignedSet {
  std::vector<std::uint64_t> members;   // input tuple indices, ascending
  std::uint64_t distinct_images = 0;    // |S_nu|: distinct U_1 values among the members
};

/// Every input tuple producing the same U_2 as nu.
[[nodiscard]] inline AlignedSet enumerate_aligned_set(const AisConfig& cfg, int pbar, const Realization& real,
                                                      std::span<const std::int64_t> nu) {
  cfg.check_budget(pbar);
  const Image target = real.observe(1, nu);
  AlignedSet out;
  std::unordered_set<Image, ImageHash> images;
  const std::uint64_t n = real.space_size();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto digits = real.decode(i);
    if (real.observe(1, digits) != target) continue;
    out.members.push_back(i);
    images.insert(real.observe(0, digits));
  }
  out.distinct_images = images.size();
  return out;
}

namespace detail {

/// Probability of each input tuple under the input law.
class InputLawTable {
 public:
  InputLawTable(const AisConfig& cfg, int pbar) : alphabet_(cfg.alphabet(pbar)) {
    if (cfg.input_law == InputLaw::kCustom) pmf_ = cfg.custom_pmf.at(pbar);
  }

  [[nodiscard]] double probability(std::span<const std::int64_t> digits, std::uint64_t space) const {
    if (pmf_.empty()) return 1.0 / static_cast<double>(space);
    double q = 1.0;
    for (std::int64_t d : digits) q *= pmf_[static_cast<std::size_t>(d)];
    return q;
  }

 private:
  std::int64_t alphabet_;
  std::vector<double> pmf_;
};

template <typename Map>
double entropy_bits(const Map& m) {
  double h = 0.0;
  for (const auto& [key, q] : m)
    if (q > 0.0) h -= q * std::log2(q);
  return h;
}

/// Runs fn(i) for i in [0, n) on `threads` workers; fn writes only its own slot.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

/// Exact plug-in entropies (bits) of one realization.
///
/// U2_dep is U_2 under the functional-dependence convention: every U_1 value
/// takes the U_2 value of the lowest-index input tuple producing it, so
/// U2_dep is a function of U_1 by construction.
struct ObservationEntropies {
  double h_u1 = 0.0;
  double h_u2 = 0.0;
  double h_joint = 0.0;                // H(U_1, U_2) with the true U_2
  double h_u2_dependent = 0.0;         // H(U2_dep)
  double h_u1_given_u2_dependent = 0.0;
  bool u2_function_of_u1 = false;      // true U_2 is already a function of U_1
  std::uint64_t u1_support = 0;

  /// |H(U_1) - H(U2_dep) - H(U_1 | U2_dep)|
  [[nodiscard]] double chain_error() const { return std::abs(h_u1 - h_u2_dependent - h_u1_given_u2_dependent); }
  [[nodiscard]] double difference() const { return h_u1 - h_u2; }
};

[[nodiscard]] inline ObservationEntropies observation_entropies(const AisConfig& cfg, int pbar, const Realization& real) {
  cfg.check_budget(pbar);
  const detail::InputLawTable law(cfg, pbar);
  const std::uint64_t n = real.space_size();

  struct U1Entry {
    double q = 0.0;
    Image dependent{};  // U_2 of the first input tuple producing this U_1
  };
  std::unordered_map<Image, U1Entry, ImageHash> u1;
  std::unordered_map<Image, double, ImageHash> u2;
  std::map<std::pair<Image, Image>, double> joint;

  for (std::uint64_t i = 0; i < n; ++i) {
    const auto digits = real.decode(i);
    const double q = law.probability(digits, n);
    const Image a = real.observe(0, digits);
    const Image b = real.observe(1, digits);
    auto [it, fresh] = u1.try_emplace(a);
    if (fresh) it->second.dependent = b;
    it->second.q += q;
    u2[b] += q;
    joint[{a, b}] += q;
  }

  ObservationEntropies e;
  e.u1_support = u1.size();
  std::unordered_map<Image, double, ImageHash> dep;
  for (const auto& [a, entry] : u1) {
    if (entry.q > 0.0) e.h_u1 -= entry.q * std::log2(entry.q);
    dep[entry.dependent] += entry.q;
  }
  e.h_u2 = detail::entropy_bits(u2);
  e.h_joint = detail::entropy_bits(joint);
  e.h_u2_dependent = detail::entropy_bits(dep);
  // H(U_1 | U2_dep) = sum_b p(b) H(U_1 | U2_dep = b)
  for (const auto& [a, entry] : u1) {
    const double pb = dep.at(entry.dependent);
    if (entry.q > 0.0) e.h_u1_given_u2_dependent -= entry.q * std::log2(entry.q / pb);
  }
  e.u2_function_of_u1 = joint.size() == u1.size();
  return e;
}

/// Aligned image sets partition the input space: each tuple lies in its own
/// set, and sets of two tuples are equal or disjoint. Exhaustive, O(|space|^2).
[[nodiscard]] inline bool partition_holds(const AisConfig& cfg, int pbar, const Realization& real) {
  const std::uint64_t n = real.space_size();
  if (n > cfg.partition_limit) throw BudgetExceeded("partition check limited to " + std::to_string(cfg.partition_limit) + " tuples");
  std::vector<std::int64_t> owner(n, -1);  // smallest member of the tuple's set
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto s = enumerate_aligned_set(cfg, pbar, real, real.decode(i));
    if (!std::binary_search(s.members.begin(), s.members.end(), i)) return false;
    const auto first = static_cast<std::int64_t>(s.members.front());
    for (std::uint64_t m : s.members) {
      if (owner[m] == -1) owner[m] = first;
      else if (owner[m] != first) return false;
    }
  }
  return std::all_of(owner.begin(), owner.end(), [](std::int64_t o) { return o >= 0; });
}

/// c(Pbar) = c1 Delta Pbar^(max_r (lambda_1r - lambda_2r)^+), Pbar as a real.
[[nodiscard]] inline double c_pbar(const AisConfig& cfg, int pbar, double delta = 2.0) {
  double gap = 0.0;
  for (const auto& g : cfg.instance.groups) gap = std::max(gap, g.gap());
  return cfg.streams() * delta * std::pow(static_cast<double>(pbar), gap);
}

/// Upper bound on E|S_nu|:
/// (2 c1 + 2 c + 1 + 4 c1 c f_max (1 + ln(c1 Delta Pbar^(max_j lambda_1j))))^T.
[[nodiscard]] inline double aligned_set_size_bound(const AisConfig& cfg, int pbar, double delta = 2.0,
                                                   double f_max = 1.0) {
  const double c1 = cfg.streams();
  const double c = c_pbar(cfg, pbar, delta);
  double top = 0.0;
  for (const auto& g : cfg.instance.groups) top = std::max(top, g.level1);
  const double base = 2.0 * c1 + 2.0 * c + 1.0 +
                      4.0 * c1 * c * f_max * (1.0 + std::log(c1 * delta * std::pow(static_cast<double>(pbar), top)));
  return std::pow(base, cfg.T);
}

struct TrialOutcome {
  ObservationEntropies entropies;
  double log_set_size = 0.0;          // log2 |S_nu| at the all-zeros reference
  double max_sampled_log_set_size = 0.0;
  double set_size = 0.0;              // |S_nu| at the all-zeros reference
  std::optional<bool> partition;
};

[[nodiscard]] inline TrialOutcome run_trial(const AisConfig& cfg, int pbar, int trial) {
  const Realization real = realize(cfg, pbar, trial);
  TrialOutcome out;
  out.entropies = observation_entropies(cfg, pbar, real);

  const std::vector<std::int64_t> zeros(static_cast<std::size_t>(real.T() * real.streams()), 0);
  const AlignedSet s0 = enumerate_aligned_set(cfg, pbar, real, zeros);
  out.set_size = static_cast<double>(s0.distinct_images);
  out.log_set_size = std::log2(out.set_size);
  out.max_sampled_log_set_size = out.log_set_size;
  if (cfg.reference == ReferenceMode::kSampledMax) {
    std::mt19937_64 rng(det::derive_seed(trial_seed(cfg, pbar, trial), 1));
    std::uniform_int_distribution<std::uint64_t> pick(0, real.space_size() - 1);
    for (int r = 0; r < cfg.reference_samples; ++r) {
      const AlignedSet s = enumerate_aligned_set(cfg, pbar, real, real.decode(pick(rng)));
      out.max_sampled_log_set_size = std::max(out.max_sampled_log_set_size, std::log2(static_cast<double>(s.distinct_images)));
    }
  }
  if (trial < cfg.partition_trials && real.space_size() <= cfg.partition_limit) out.partition = partition_holds(cfg, pbar, real);
  return out;
}

struct SweepPoint {
  int pbar = 0;
  double P = 0.0;
  double entropy_diff = 0.0;         // mean over trials of H(U_1) - H(U_2), bits
  double entropy_diff_stderr = 0.0;
  double expected_log_set_size = 0.0;  // mean log2 |S_0|
  double expected_log_set_size_stderr = 0.0;
  double mean_max_sampled_log_set_size = 0.0;
  double mean_set_size = 0.0;
  double set_size_bound = 0.0;
  double max_chain_error = 0.0;
  int functional_trials = 0;         // trials where U_2 was already a function of U_1
  int partition_checked = 0;
  int partition_failures = 0;
};

[[nodiscard]] inline SweepPoint run_point(const AisConfig& cfg, int pbar) {
  cfg.validate();
  cfg.check_budget(pbar);
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
  detail::parallel_for(cfg.trials, cfg.threads, [&](int i) { outcomes[static_cast<std::size_t>(i)] = run_trial(cfg, pbar, i); });

  SweepPoint pt;
  pt.pbar = pbar;
  pt.P = AisConfig::power(pbar);
  std::vector<double> diffs, logs;
  double max_sampled = 0.0, sizes = 0.0;
  for (const auto& o : outcomes) {
    diffs.push_back(o.entropies.difference());
    logs.push_back(o.log_set_size);
    max_sampled += o.max_sampled_log_set_size;
    sizes += o.set_size;
    pt.max_chain_error = std::max(pt.max_chain_error, o.entropies.chain_error());
    if (o.entropies.u2_function_of_u1) ++pt.functional_trials;
    if (o.partition) {
      ++pt.partition_checked;
      if (!*o.partition) ++pt.partition_failures;
    }
  }
  std::tie(pt.entropy_diff, pt.entropy_diff_stderr) = detail::mean_and_stderr(diffs);
  std::tie(pt.expected_log_set_size, pt.expected_log_set_size_stderr) = detail::mean_and_stderr(logs);
  pt.mean_max_sampled_log_set_size = max_sampled / cfg.trials;
  pt.mean_set_size = sizes / cfg.trials;
  pt.set_size_bound = aligned_set_size_bound(cfg, pbar);
  return pt;
}

/// Mean over trials of log2 |S_nu| at the all-zeros reference, with standard error.
[[nodiscard]] inline std::pair<double, double> expected_log_set_size(const AisConfig& cfg, int pbar) {
  const SweepPoint pt = run_point(cfg, pbar);
  return {pt.expected_log_set_size, pt.expected_log_set_size_stderr};
}

/// Mean over trials of the exact H(U_1) - H(U_2) in bits, with standard error.
[[nodiscard]] inline std::pair<double, double> entropy_difference(const AisConfig& cfg, int pbar) {
  const SweepPoint pt = run_point(cfg, pbar);
  return {pt.entropy_diff, pt.entropy_diff_stderr};
}

/// Least-squares slope of y against x.
[[nodiscard]] inline double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs at least two matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit needs distinct x values");
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Alignment probability of input pairs

struct PairOutcome {
  std::uint64_t first = 0;
  std::uint64_t second = 0;
  double empirical = 0.0;    // fraction of draws with U_2(first) == U_2(second)
  double bound_u4 = 1.0;     // mean over draws of min(1, product bound on U_1 differences)
  double bound_top = 1.0;    // mean over draws of min(1, 2 c1 f_max / max truncated-level gap)
};

struct AlignmentReport {
  int pbar = 0;
  int draws = 0;
  int pairs_evaluated = 0;
  int pairs_skipped = 0;           // bound_u4 >= 1: no claim to test
  int violations = 0;              // empirical > bound_u4
  int top_level_violations = 0;    // empirical > bound_top where bound_top < 1
  double max_ratio = 0.0;          // max empirical / bound_u4 over evaluated pairs
  double max_pairwise_prob_violation = 0.0;  // max (empirical - bound_u4)^+
  std::vector<PairOutcome> pairs;
};

/// Per-draw bounds for one pair at one realization.
[[nodiscard]] inline std::pair<double, double> pair_bounds(const AisConfig& cfg, int pbar, const Realization& real,
                                                           std::span<const std::int64_t> a,
                                                           std::span<const std::int64_t> b, double delta = 2.0,
                                                           double f_max = 1.0) {
  const double c1 = cfg.streams();
  const double c = c_pbar(cfg, pbar, delta);
  const Image ua = real.observe(0, a);
  const Image ub = real.observe(0, b);
  const std::int64_t va[2] = {ua.first, ua.second};
  const std::int64_t vb[2] = {ub.first, ub.second};

  double u4 = 1.0, top = 1.0;
  for (int t = 0; t < real.T(); ++t) {
    const double gap = std::abs(static_cast<double>(va[t] - vb[t]));
    if (gap > c1 + c) u4 *= 2.0 * c1 * c * f_max / (gap - c1 - c);

    std::int64_t widest = 0;
    for (int r = 0; r < real.streams(); ++r)
      widest = std::max<std::int64_t>(widest, std::abs(real.level(1, a, t, r) - real.level(1, b, t, r)));
    if (widest > 0) top *= std::min(1.0, 2.0 * c1 * f_max / static_cast<double>(widest));
  }
  return {std::min(1.0, u4), std::min(1.0, top)};
}

/// Samples `pairs` distinct input pairs and estimates each alignment
/// probability from `draws` channel realizations, against the per-pair bounds.
[[nodiscard]] inline AlignmentReport alignment_probability_check(const AisConfig& cfg, int pbar, int pairs, int draws) {
  cfg.validate();
  if (pairs < 1 || draws < 1) throw std::invalid_argument("need at least one pair and one draw");
  const Realization shape = realize(cfg, pbar, 0);
  const std::uint64_t n = shape.space_size();
  if (n < 2) throw std::invalid_argument("input space has fewer than two tuples");

  std::mt19937_64 rng(det::derive_seed(cfg.seed, 0xa119ULL + static_cast<std::uint64_t>(pbar)));
  std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
  AlignmentReport rep;
  rep.pbar = pbar;
  rep.draws = draws;
  rep.pairs.resize(static_cast<std::size_t>(pairs));
  for (auto& pr : rep.pairs) {
    pr.first = pick(rng);
    do pr.second = pick(rng);
    while (pr.second == pr.first);
  }

  // Draws are keyed by (seed, Pbar, draw) and shared across pairs.
  std::vector<Realization> realizations;
  realizations.reserve(static_cast<std::size_t>(draws));
  for (int d = 0; d < draws; ++d) realizations.push_back(realize(cfg, pbar, d));

  detail::parallel_for(pairs, cfg.threads, [&](int i) {
    PairOutcome& pr = rep.pairs[static_cast<std::size_t>(i)];
    const auto a = shape.decode(pr.first);
    const auto b = shape.decode(pr.second);
    int aligned = 0;
    double u4 = 0.0, top = 0.0;
    for (const Realization& real : realizations) {
      if (real.observe(1, a) == real.observe(1, b)) ++aligned;
      const auto [bu4, btop] = pair_bounds(cfg, pbar, real, a, b);
      u4 += bu4;
      top += btop;
    }
    pr.empirical = static_cast<double>(aligned) / draws;
    pr.bound_u4 = u4 / draws;
    pr.bound_top = top / draws;
  });

  for (const auto& pr : rep.pairs) {
    if (pr.bound_top < 1.0 && pr.empirical > pr.bound_top) ++rep.top_level_violations;
    if (pr.bound_u4 >= 1.0) {
      ++rep.pairs_skipped;
      continue;
    }
    ++rep.pairs_evaluated;
    if (pr.empirical > pr.bound_u4) ++rep.violations;
    rep.max_ratio = std::max(rep.max_ratio, pr.empirical / pr.bound_u4);
    rep.max_pairwise_prob_violation = std::max(rep.max_pairwise_prob_violation, pr.empirical - pr.bound_u4);
  }
  return rep;
}

// ---------------------------------------------------------------------------

struct AisReport {
  std::uint64_t seed = 0;
  double coefficient_rhs = 0.0;
  std::vector<SweepPoint> points;
  double fitted_slope = 0.0;  // of entropy_diff / T against log2 Pbar
  std::optional<AlignmentReport> alignment;
};

[[nodiscard]] inline AisReport run_experiment(const AisConfig& cfg) {
  cfg.validate();
  for (int pb : cfg.pbar_sweep) cfg.check_budget(pb);
  AisReport rep;
  rep.seed = cfg.seed;
  rep.coefficient_rhs = lemma_coefficient(cfg.instance).coefficient;
  std::vector<double> x, y;
  for (int pb : cfg.pbar_sweep) {
    rep.points.push_back(run_point(cfg, pb));
    x.push_back(std::log2(static_cast<double>(pb)));
    y.push_back(rep.points.back().entropy_diff / cfg.T);
  }
  rep.fitted_slope = cfg.pbar_sweep.size() >= 2 ? fit_slope(x, y) : 0.0;
  if (cfg.alignment) {
    cfg.check_budget(cfg.alignment->pbar);
    rep.alignment = alignment_probability_check(cfg, cfg.alignment->pbar, cfg.alignment->pairs, cfg.alignment->draws);
  }
  return rep;
}

/// Single-group scalar instance: one stream seen at level1 by U_1 and level2 by U_2.
[[nodiscard]] inline LemmaInstance scalar_instance(double level1, double level2, double eta = 1.0) {
  LemmaInstance inst;
  inst.eta = eta;
  inst.groups = {{1, level1, level2}};
  inst.N1 = inst.N2 = 1;
  return inst;
}

}  // namespace gdof::ais
