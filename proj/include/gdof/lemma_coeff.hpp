#pragma once

// Right-hand-side coefficient of the generalized aligned-image-sets bound
//
//   H(U1 | W, G) - H(U2 | W, G) <= T * c * log Pbar + T o(log Pbar)
//
// where U1 (N1 outputs) and U2 (N2 outputs) observe l groups of M_i inputs at
// power levels lambda1_i and lambda2_i respectively, and the converse
// instances that plug into it.

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gdof/gdof_core.hpp"

namespace gdof {

struct LemmaGroup {
  int streams = 1;       // M_i
  double level1 = 0.0;   // lambda_{1i}: power level of group i as seen by U1
  double level2 = 0.0;   // lambda_{2i}: power level of group i as seen by U2

  [[nodiscard]] double gap() const noexcept { return positive_part(level1 - level2); }
};

struct LemmaInstance {
  double eta = 1.0;
  std::vector<LemmaGroup> groups;
  int N1 = 1;
  int N2 = 1;

  [[nodiscard]] int total_streams() const {
    return std::accumulate(groups.begin(), groups.end(), 0,
                           [](int acc, const LemmaGroup& g) { return acc + g.streams; });
  }

  /// Structural checks only; the N1 <= min(N2, sum M_i) precondition is
  /// enforced by lemma_coefficient.
  void validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (groups.empty()) throw std::invalid_argument("lemma instance needs at least one group");
    if (N1 < 1 || N2 < 1) throw std::invalid_argument("N1 and N2 must be at least 1");
    for (const auto& g : groups) {
      if (g.streams < 1) throw std::invalid_argument("group stream count must be at least 1");
      if (g.level1 < 0.0 || g.level1 > eta || g.level2 < 0.0 || g.level2 > eta)
        throw std::invalid_argument("power levels must lie in [0, eta]");
    }
  }
};

/// Thrown when N1 > min(N2, sum M_i); the bound does not cover that case.
class LemmaPreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CoefficientResult {
  double coefficient = 0.0;
  int split = 0;                         // s
  std::vector<std::size_t> sorted_order; // sorted_order[r] = original index of the r-th group
};

[[nodiscard]] inline CoefficientResult lemma_coefficient(const LemmaInstance& inst) {
  inst.validate();
  const int total = inst.total_streams();
  if (inst.N1 > std::min(inst.N2, total))
    throw LemmaPreconditionError("N1 = " + std::to_string(inst.N1) + " exceeds min(N2, sum M_i) = " +
                                 std::to_string(std::min(inst.N2, total)));

  CoefficientResult out;
  out.sorted_order.resize(inst.groups.size());
  std::iota(out.sorted_order.begin(), out.sorted_order.end(), std::size_t{0});
  std::stable_sort(out.sorted_order.begin(), out.sorted_order.end(), [&](std::size_t a, std::size_t b) {
    return inst.groups[a].gap() > inst.groups[b].gap();
  });

  // s: sum_{i<=s} M_i <= N1 < sum_{i<=s+1} M_i. When N1 equals the total, s = l
  // and the trailing term carries zero weight.
  int covered = 0;
  double coefficient = 0.0;
  std::size_t s = 0;
  for (; s < out.sorted_order.size(); ++s) {
    const LemmaGroup& g = inst.groups[out.sorted_order[s]];
    if (covered + g.streams > inst.N1) break;
    covered += g.streams;
    coefficient += g.streams * g.gap();
  }
  if (s < out.sorted_order.size())
    coefficient += (inst.N1 - covered) * inst.groups[out.sorted_order[s]].gap();

  out.coefficient = coefficient;
  out.split = static_cast<int>(s);
  return out;
}

/// Individual applications of the lemma inside the converse.
enum class ConverseStep {
  kJl0,       // receiver 2 vs receiver 1 given user 1's input
  kJl00,      // receiver K vs receiver K-1 given all earlier inputs
  kC3,        // receiver k vs receiver k-1 given users 1..k-1 (chain index k)
  kC5,        // receiver k vs its own top-alpha image, alpha <= 1/2
  kC5g,       // same pair with the roles of the groups exchanged, 1/2 <= alpha <= 1
  kCv6,       // single-user entropy bound, alpha <= 1
  kC6MinusMinus,  // single-user entropy bound, alpha >= 1 (eta = alpha)
};

inline constexpr std::array<ConverseStep, 7> kAllConverseSteps = {
    ConverseStep::kJl0, ConverseStep::kJl00, ConverseStep::kC3,          ConverseStep::kC5,
    ConverseStep::kC5g, ConverseStep::kCv6,  ConverseStep::kC6MinusMinus};

[[nodiscard]] constexpr std::string_view to_string(ConverseStep s) noexcept {
  switch (s) {
    case ConverseStep::kJl0: return "jl0";
    case ConverseStep::kJl00: return "jl00";
    case ConverseStep::kC3: return "c3";
    case ConverseStep::kC5: return "c5";
    case ConverseStep::kC5g: return "c5g";
    case ConverseStep::kCv6: return "cv6";
    case ConverseStep::kC6MinusMinus: return "c6minusminus";
  }
  return "unknown";
}

[[nodiscard]] inline ConverseStep converse_step_from_string(std::string_view name) {
  for (ConverseStep s : kAllConverseSteps)
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown converse step '" + std::string(name) + "'");
}

/// Closed-form coefficient printed next to each converse step.
[[nodiscard]] inline double converse_closed_form(ConverseStep step, const GdofParams& p) {
  p.validate();
  const double a = p.alpha, mn = p.min_mn();
  switch (step) {
    case ConverseStep::kJl0:
    case ConverseStep::kJl00:
    case ConverseStep::kC3:
      return mn * (1.0 - a);
    case ConverseStep::kC5:
      return mn * (1.0 - a) + positive_part(p.N - p.M) * a;
    case ConverseStep::kC5g:
      return detail::interference_dims_moderate(p);
    case ConverseStep::kCv6:
      return mn + positive_part(p.N - p.M) * a;
    case ConverseStep::kC6MinusMinus:
      return detail::interference_dims_strong(p);
  }
  throw std::logic_error("unhandled converse step");
}

/// The lemma instance substituted at a converse step, with groups in the
/// order they are written there (sorting is lemma_coefficient's job).
///
/// `chain_index` selects k for kC3 (2 <= k <= K); other steps ignore it.
/// When N exceeds the total number of observed streams, N1 = N2 is reduced
/// to that total: receive dimensions beyond the input dimension carry no
/// additional GDoF, and the lemma's precondition N1 <= sum M_i then holds.
[[nodiscard]] inline LemmaInstance converse_instance(ConverseStep step, const GdofParams& p, int chain_index = 2) {
  p.validate();
  const double a = p.alpha;
  const int K = p.K, M = p.M;

  auto require_alpha = [&](double lo, double hi) {
    if (a < lo || a > hi)
      throw std::domain_error(std::string(to_string(step)) + " requires alpha in [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
  };

  // Receiver k against receiver k-1, both conditioned on users 1..k-1:
  // user k is seen at level 1 versus alpha, users k+1..K at alpha by both.
  auto chain = [&](int k) {
    LemmaInstance inst;
    inst.eta = 1.0;
    inst.groups.push_back({M, 1.0, a});
    if (K > k) inst.groups.push_back({(K - k) * M, a, a});
    return inst;
  };

  LemmaInstance inst;
  switch (step) {
    case ConverseStep::kJl0:
      require_alpha(0.0, 1.0);
      inst = chain(2);
      break;
    case ConverseStep::kJl00:
      require_alpha(0.0, 1.0);
      inst = chain(K);
      break;
    case ConverseStep::kC3:
      require_alpha(0.0, 1.0);
      if (chain_index < 2 || chain_index > K) throw std::domain_error("c3 chain index must lie in [2, K]");
      inst = chain(chain_index);
      break;
    case ConverseStep::kC5:
      // Y_k against its own top-alpha image X'_k; own input first.
      require_alpha(0.0, 0.5);
      inst.eta = 1.0;
      inst.groups = {{M, 1.0, a}, {(K - 1) * M, a, 0.0}};
      break;
    case ConverseStep::kC5g:
      require_alpha(0.5, 1.0);
      inst.eta = 1.0;
      inst.groups = {{(K - 1) * M, a, 0.0}, {M, 1.0, a}};
      break;
    case ConverseStep::kCv6:
      // Y_1 against a constant.
      require_alpha(0.0, 1.0);
      inst.eta = 1.0;
      inst.groups = {{M, 1.0, 0.0}, {(K - 1) * M, a, 0.0}};
      break;
    case ConverseStep::kC6MinusMinus:
      // Y_1 against a constant on the alpha-level alphabet: interferers at
      // alpha, own input at its top level 1.
      if (a < 1.0) throw std::domain_error("c6minusminus requires alpha >= 1");
      inst.eta = a;
      inst.groups = {{(K - 1) * M, a, 0.0}, {M, 1.0, 0.0}};
      break;
  }
  inst.N1 = inst.N2 = std::min(p.N, inst.total_streams());
  return inst;
}

}  // namespace gdof
