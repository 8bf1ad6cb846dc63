#pragma once

// Rate-splitting achievability plans for the symmetric MIMO interference
// channel and their validation through the MAC achievability check.
//
// Every user splits its message into common codewords (decoded by all
// receivers, sent at full power, exponent 0) and private codewords (sent at
// power P^-alpha, so they arrive at the noise floor of unintended receivers).
// Each receiver decodes all commons and its own privates, treating the other
// users' privates as noise.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gdof/gdof_core.hpp"
#include "gdof/mac_region.hpp"

namespace gdof::scheme {

enum class CodewordKind { kCommon, kPrivate };

[[nodiscard]] constexpr std::string_view to_string(CodewordKind k) noexcept {
  return k == CodewordKind::kCommon ? "common" : "private";
}

struct Codeword {
  CodewordKind kind = CodewordKind::kCommon;
  int beam = 0;                 // abstract generic beam direction index
  double power_exponent = 0.0;  // transmit power P^-power_exponent
  double load = 0.0;            // GDoF carried
};

struct UserPlan {
  std::vector<Codeword> codewords;

  [[nodiscard]] double load_sum() const {
    double s = 0.0;
    for (const auto& c : codewords) s += c.load;
    return s;
  }
};

/// A codeword of user `user`.
struct StreamRef {
  int user = 0;
  int codeword = 0;
  friend bool operator==(const StreamRef&, const StreamRef&) = default;
};

struct ReceiverPlan {
  std::vector<StreamRef> decoded;
  std::vector<StreamRef> treated_as_noise;
  std::vector<StreamRef> nulled;  // removed by zero-forcing
};

enum class Construction {
  kWeak,         // alpha <= 1/2: M commons + min(M,N) privates per user
  kModerate,     // 1/2 < alpha <= 1: same layout, common load from the target sum
  kStrong,       // alpha > 1: min(M,N) commons per user, no privates
  kZeroForcing,  // K M <= N: one stream per antenna, separated by receive nulling
};

[[nodiscard]] constexpr std::string_view to_string(Construction c) noexcept {
  switch (c) {
    case Construction::kWeak: return "rate_splitting_weak";
    case Construction::kModerate: return "rate_splitting_moderate";
    case Construction::kStrong: return "common_only_strong";
    case Construction::kZeroForcing: return "zero_forcing";
  }
  return "unknown";
}

struct SchemePlan {
  GdofParams params;
  Construction construction = Construction::kWeak;
  std::vector<UserPlan> users;
  std::vector<ReceiverPlan> receivers;
  std::vector<std::string> warnings;

  [[nodiscard]] double total_load() const {
    double s = 0.0;
    for (const auto& u : users) s += u.load_sum();
    return s;
  }
};

/// Raised by plan() when K M <= N; use zero_force_plan() there.
class NotCoveredError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void assign_receivers(SchemePlan& plan) {
  const int K = static_cast<int>(plan.users.size());
  plan.receivers.assign(static_cast<std::size_t>(K), {});
  for (int k = 0; k < K; ++k) {
    auto& rx = plan.receivers[k];
    for (int j = 0; j < K; ++j) {
      const auto& cws = plan.users[j].codewords;
      for (int c = 0; c < static_cast<int>(cws.size()); ++c) {
        const StreamRef ref{j, c};
        if (plan.construction == Construction::kZeroForcing)
          (j == k ? rx.decoded : rx.nulled).push_back(ref);
        else if (cws[c].kind == CodewordKind::kCommon || j == k)
          rx.decoded.push_back(ref);
        else
          rx.treated_as_noise.push_back(ref);
      }
    }
  }
}

}  // namespace detail

/// Builds the plan of a given construction without regime checks beyond
/// the construction's own preconditions; used to compare constructions at
/// shared boundaries such as alpha = 1.
[[nodiscard]] inline SchemePlan plan_with(const GdofParams& p, Construction construction) {
  p.validate();
  SchemePlan plan;
  plan.params = p;
  plan.construction = construction;

  const int K = p.K, M = p.M, mn = p.min_mn();
  const double a = p.alpha;
  std::vector<Codeword> cws;

  switch (construction) {
    case Construction::kZeroForcing: {
      if (!p.receivers_separate_all_streams())
        throw std::domain_error("zero-forcing needs K M <= N");
      for (int j = 0; j < M; ++j) cws.push_back({CodewordKind::kPrivate, j, 0.0, 1.0});
      break;
    }
    case Construction::kWeak:
    case Construction::kModerate: {
      if (a > 1.0) throw std::domain_error("rate splitting with privates needs alpha <= 1");
      double common = 0.0;
      if (construction == Construction::kWeak) {
        common = positive_part(p.N - M) * a / ((K - 1.0) * M);
      } else {
        const double target = sum_gdof(p).sum_gdof;
        common = (target - K * mn * (1.0 - a)) / (static_cast<double>(K) * M);
      }
      if (common < 0.0) {
        plan.warnings.push_back("negative common load " + std::to_string(common) + " clamped to 0");
        common = 0.0;
      }
      for (int j = 0; j < M; ++j) cws.push_back({CodewordKind::kCommon, j, 0.0, common});
      for (int j = 0; j < mn; ++j) cws.push_back({CodewordKind::kPrivate, j, a, positive_part(1.0 - a)});
      break;
    }
    case Construction::kStrong: {
      const double load = std::min(gdof::detail::interference_dims_strong(p) / (static_cast<double>(K) * mn), 1.0);
      for (int j = 0; j < mn; ++j) cws.push_back({CodewordKind::kCommon, j, 0.0, load});
      break;
    }
  }

  plan.users.assign(static_cast<std::size_t>(K), UserPlan{cws});
  detail::assign_receivers(plan);
  return plan;
}

/// Rate-splitting plan for N/K < M, chosen by alpha regime.
[[nodiscard]] inline SchemePlan plan(const GdofParams& p) {
  p.validate();
  if (p.receivers_separate_all_streams())
    throw NotCoveredError("K M <= N: rate splitting does not apply, use zero_force_plan");
  if (p.alpha <= 0.5) return plan_with(p, Construction::kWeak);
  if (p.alpha <= 1.0) return plan_with(p, Construction::kModerate);
  return plan_with(p, Construction::kStrong);
}

/// K M <= N: M unit-load streams per user, all separated at every receiver.
[[nodiscard]] inline SchemePlan zero_force_plan(const GdofParams& p) {
  p.validate();
  if (!p.receivers_separate_all_streams()) throw std::domain_error("zero_force_plan needs K M <= N");
  return plan_with(p, Construction::kZeroForcing);
}

struct ReceiverValidation {
  int receiver = 0;
  mac::MacProblem problem;
  mac::GdofTuple tuple;
  mac::MacVerdict verdict;
};

struct PlanValidation {
  std::vector<ReceiverValidation> receivers;
  double achieved_sum_gdof = 0.0;
  double formula_sum_gdof = 0.0;
  bool all_achievable = true;
  bool match = false;
  std::optional<std::string> rank_certificate;  // zero-forcing plans only
};

/// MAC problem seen by receiver k: its own decoded codewords at strength 1
/// (first), other users' decoded codewords at strength alpha, and a noise
/// floor at the highest level any undecoded codeword arrives with.
[[nodiscard]] inline ReceiverValidation receiver_problem(const SchemePlan& plan, int k) {
  const GdofParams& p = plan.params;
  const auto& rx = plan.receivers.at(static_cast<std::size_t>(k));
  ReceiverValidation out;
  out.receiver = k;

  std::vector<double> own_eta, cross_eta, own_d, cross_d;
  for (const StreamRef& s : rx.decoded) {
    const Codeword& cw = plan.users.at(s.user).codewords.at(s.codeword);
    (s.user == k ? own_eta : cross_eta).push_back(cw.power_exponent);
    (s.user == k ? own_d : cross_d).push_back(cw.load);
  }
  double floor_level = 0.0;
  for (const StreamRef& s : rx.treated_as_noise) {
    const Codeword& cw = plan.users.at(s.user).codewords.at(s.codeword);
    const double strength = s.user == k ? 1.0 : p.alpha;
    floor_level = std::max(floor_level, positive_part(strength - cw.power_exponent));
  }

  out.problem.M1 = static_cast<int>(own_eta.size());
  out.problem.M2 = static_cast<int>(cross_eta.size());
  out.problem.alpha = p.alpha;
  out.problem.N = p.N;
  out.problem.eta = own_eta;
  out.problem.eta.insert(out.problem.eta.end(), cross_eta.begin(), cross_eta.end());
  out.problem.noise_levels.assign(static_cast<std::size_t>(p.N), floor_level);
  out.tuple.d = own_d;
  out.tuple.d.insert(out.tuple.d.end(), cross_d.begin(), cross_d.end());
  return out;
}

[[nodiscard]] inline PlanValidation validate(const SchemePlan& plan, const GdofParams& p) {
  p.validate();
  PlanValidation v;
  v.achieved_sum_gdof = plan.total_load();
  v.formula_sum_gdof = sum_gdof(p).sum_gdof;

  if (plan.construction == Construction::kZeroForcing) {
    const long streams = static_cast<long>(p.K) * p.M;
    v.all_achievable = streams <= p.N;
    v.rank_certificate = std::to_string(streams) + " streams <= " + std::to_string(p.N) +
                         " generic receive dimensions; every stream is separable by nulling the rest";
  } else {
    for (int k = 0; k < p.K; ++k) {
      ReceiverValidation rv = receiver_problem(plan, k);
      rv.verdict = mac::check_achievable(rv.problem, rv.tuple);
      if (!rv.verdict.achievable) v.all_achievable = false;
      v.receivers.push_back(std::move(rv));
    }
  }
  v.match = v.all_achievable && std::abs(v.achieved_sum_gdof - v.formula_sum_gdof) <= 1e-9;
  return v;
}

}  // namespace gdof::scheme
