#pragma once

// Sum-GDoF of the K-user symmetric M x N MIMO interference channel under
// finite precision CSIT, together with the five outer bounds it is the
// minimum of.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gdof {

/// An exhaustive computation would exceed its configured enumeration budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (x)^+
[[nodiscard]] constexpr double positive_part(double x) noexcept { return x > 0.0 ? x : 0.0; }

/// Symmetric channel parameterization: K users, M transmit and N receive
/// antennas per user, cross-link strength exponent alpha.
struct GdofParams {
  int K = 2;
  int M = 1;
  int N = 1;
  double alpha = 0.0;

  void validate() const {
    if (K < 2) throw std::domain_error("K must be at least 2");
    if (M < 1) throw std::domain_error("M must be at least 1");
    if (N < 1) throw std::domain_error("N must be at least 1");
    if (!(alpha >= 0.0)) throw std::domain_error("alpha must be a finite nonnegative real");
  }

  [[nodiscard]] int min_mn() const noexcept { return std::min(M, N); }

  /// M <= N/K, tested in integers.
  [[nodiscard]] bool receivers_separate_all_streams() const noexcept {
    return static_cast<std::int64_t>(K) * M <= N;
  }
};

enum class Branch {
  kAllStreams,      // M <= N/K: every stream is separable, sum = KM
  kWeak,            // 0 <= alpha <= 1/2
  kModeratePair,    // 1/2 < alpha <= 1, first argument of the min attains it
  kModerateLinear,  // 1/2 < alpha <= 1, second argument (N alpha + K min(M,N)(1-alpha))
  kStrong,          // alpha > 1
};

[[nodiscard]] constexpr std::string_view to_string(Branch b) noexcept {
  switch (b) {
    case Branch::kAllStreams: return "all_streams";
    case Branch::kWeak: return "weak";
    case Branch::kModeratePair: return "moderate_pair";
    case Branch::kModerateLinear: return "moderate_linear";
    case Branch::kStrong: return "strong";
  }
  return "unknown";
}

enum class BoundId { kB1 = 0, kB1Plus, kB2, kB2Plus, kB3 };

inline constexpr std::array<BoundId, 5> kAllBounds = {BoundId::kB1, BoundId::kB1Plus, BoundId::kB2,
                                                      BoundId::kB2Plus, BoundId::kB3};

[[nodiscard]] constexpr std::string_view to_string(BoundId id) noexcept {
  switch (id) {
    case BoundId::kB1: return "b1";
    case BoundId::kB1Plus: return "b1_plus";
    case BoundId::kB2: return "b2";
    case BoundId::kB2Plus: return "b2_plus";
    case BoundId::kB3: return "b3";
  }
  return "unknown";
}

/// Evaluated outer bounds; std::nullopt marks a bound outside its alpha range.
struct BoundTable {
  std::array<std::optional<double>, 5> values{};

  [[nodiscard]] const std::optional<double>& operator[](BoundId id) const {
    return values[static_cast<std::size_t>(id)];
  }
  std::optional<double>& operator[](BoundId id) { return values[static_cast<std::size_t>(id)]; }
};

struct GdofResult {
  double sum_gdof = 0.0;
  Branch active_branch = Branch::kWeak;
  BoundTable bounds;
};

namespace detail {

inline double interference_dims_moderate(const GdofParams& p) {
  // min((K-1)M, N) alpha + (N - (K-1)M)^+ (1 - alpha)
  const double km1 = static_cast<double>(p.K - 1) * p.M;
  return std::min(km1, static_cast<double>(p.N)) * p.alpha + positive_part(p.N - km1) * (1.0 - p.alpha);
}

inline double interference_dims_strong(const GdofParams& p) {
  // (N - (K-1)M)^+ + min(N, (K-1)M) alpha
  const double km1 = static_cast<double>(p.K - 1) * p.M;
  return positive_part(p.N - km1) + std::min(static_cast<double>(p.N), km1) * p.alpha;
}

}  // namespace detail

// Outer bounds. Each returns std::nullopt outside its alpha range.

[[nodiscard]] inline std::optional<double> bound_b1(const GdofParams& p) {
  p.validate();
  if (p.alpha > 0.5) return std::nullopt;
  const double K = p.K, mn = p.min_mn(), a = p.alpha;
  const double head = mn * (1.0 - a) + positive_part(p.N - p.M) * a;
  return (K * head + K * (K - 2.0) * mn * (1.0 - a)) / (K - 1.0);
}

[[nodiscard]] inline std::optional<double> bound_b1_plus(const GdofParams& p) {
  p.validate();
  if (p.alpha < 0.5 || p.alpha > 1.0) return std::nullopt;
  const double K = p.K, mn = p.min_mn(), a = p.alpha;
  return (K * detail::interference_dims_moderate(p) + K * (K - 2.0) * mn * (1.0 - a)) / (K - 1.0);
}

[[nodiscard]] inline std::optional<double> bound_b2(const GdofParams& p) {
  p.validate();
  if (p.alpha > 1.0) return std::nullopt;
  return p.N * p.alpha + static_cast<double>(p.K) * p.min_mn() * (1.0 - p.alpha);
}

[[nodiscard]] inline std::optional<double> bound_b2_plus(const GdofParams& p) {
  p.validate();
  if (p.alpha < 1.0) return std::nullopt;
  return detail::interference_dims_strong(p);
}

[[nodiscard]] inline double bound_b3(const GdofParams& p) {
  p.validate();
  return static_cast<double>(p.K) * p.min_mn();
}

[[nodiscard]] inline BoundTable all_bounds(const GdofParams& p) {
  BoundTable t;
  t[BoundId::kB1] = bound_b1(p);
  t[BoundId::kB1Plus] = bound_b1_plus(p);
  t[BoundId::kB2] = bound_b2(p);
  t[BoundId::kB2Plus] = bound_b2_plus(p);
  t[BoundId::kB3] = bound_b3(p);
  return t;
}

/// Minimum over every bound applicable at p.alpha.
[[nodiscard]] inline double min_of_bounds(const GdofParams& p) {
  const BoundTable t = all_bounds(p);
  double best = *t[BoundId::kB3];
  for (const auto& v : t.values)
    if (v) best = std::min(best, *v);
  return best;
}

/// Closed-form sum GDoF with the branch that produced it.
[[nodiscard]] inline GdofResult sum_gdof(const GdofParams& p) {
  p.validate();
  GdofResult r;
  r.bounds = all_bounds(p);

  if (p.receivers_separate_all_streams()) {
    r.sum_gdof = static_cast<double>(p.K) * p.M;
    r.active_branch = Branch::kAllStreams;
    return r;
  }

  const double K = p.K, mn = p.min_mn(), a = p.alpha;
  if (a <= 0.5) {
    r.sum_gdof = K * mn * (1.0 - a) + K * positive_part(p.N - p.M) * a / (K - 1.0);
    r.active_branch = Branch::kWeak;
  } else if (a <= 1.0) {
    const double pair = K / (K - 1.0) * ((K - 2.0) * mn * (1.0 - a) + detail::interference_dims_moderate(p));
    const double linear = p.N * a + K * mn * (1.0 - a);
    r.sum_gdof = std::min(pair, linear);
    r.active_branch = pair <= linear ? Branch::kModeratePair : Branch::kModerateLinear;
  } else {
    r.sum_gdof = std::min(detail::interference_dims_strong(p), K * mn);
    r.active_branch = Branch::kStrong;
  }
  return r;
}

/// Per-user GDoF of the symmetric K-user SISO interference channel (W-curve).
[[nodiscard]] inline double siso_per_user_gdof(int K, double alpha) {
  if (K < 2) throw std::domain_error("K must be at least 2");
  if (!(alpha >= 0.0)) throw std::domain_error("alpha must be a finite nonnegative real");
  const double k = K;
  if (alpha <= 0.5) return 1.0 - alpha;
  if (alpha <= k / (k + 1.0)) return (k - 2.0 - (k - 3.0) * alpha) / (k - 1.0);
  if (alpha <= 1.0) return 1.0 - (k - 1.0) / k * alpha;
  if (alpha <= k) return alpha / k;
  return 1.0;
}

/// Sum GDoF for N < M: K N times the SISO per-user curve.
[[nodiscard]] inline double sum_gdof_fewer_receive_antennas(const GdofParams& p) {
  p.validate();
  if (p.N >= p.M) throw std::domain_error("reduction requires N < M");
  return static_cast<double>(p.K) * p.N * siso_per_user_gdof(p.K, p.alpha);
}

}  // namespace gdof
