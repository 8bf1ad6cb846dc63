#pragma once

// Deterministic channel machinery: power-level alphabets, truncation to the
// top power levels, bounded floor-linear combinations with bounded-density
// coefficients, and the received signals of the deterministic K-user model.
//
// Pbar^lambda always means floor(P^(lambda/2)), evaluated per exponent.
// Coefficients are bounded by Delta; the Delta_2 constant of the aligned
// image set analysis is taken to be the same Delta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdof::det {

/// Rounds toward zero: floor for x >= 0, ceiling for x < 0.
[[nodiscard]] inline std::int64_t floor_to_zero(double x) {
  if (!std::isfinite(x)) throw std::domain_error("floor_to_zero needs a finite argument");
  return static_cast<std::int64_t>(std::trunc(x));
}

/// floor(P^(lambda/2)). Values within 1e-9 (relative) of an integer snap to
/// it, so e.g. P = 256, lambda = 1/2 gives exactly 4.
[[nodiscard]] inline std::int64_t power_level_count(double P, double lambda) {
  if (!(P > 1.0)) throw std::domain_error("P must exceed 1");
  if (!(lambda >= 0.0)) throw std::domain_error("power level must be nonnegative");
  const double r = std::pow(P, lambda / 2.0);
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, r)) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::floor(r));
}

/// The alphabet {0, 1, ..., Pbar^lambda - 1}.
struct PowerLevelAlphabet {
  double P = 4.0;
  double lambda = 1.0;

  [[nodiscard]] std::int64_t cardinality() const { return power_level_count(P, lambda); }
  [[nodiscard]] bool contains(std::int64_t x) const { return x >= 0 && x < cardinality(); }
};

/// (X)^lambda_{lambda_lo}: the top lambda - lambda_lo power levels of X.
[[nodiscard]] inline std::int64_t truncate(std::int64_t X, double lambda_lo, double lambda, double P) {
  if (!(lambda_lo >= 0.0) || lambda_lo > lambda) throw std::domain_error("truncate needs 0 <= lambda_lo <= lambda");
  if (!PowerLevelAlphabet{P, lambda}.contains(X))
    throw std::out_of_range("value " + std::to_string(X) + " outside the power-level alphabet");
  return X / power_level_count(P, lambda_lo);
}

// ---------------------------------------------------------------------------
// Bounded-density coefficients

enum class CoefficientLaw : std::uint32_t {
  kUniformPositive = 0,   // uniform on [1, 2]
  kUniformSymmetric = 1,  // uniform on [-2, -1] U [1, 2]
};

/// Identifies one coefficient draw. For received signals: receiver, receive
/// antenna, channel use, and the term (transmitter * M + transmit antenna).
struct CoefficientKey {
  std::uint32_t receiver = 0;
  std::uint32_t antenna = 0;
  std::uint32_t time = 0;
  std::uint32_t term = 0;

  friend bool operator==(const CoefficientKey&, const CoefficientKey&) = default;
};

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic sub-seed for trial `index` of an experiment seeded with `seed`.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Counter-based sampler: each key maps to a fixed draw, so one seed is one
/// channel realization and repeated lookups are consistent. Draws for
/// distinct keys are independent.
class BoundedDensitySampler {
 public:
  explicit BoundedDensitySampler(std::uint64_t seed = 0x5eed, CoefficientLaw law = CoefficientLaw::kUniformPositive,
                                 bool static_channel = false)
      : seed_(seed), law_(law), static_channel_(static_channel) {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] CoefficientLaw law() const noexcept { return law_; }
  [[nodiscard]] bool static_channel() const noexcept { return static_channel_; }

  /// Magnitude bound.
  [[nodiscard]] double delta() const noexcept { return 2.0; }
  /// Density bound (the symmetric law has density 1/2; 1 is kept as the bound).
  [[nodiscard]] double f_max() const noexcept { return 1.0; }

  [[nodiscard]] double draw(CoefficientKey key) const noexcept {
    if (static_channel_) key.time = 0;
    std::uint64_t h = splitmix64(seed_);
    h = splitmix64(h ^ key.receiver);
    h = splitmix64(h ^ (static_cast<std::uint64_t>(key.antenna) << 32 | key.time));
    h = splitmix64(h ^ key.term);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
    if (law_ == CoefficientLaw::kUniformPositive) return 1.0 + u;
    // Bit 0 is not used by u, so it gives an independent sign.
    return (h & 1U) ? -(1.0 + u) : 1.0 + u;
  }

 private:
  std::uint64_t seed_;
  CoefficientLaw law_;
  bool static_channel_;
};

/// Dense coefficient tensor indexed by (receiver, antenna, time, term),
/// materialized from a sampler and cacheable on disk.
class CoefficientTensor {
 public:
  struct Shape {
    std::uint32_t receivers = 1, antennas = 1, times = 1, terms = 1;
    [[nodiscard]] std::size_t size() const {
      return std::size_t{receivers} * antennas * times * terms;
    }
    friend bool operator==(const Shape&, const Shape&) = default;
  };

  static CoefficientTensor materialize(const BoundedDensitySampler& sampler, Shape shape) {
    CoefficientTensor t;
    t.shape_ = shape;
    t.seed_ = sampler.seed();
    t.law_ = sampler.law();
    t.static_channel_ = sampler.static_channel();
    t.values_.reserve(shape.size());
    for (std::uint32_t r = 0; r < shape.receivers; ++r)
      for (std::uint32_t a = 0; a < shape.antennas; ++a)
        for (std::uint32_t ti = 0; ti < shape.times; ++ti)
          for (std::uint32_t te = 0; te < shape.terms; ++te) t.values_.push_back(sampler.draw({r, a, ti, te}));
    return t;
  }

  [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] double at(CoefficientKey k) const {
    if (k.receiver >= shape_.receivers || k.antenna >= shape_.antennas || k.time >= shape_.times ||
        k.term >= shape_.terms)
      throw std::out_of_range("coefficient key outside tensor shape");
    return values_[((std::size_t{k.receiver} * shape_.antennas + k.antenna) * shape_.times + k.time) * shape_.terms +
                   k.term];
  }

  // Cache layout (host byte order): magic "GDOFCOEF", u32 version, u64 seed,
  // u32 law, u32 static flag, u32 x4 shape, then shape.size() doubles.
  static constexpr char kMagic[8] = {'G', 'D', 'O', 'F', 'C', 'O', 'E', 'F'};
  static constexpr std::uint32_t kVersion = 1;

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof kMagic);
    write_pod(out, kVersion);
    write_pod(out, seed_);
    write_pod(out, static_cast<std::uint32_t>(law_));
    write_pod(out, static_cast<std::uint32_t>(static_channel_));
    write_pod(out, shape_.receivers);
    write_pod(out, shape_.antennas);
    write_pod(out, shape_.times);
    write_pod(out, shape_.terms);
    out.write(reinterpret_cast<const char*>(values_.data()), static_cast<std::streamsize>(values_.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }

  static CoefficientTensor load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
      throw std::runtime_error(path.string() + " is not a coefficient cache");
    if (read_pod<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported coefficient cache version");
    CoefficientTensor t;
    t.seed_ = read_pod<std::uint64_t>(in);
    const auto law = read_pod<std::uint32_t>(in);
    if (law > 1) throw std::runtime_error("unknown coefficient law in cache");
    t.law_ = static_cast<CoefficientLaw>(law);
    t.static_channel_ = read_pod<std::uint32_t>(in) != 0;
    t.shape_.receivers = read_pod<std::uint32_t>(in);
    t.shape_.antennas = read_pod<std::uint32_t>(in);
    t.shape_.times = read_pod<std::uint32_t>(in);
    t.shape_.terms = read_pod<std::uint32_t>(in);
    t.values_.resize(t.shape_.size());
    in.read(reinterpret_cast<char*>(t.values_.data()), static_cast<std::streamsize>(t.values_.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated coefficient cache " + path.string());
    return t;
  }

  friend bool operator==(const CoefficientTensor&, const CoefficientTensor&) = default;

 private:
  template <typename T>
  static void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  template <typename T>
  static T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("truncated coefficient cache header");
    return v;
  }

  Shape shape_{};
  std::uint64_t seed_ = 0;
  CoefficientLaw law_ = CoefficientLaw::kUniformPositive;
  bool static_channel_ = false;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Bounded floor-linear combinations

/// One term of L^b: input component `component` of group `group`, truncated
/// to the window (level_lo, level_hi], weighted by the coefficient `key`.
struct LinearTerm {
  std::size_t group = 0;
  std::size_t component = 0;
  double level_lo = 0.0;
  double level_hi = 0.0;
  CoefficientKey key{};
};

struct LinearCombSpec {
  std::vector<LinearTerm> terms;
  double eta = 1.0;

  void validate() const {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& t = terms[i];
      if (t.level_lo < 0.0 || t.level_lo > t.level_hi || t.level_hi > eta)
        throw std::invalid_argument("term window must satisfy 0 <= lo <= hi <= eta");
      for (std::size_t j = 0; j < i; ++j)
        if (terms[j].key == t.key) throw std::invalid_argument("coefficient draws must be distinct per term");
    }
  }
};

/// sum_i floor_to_zero(g_i * v_i)
[[nodiscard]] inline std::int64_t lincomb(std::span<const double> coefficients, std::span<const std::int64_t> values) {
  if (coefficients.size() != values.size()) throw std::invalid_argument("lincomb dimension mismatch");
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    sum += floor_to_zero(coefficients[i] * static_cast<double>(values[i]));
  return sum;
}

[[nodiscard]] inline std::int64_t lincomb(const LinearCombSpec& spec, std::span<const std::int64_t> values,
                                          const BoundedDensitySampler& draws) {
  if (spec.terms.size() != values.size()) throw std::invalid_argument("lincomb dimension mismatch");
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    sum += floor_to_zero(draws.draw(spec.terms[i].key) * static_cast<double>(values[i]));
  return sum;
}

// ---------------------------------------------------------------------------
// Deterministic K-user MIMO interference channel

struct DetChannel {
  int K = 2;
  int M = 1;
  int N = 1;
  double alpha = 1.0;
  double P = 256.0;

  void validate() const {
    if (K < 2 || M < 1 || N < 1) throw std::domain_error("need K >= 2, M >= 1, N >= 1");
    if (!(alpha >= 0.0)) throw std::domain_error("alpha must be nonnegative");
    if (!(P > 1.0)) throw std::domain_error("P must exceed 1");
  }

  /// max(1, alpha): the input alphabet's power level.
  [[nodiscard]] double top_level() const noexcept { return std::max(1.0, alpha); }
  [[nodiscard]] std::int64_t input_cardinality() const { return power_level_count(P, top_level()); }
  /// Window start for the desired signal (its top 1 levels).
  [[nodiscard]] double desired_window_lo() const noexcept { return top_level() - 1.0; }
  /// Window start for an interferer (its top alpha levels).
  [[nodiscard]] double interference_window_lo() const noexcept { return top_level() - alpha; }

  /// Largest possible |Y_kn|: KM * Delta * Pbar^max(1, alpha).
  [[nodiscard]] double output_magnitude_bound(double delta) const {
    return static_cast<double>(K) * M * delta * static_cast<double>(input_cardinality());
  }
};

/// inputs[j][m]: symbol of transmitter j on antenna m.
using InputMatrix = std::vector<std::vector<std::int64_t>>;

/// Received vector of receiver k at channel use t. Component n sums the
/// floor-weighted top-1 levels of user k and the top-alpha levels of every
/// other user, with coefficient keys (k, n, t, j * M + m).
[[nodiscard]] inline std::vector<std::int64_t> synthesize_received(const DetChannel& ch, int k, int t,
                                                                   const InputMatrix& inputs,
                                                                   const BoundedDensitySampler& sampler) {
  ch.validate();
  if (k < 0 || k >= ch.K) throw std::out_of_range("receiver index out of range");
  if (t < 0) throw std::out_of_range("channel use index must be nonnegative");
  if (inputs.size() != static_cast<std::size_t>(ch.K)) throw std::invalid_argument("need one input vector per user");

  const std::int64_t card = ch.input_cardinality();
  const std::int64_t desired_div = power_level_count(ch.P, ch.desired_window_lo());
  const std::int64_t cross_div = power_level_count(ch.P, ch.interference_window_lo());

  std::vector<std::int64_t> y(static_cast<std::size_t>(ch.N), 0);
  for (int j = 0; j < ch.K; ++j) {
    if (inputs[j].size() != static_cast<std::size_t>(ch.M)) throw std::invalid_argument("need M symbols per user");
    for (int m = 0; m < ch.M; ++m) {
      const std::int64_t x = inputs[j][m];
      if (x < 0 || x >= card) throw std::out_of_range("input symbol outside the alphabet");
      const std::int64_t level = x / (j == k ? desired_div : cross_div);
      if (level == 0) continue;
      for (int n = 0; n < ch.N; ++n) {
        const CoefficientKey key{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(n),
                                 static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(j * ch.M + m)};
        y[n] += floor_to_zero(sampler.draw(key) * static_cast<double>(level));
      }
    }
  }
  return y;
}

}  // namespace gdof::det
