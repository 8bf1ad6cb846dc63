#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "gdof/det_model.hpp"

namespace {

namespace det = gdof::det;

TEST(PowerLevels, Counts) {
  EXPECT_EQ(det::power_level_count(256.0, 0.5), 4);
  EXPECT_EQ(det::power_level_count(256.0, 1.0), 16);
  EXPECT_EQ(det::power_level_count(256.0, 0.0), 1);
  EXPECT_EQ(det::power_level_count(100.0, 1.0), 10);
  EXPECT_EQ(det::power_level_count(10.0, 1.0), 3);
  EXPECT_EQ(det::power_level_count(1024.0, 0.5), 5);  // 1024^(1/4) = 5.66
  EXPECT_THROW((void)det::power_level_count(1.0, 1.0), std::domain_error);
  EXPECT_THROW((void)det::power_level_count(4.0, -0.1), std::domain_error);
}

TEST(PowerLevels, Alphabet) {
  const det::PowerLevelAlphabet a{256.0, 1.0};
  EXPECT_EQ(a.cardinality(), 16);
  EXPECT_TRUE(a.contains(0));
  EXPECT_TRUE(a.contains(15));
  EXPECT_FALSE(a.contains(16));
  EXPECT_FALSE(a.contains(-1));
}

TEST(Truncate, TopLevels) {
  EXPECT_EQ(det::truncate(13, 0.5, 1.0, 256.0), 3);
  EXPECT_EQ(det::truncate(13, 0.0, 1.0, 256.0), 13);
  EXPECT_EQ(det::truncate(15, 1.0, 1.0, 256.0), 0);
  EXPECT_THROW((void)det::truncate(16, 0.5, 1.0, 256.0), std::out_of_range);
  EXPECT_THROW((void)det::truncate(3, 0.8, 0.5, 256.0), std::domain_error);
}

TEST(Truncate, NestedEqualsDirectWhenLevelCountsMultiply) {
  // P = 2^16: every count below is a power of two, so nested floors compose exactly.
  const double P = 65536.0;
  for (std::int64_t x = 0; x < 256; ++x) {
    const std::int64_t once = det::truncate(x, 0.25, 1.0, P);
    const std::int64_t nested = once / det::power_level_count(P, 0.25);
    EXPECT_EQ(nested, det::truncate(x, 0.5, 1.0, P));
  }
}

TEST(Truncate, NestedIsWithinOneCoarseLevelOtherwise) {
  // Pbar = 63: counts 2, 2 and 7, so two steps divide by 4 where one divides by 7.
  const double P = 63.0 * 63.0;
  const std::int64_t a = det::power_level_count(P, 0.25), c = det::power_level_count(P, 0.5);
  ASSERT_LT(a * a, c);
  for (std::int64_t x = 0; x < 63; ++x) {
    const std::int64_t direct = x / c;
    const std::int64_t nested = (x / a) / a;
    EXPECT_GE(nested, direct);
    EXPECT_LT(static_cast<double>(nested), static_cast<double>(direct + 1) * static_cast<double>(c) / (a * a));
  }
}

TEST(FloorToZero, RoundsTowardZero) {
  EXPECT_EQ(det::floor_to_zero(1.9), 1);
  EXPECT_EQ(det::floor_to_zero(-1.5), -1);
  EXPECT_EQ(det::floor_to_zero(-0.2), 0);
  EXPECT_THROW((void)det::floor_to_zero(std::numeric_limits<double>::infinity()), std::domain_error);
  EXPECT_THROW((void)det::floor_to_zero(std::nan("")), std::domain_error);
}

TEST(Lincomb, Values) {
  const std::vector<double> g{1.5, 0.5};
  const std::vector<std::int64_t> v{3, 5};
  EXPECT_EQ(det::lincomb(g, v), 6);
  const std::vector<double> neg{-1.5, 1.2};
  EXPECT_EQ(det::lincomb(neg, v), -4 + 6);
  const std::vector<std::int64_t> short_v{1};
  EXPECT_THROW((void)det::lincomb(g, short_v), std::invalid_argument);
}

TEST(Lincomb, SpecUsesSamplerDraws) {
  const det::BoundedDensitySampler s(11);
  det::LinearCombSpec spec;
  spec.terms = {{0, 0, 0.0, 1.0, {0, 0, 0, 0}}, {0, 1, 0.0, 1.0, {0, 0, 0, 1}}};
  spec.validate();
  const std::vector<std::int64_t> v{7, 9};
  const std::int64_t expected = static_cast<std::int64_t>(s.draw({0, 0, 0, 0}) * 7) + static_cast<std::int64_t>(s.draw({0, 0, 0, 1}) * 9);
  EXPECT_EQ(det::lincomb(spec, v, s), expected);
}

TEST(Lincomb, SpecValidation) {
  det::LinearCombSpec dup;
  dup.terms = {{0, 0, 0.0, 1.0, {0, 0, 0, 3}}, {0, 1, 0.0, 1.0, {0, 0, 0, 3}}};
  EXPECT_THROW(dup.validate(), std::invalid_argument);
  det::LinearCombSpec window;
  window.eta = 1.0;
  window.terms = {{0, 0, 0.5, 1.5, {}}};
  EXPECT_THROW(window.validate(), std::invalid_argument);
  window.terms = {{0, 0, 0.7, 0.5, {}}};
  EXPECT_THROW(window.validate(), std::invalid_argument);
}

TEST(Sampler, DeterministicBoundedAndKeyed) {
  const det::BoundedDensitySampler a(42), b(42), c(43);
  double sum = 0.0;
  std::set<double> seen;
  for (std::uint32_t t = 0; t < 4000; ++t) {
    const det::CoefficientKey k{1, 2, t, 3};
    const double x = a.draw(k);
    EXPECT_EQ(x, b.draw(k));
    EXPECT_GE(x, 1.0);
    EXPECT_LT(x, 2.0);
    seen.insert(x);
    sum += x;
  }
  EXPECT_EQ(seen.size(), 4000U);
  EXPECT_NEAR(sum / 4000.0, 1.5, 0.02);
  EXPECT_NE(a.draw({0, 0, 0, 0}), c.draw({0, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(a.delta(), 2.0);
  EXPECT_DOUBLE_EQ(a.f_max(), 1.0);
}

TEST(Sampler, SymmetricLawTakesBothSigns) {
  const det::BoundedDensitySampler s(5, det::CoefficientLaw::kUniformSymmetric);
  int negative = 0;
  for (std::uint32_t i = 0; i < 2000; ++i) {
    const double x = s.draw({0, 0, 0, i});
    EXPECT_GE(std::abs(x), 1.0);
    EXPECT_LT(std::abs(x), 2.0);
    negative += x < 0.0;
  }
  EXPECT_GT(negative, 900);
  EXPECT_LT(negative, 1100);
}

TEST(Sampler, StaticChannelIgnoresTime) {
  const det::BoundedDensitySampler s(9, det::CoefficientLaw::kUniformPositive, true);
  EXPECT_EQ(s.draw({1, 1, 0, 2}), s.draw({1, 1, 7, 2}));
  const det::BoundedDensitySampler varying(9);
  EXPECT_NE(varying.draw({1, 1, 0, 2}), varying.draw({1, 1, 7, 2}));
}

TEST(Sampler, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(det::derive_seed(1, i));
  EXPECT_EQ(seeds.size(), 1000U);
  EXPECT_EQ(det::derive_seed(1, 5), det::derive_seed(1, 5));
}

class TensorCache : public ::testing::Test {
 protected:
  std::filesystem::path path_ = std::filesystem::temp_directory_path() / "gdof_tensor_cache_test.bin";
  void TearDown() override { std::filesystem::remove(path_); }
};

TEST_F(TensorCache, RoundTrip) {
  const det::BoundedDensitySampler s(77, det::CoefficientLaw::kUniformSymmetric);
  const auto t = det::CoefficientTensor::materialize(s, {2, 3, 2, 4});
  EXPECT_EQ(t.values().size(), 48U);
  EXPECT_EQ(t.at({1, 2, 1, 3}), s.draw({1, 2, 1, 3}));
  EXPECT_THROW((void)t.at({2, 0, 0, 0}), std::out_of_range);
  t.save(path_);
  const auto back = det::CoefficientTensor::load(path_);
  EXPECT_TRUE(back == t);
  EXPECT_EQ(back.seed(), 77U);
}

TEST_F(TensorCache, RejectsForeignAndTruncatedFiles) {
  {
    std::ofstream out(path_, std::ios::binary);
    out << "NOTACACHEFILE";
  }
  EXPECT_THROW((void)det::CoefficientTensor::load(path_), std::runtime_error);

  const auto t = det::CoefficientTensor::materialize(det::BoundedDensitySampler(1), {1, 1, 1, 8});
  t.save(path_);
  std::filesystem::resize_file(path_, std::filesystem::file_size(path_) - 8);
  EXPECT_THROW((void)det::CoefficientTensor::load(path_), std::runtime_error);
  EXPECT_THROW((void)det::CoefficientTensor::load(path_.string() + ".missing"), std::runtime_error);
}

// Independent evaluation of one received component.
std::int64_t received_oracle(const det::DetChannel& ch, int k, int n, int t, const det::InputMatrix& x,
                             const det::BoundedDensitySampler& s) {
  const double top = std::max(1.0, ch.alpha);
  const double pbar = std::sqrt(ch.P);
  std::int64_t y = 0;
  for (int j = 0; j < ch.K; ++j)
    for (int m = 0; m < ch.M; ++m) {
      const double keep = j == k ? 1.0 : ch.alpha;
      const auto div = static_cast<std::int64_t>(std::floor(std::pow(pbar, top - keep) + 1e-9));
      const double g = s.draw({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(t),
                               static_cast<std::uint32_t>(j * ch.M + m)});
      y += static_cast<std::int64_t>(std::trunc(g * static_cast<double>(x[j][m] / div)));
    }
  return y;
}

TEST(DetChannel, ReceivedSignalMatchesOracle) {
  const det::BoundedDensitySampler s(3);
  for (double alpha : {0.0, 0.5, 1.0, 1.5}) {
    const det::DetChannel ch{3, 2, 2, alpha, 256.0};
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::int64_t> sym(0, ch.input_cardinality() - 1);
    for (int rep = 0; rep < 50; ++rep) {
      det::InputMatrix x(3, std::vector<std::int64_t>(2));
      for (auto& row : x)
        for (auto& v : row) v = sym(rng);
      for (int k = 0; k < 3; ++k) {
        const auto y = det::synthesize_received(ch, k, rep, x, s);
        for (int n = 0; n < 2; ++n) EXPECT_EQ(y[n], received_oracle(ch, k, n, rep, x, s));
      }
    }
  }
}

TEST(DetChannel, ZeroAlphaHidesInterference) {
  const det::BoundedDensitySampler s(3);
  const det::DetChannel ch{2, 1, 1, 0.0, 256.0};
  const auto a = det::synthesize_received(ch, 0, 0, {{5}, {0}}, s);
  const auto b = det::synthesize_received(ch, 0, 0, {{5}, {15}}, s);
  EXPECT_EQ(a, b);
}

TEST(DetChannel, Errors) {
  const det::BoundedDensitySampler s(3);
  const det::DetChannel ch{2, 1, 1, 0.5, 256.0};
  EXPECT_THROW((void)det::synthesize_received(ch, 2, 0, {{1}, {1}}, s), std::out_of_range);
  EXPECT_THROW((void)det::synthesize_received(ch, 0, 0, {{16}, {1}}, s), std::out_of_range);
  EXPECT_THROW((void)det::synthesize_received(ch, 0, 0, {{1}}, s), std::invalid_argument);
  EXPECT_THROW((void)det::synthesize_received({1, 1, 1, 0.5, 256.0}, 0, 0, {{1}}, s), std::domain_error);
  EXPECT_DOUBLE_EQ(ch.output_magnitude_bound(2.0), 2 * 1 * 2.0 * 16);
}

}  // namespace
