#include <gtest/gtest.h>

#include <random>

#include "rcaus/encoding.hpp"
#include "rcaus/rng.hpp"
#include "support.hpp"

using namespace rcaus;

namespace {

ApertureData<double> random_patch(std::size_t R, std::size_t C, std::size_t T, unsigned seed) {
  ApertureData<double> s;
  s.samples = test::random_array<double>(R, C, T, seed);
  s.sample_rate = 50e6;
  s.t0 = 1e-6;
  return s;
}

// Naive inverse: s[r] = (1/E) sum_e H[r][e] g[e], computed straight from the
// definition with no transform or slab tricks.
Array3<double> naive_decode(const Array3<double>& g, const EncodingMatrix& H) {
  const std::size_t E = H.events();
  Array3<double> s(E, g.dim(1), g.dim(2));
  for (std::size_t r = 0; r < E; ++r)
    for (std::size_t c = 0; c < g.dim(1); ++c)
      for (std::size_t t = 0; t < g.dim(2); ++t) {
        double acc = 0.0;
        for (std::size_t e = 0; e < E; ++e) acc += H(r, e) * g(e, c, t);
        s(r, c, t) = acc / static_cast<double>(E);
      }
  return s;
}

// Hadamard but not in natural Sylvester order: rows of H_n permuted and one row negated.
EncodingMatrix scrambled(std::size_t n) {
  const auto H = hadamard(n);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = (i * 3 + 1) % n;
  std::vector<std::int8_t> v(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t e = 0; e < n; ++e) v[r * n + e] = static_cast<std::int8_t>((r == 0 ? -1 : 1) * H(perm[r], e));
  return EncodingMatrix(n, n, std::move(v));
}

}  // namespace

TEST(Hadamard, OrthogonalForEveryPowerOfTwo) {
  for (std::size_t n = 1; n <= 128; n *= 2) {
    const auto H = hadamard(n);
    EXPECT_TRUE(H.is_hadamard()) << n;
    EXPECT_TRUE(H.is_sylvester()) << n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        long dot = 0;
        for (std::size_t e = 0; e < n; ++e) dot += H(i, e) * H(j, e);
        ASSERT_EQ(dot, i == j ? static_cast<long>(n) : 0L);
      }
  }
}

TEST(Hadamard, RejectsOrdersThatAreNotPowersOfTwo) {
  EXPECT_THROW(hadamard(0), std::invalid_argument);
  EXPECT_THROW(hadamard(12), std::invalid_argument);
  EXPECT_THROW(hadamard(96), std::invalid_argument);
}

TEST(Hadamard, MatrixConstructorChecksEntries) {
  EXPECT_THROW(EncodingMatrix(2, 2, {1, 1, 1, 0}), std::invalid_argument);
  EXPECT_THROW(EncodingMatrix(2, 2, {1, 1, 1}), std::invalid_argument);
  EXPECT_FALSE(EncodingMatrix(2, 2, {1, 1, 1, 1}).is_hadamard());
  EXPECT_FALSE(EncodingMatrix(2, 4, {1, 1, 1, 1, 1, -1, 1, -1}).is_hadamard());
}

TEST(Hadamard, BiasSquaredIsConstant) {
  const auto H = hadamard(32);
  for (std::size_t e = 0; e < H.events(); ++e) {
    const auto b = bias_schedule(H, e);
    ASSERT_EQ(b.size(), 32u);
    for (int v : b) ASSERT_EQ(v * v, 1);
  }
  EXPECT_THROW(bias_schedule(H, 32), std::out_of_range);
}

TEST(Hero, RoundTripIsExactToRounding) {
  const auto s = random_patch(16, 16, 64, 1);
  const auto H = hadamard(16);
  const auto g = hero_encode(s, H);
  EXPECT_EQ(g.event_count(), 16u);
  EXPECT_EQ(g.t0, s.t0);
  const auto back = hero_decode(g, H);
  double worst = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    worst = std::max(worst, std::abs(back.samples.flat()[i] - s.samples.flat()[i]));
    peak = std::max(peak, std::abs(s.samples.flat()[i]));
  }
  EXPECT_LE(worst / peak, 1e-12);
}

TEST(Hero, FastTransformMatchesNaiveDecode) {
  const auto H = hadamard(32);
  EventChannelData<double> g;
  g.samples = test::random_array<double>(32, 5, 40, 2);
  g.sample_rate = 1.0;
  const auto fast = hero_decode(g, H);
  const auto slow = naive_decode(g.samples, H);
  for (std::size_t i = 0; i < slow.size(); ++i) ASSERT_NEAR(fast.samples.flat()[i], slow.flat()[i], 1e-13);
}

TEST(Hero, DensePathHandlesNonSylvesterCodes) {
  const auto H = scrambled(16);
  ASSERT_TRUE(H.is_hadamard());
  ASSERT_FALSE(H.is_sylvester());
  const auto s = random_patch(16, 3, 20, 3);
  const auto back = hero_decode(hero_encode(s, H), H);
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    ASSERT_NEAR(back.samples.flat()[i], s.samples.flat()[i], 1e-12);
}

TEST(Hero, DecodesStackedSetsIndependently) {
  const auto H = hadamard(8);
  const auto a = random_patch(8, 4, 16, 4);
  const auto b = random_patch(8, 4, 16, 5);
  const auto ga = hero_encode(a, H), gb = hero_encode(b, H);
  EventChannelData<double> both;
  both.samples = Array3<double>(16, 4, 16);
  std::copy(ga.samples.flat().begin(), ga.samples.flat().end(), both.samples.flat().begin());
  std::copy(gb.samples.flat().begin(), gb.samples.flat().end(), both.samples.flat().begin() + 8 * 4 * 16);
  const auto d = hero_decode(both, H);
  ASSERT_EQ(d.row_count(), 16u);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    ASSERT_NEAR(d.samples.flat()[i], a.samples.flat()[i], 1e-12);
    ASSERT_NEAR(d.samples.flat()[i + a.samples.size()], b.samples.flat()[i], 1e-12);
  }
}

TEST(Hero, ComplexDataDecodes) {
  ApertureData<cplx> s;
  s.samples = test::random_array<cplx>(4, 3, 10, 6);
  s.carrier = 6.25e6;
  const auto H = hadamard(4);
  const auto back = hero_decode(hero_encode(s, H), H);
  EXPECT_EQ(back.carrier, 6.25e6);
  for (std::size_t i = 0; i < s.samples.size(); ++i) ASSERT_LT(std::abs(back.samples.flat()[i] - s.samples.flat()[i]), 1e-12);
}

TEST(Hero, ResultDoesNotDependOnThreadCount) {
  const auto H = hadamard(16);
  EventChannelData<double> g;
  g.samples = test::random_array<double>(32, 7, 33, 7);
  const auto one = hero_decode(g, H, 1);
  const auto three = hero_decode(g, H, 3);
  EXPECT_EQ(one.samples, three.samples);
}

TEST(Hero, RejectsMismatchedInputs) {
  const auto H = hadamard(8);
  EventChannelData<double> g;
  g.samples = Array3<double>(12, 2, 4);
  EXPECT_THROW(hero_decode(g, H), std::invalid_argument);
  EXPECT_THROW(hero_encode(random_patch(4, 2, 2, 8), H), std::invalid_argument);
  EXPECT_THROW(hero_decode(g, EncodingMatrix(2, 2, {1, 1, 1, 1})), std::invalid_argument);
}

TEST(Hero, DecodingAveragesIndependentNoise) {
  // Per-event white noise of variance sigma^2 decodes to sigma^2 / E per channel.
  const std::size_t E = 32, C = 4, T = 400;
  const double sigma = 0.7;
  Philox4x64 rng(11, 0);
  EventChannelData<double> g;
  g.samples = Array3<double>(E, C, T);
  for (auto& v : g.samples.flat()) v = sigma * rng.normal();
  const auto s = hero_decode(g, hadamard(E));
  double sum = 0.0, sq = 0.0;
  for (double v : s.samples.flat()) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(s.samples.size());
  const double var = (sq - sum * sum / n) / (n - 1);
  EXPECT_NEAR(var / (sigma * sigma / E), 1.0, 0.1);
}
