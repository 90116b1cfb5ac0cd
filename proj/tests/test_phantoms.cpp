#include <gtest/gtest.h>

#include "rcaus/phantoms.hpp"
#include "rcaus/rng.hpp"

using namespace rcaus;

namespace {

CystPhantomSpec block(double density) {
  CystPhantomSpec s;
  s.density = density;
  s.region_min = {-2e-3, -2e-3, 3e-3};
  s.region_max = {2e-3, 2e-3, 7e-3};
  s.seed = 42;
  return s;
}

}  // namespace

// Reference blocks from the Random123 Philox4x64-10 implementation (as shipped in numpy).
TEST(Philox, KnownAnswers) {
  using B = Philox4x64::Block;
  EXPECT_EQ(Philox4x64::generate({0, 0, 0, 0}, {0, 0}),
            (B{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL}));
  EXPECT_EQ(Philox4x64::generate({10, 0, 0, 0}, {5, 7}),
            (B{0xe1c37989cca7c5c0ULL, 0xf9da13faca9f9900ULL, 0xa199c274b3093be9ULL, 0xfd01930a6c70ff79ULL}));
  EXPECT_EQ(Philox4x64::generate({11, 0, 0, 0}, {5, 7}),
            (B{0x3f4efd56dcf77d03ULL, 0xde42ac99b01e618aULL, 0xcd0f3f46e2eca096ULL, 0x35eb9647c563ab0eULL}));
  EXPECT_EQ(Philox4x64::generate({12, 0, 0, 0}, {5, 7}),
            (B{0x05743bb93a9810f8ULL, 0x77cf93bc8e325f26ULL, 0x5bc6af72c88de194ULL, 0xc15a39bd6370fb8fULL}));
}

TEST(Philox, StreamWalksCountersInOrder) {
  Philox4x64 rng(5, 7);
  for (int i = 0; i < 40; ++i) rng.next();
  EXPECT_EQ(rng.next(), 0xe1c37989cca7c5c0ULL);
  for (int i = 0; i < 3; ++i) rng.next();
  EXPECT_EQ(rng.next(), 0x3f4efd56dcf77d03ULL);
}

TEST(Philox, UniformAndNormalMoments) {
  Philox4x64 rng(3, 1);
  const int n = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0;
  double lo = 1, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    su += u;
    su2 += u * u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(su2 / n - 0.25, 1.0 / 12.0, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

TEST(Philox, KeysGiveIndependentStreams) {
  Philox4x64 a(1, 0), b(1, 1), c(2, 0);
  const auto x = a.next();
  EXPECT_NE(x, b.next());
  EXPECT_NE(x, c.next());
}

TEST(GridPhantom, SinglePointAtTheCenter) {
  GridPhantomSpec s;
  s.extents = {Extent{-1e-3, 1e-3}, Extent{0.5e-3, 0.5e-3}, Extent{4e-3, 4e-3}};
  s.spacing = {5e-3, 5e-3, 5e-3};
  const auto f = make_grid(s);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.positions[0], (Vec3{0.0, 0.5e-3, 4e-3}));
  EXPECT_EQ(f.amplitudes[0], 1.0);
}

TEST(GridPhantom, LatticeCountAndSpacing) {
  GridPhantomSpec s;
  s.extents = {Extent{-5e-3, 5e-3}, Extent{-5e-3, 5e-3}, Extent{5e-3, 15e-3}};
  s.spacing = {5e-3, 5e-3, 5e-3};
  s.amplitude = 2.0;
  const auto f = make_grid(s);
  ASSERT_EQ(f.size(), 27u);
  double closest = INFINITY, sx = 0, sy = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    sx += f.positions[i].x;
    sy += f.positions[i].y;
    EXPECT_EQ(f.amplitudes[i], 2.0);
    for (std::size_t j = 0; j < i; ++j) closest = std::min(closest, distance(f.positions[i], f.positions[j]));
  }
  EXPECT_NEAR(closest, 5e-3, 1e-15);
  EXPECT_NEAR(sx, 0.0, 1e-15);
  EXPECT_NEAR(sy, 0.0, 1e-15);
}

TEST(GridPhantom, PartialSpacingIsCentered) {
  GridPhantomSpec s;
  s.extents = {Extent{-3e-3, 4e-3}, Extent{0, 0}, Extent{8e-3, 8e-3}};
  s.spacing = {2e-3, 1e-3, 1e-3};
  const auto f = make_grid(s);
  ASSERT_EQ(f.size(), 4u);  // floor(7 / 2) + 1
  EXPECT_NEAR(f.positions.front().x, -2.5e-3, 1e-15);
  EXPECT_NEAR(f.positions.back().x, 3.5e-3, 1e-15);
}

TEST(GridPhantom, RejectsBadSpecs) {
  GridPhantomSpec s;
  s.extents = {Extent{-1e-3, 1e-3}, Extent{-1e-3, 1e-3}, Extent{1e-3, 2e-3}};
  s.spacing = {1e-3, 0.0, 1e-3};
  EXPECT_THROW(make_grid(s), std::invalid_argument);
  s.spacing = {1e-3, 1e-3, 1e-3};
  s.extents[0] = Extent{1e-3, -1e-3};
  EXPECT_THROW(make_grid(s), std::invalid_argument);
  s.extents[0] = Extent{-1e-3, 1e-3};
  s.extents[2] = Extent{0.0, 1e-3};
  EXPECT_THROW(make_grid(s), std::invalid_argument);
}

TEST(CystPhantom, PlainBlockHasExpectedCount) {
  const auto p = make_cyst(block(1e11));  // 64 mm^3 -> 6400 scatterers
  EXPECT_EQ(p.field.size(), 6400u);
  EXPECT_TRUE(p.warnings.empty());
  for (const Vec3& q : p.field.positions) {
    ASSERT_GE(q.x, -2e-3);
    ASSERT_LT(q.x, 2e-3);
    ASSERT_GE(q.z, 3e-3);
    ASSERT_LT(q.z, 7e-3);
  }
}

TEST(CystPhantom, SpheresAreEmptied) {
  auto s = block(2e11);
  s.spheres = {{{0, 0, 5e-3}, 1e-3}, {{1.2e-3, 1.2e-3, 4e-3}, 0.6e-3}};
  const auto p = make_cyst(s);
  for (const Vec3& q : p.field.positions)
    for (const auto& sph : s.spheres) ASSERT_GE(distance(q, sph.center), sph.radius);
  const double kept_fraction = double(p.field.size()) / 12800.0;
  const double expected = 1.0 - (4.0 / 3.0 * kPi * (1e-9 + 0.216e-9)) / 64e-9;
  EXPECT_NEAR(kept_fraction, expected, 0.02);
}

TEST(CystPhantom, SphereCoveringTheRegionLeavesNothing) {
  auto s = block(1e11);
  s.spheres = {{{0, 0, 5e-3}, 5e-3}};
  EXPECT_TRUE(make_cyst(s).field.empty());
}

TEST(CystPhantom, SameSeedSameField) {
  auto s = block(5e10);
  s.spheres = {{{0, 0, 5e-3}, 1e-3}};
  EXPECT_EQ(make_cyst(s).field, make_cyst(s).field);
  auto other = s;
  other.stream = 1;
  EXPECT_NE(make_cyst(other).field, make_cyst(s).field);
}

TEST(CystPhantom, FirstScattererFollowsTheGeneratorOrder) {
  const auto s = block(1e11);
  Philox4x64 rng(s.seed, s.stream);
  const double x = -2e-3 + 4e-3 * rng.uniform();
  const double y = -2e-3 + 4e-3 * rng.uniform();
  const double z = 3e-3 + 4e-3 * rng.uniform();
  const double a = rng.normal();
  const auto f = make_cyst(s).field;
  EXPECT_DOUBLE_EQ(f.positions[0].x, x);
  EXPECT_DOUBLE_EQ(f.positions[0].y, y);
  EXPECT_DOUBLE_EQ(f.positions[0].z, z);
  EXPECT_EQ(f.amplitudes[0], a);
}

TEST(CystPhantom, AmplitudesAreStandardNormal) {
  auto s = block(2e12);  // 128000 scatterers
  const auto f = make_cyst(s).field;
  ASSERT_GE(f.size(), 100000u);
  double m = 0, v = 0;
  for (double a : f.amplitudes) m += a;
  m /= double(f.size());
  for (double a : f.amplitudes) v += (a - m) * (a - m);
  v /= double(f.size() - 1);
  EXPECT_LT(std::abs(m), 0.05);
  EXPECT_NEAR(v, 1.0, 0.05);
}

TEST(CystPhantom, SparseSpheresWarn) {
  auto s = block(1e10);
  s.spheres = {{{0, 0, 5e-3}, 1e-3}};  // ~42 scatterers displaced
  const auto p = make_cyst(s);
  ASSERT_EQ(p.warnings.size(), 1u);
}

TEST(CystPhantom, RejectsBadSpecs) {
  auto s = block(0.0);
  EXPECT_THROW(make_cyst(s), std::invalid_argument);
  s = block(1e10);
  s.spheres = {{{0, 0, 5e-3}, -1e-3}};
  EXPECT_THROW(make_cyst(s), std::invalid_argument);
  s = block(1e10);
  s.region_min.z = 0.0;
  EXPECT_THROW(make_cyst(s), std::invalid_argument);
}
