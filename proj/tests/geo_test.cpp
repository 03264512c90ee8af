#include <gtest/gtest.h>

#include <random>

#include "sostutor/geo.hpp"
#include "support/oracles.hpp"

using namespace sostutor;
using namespace sostutor::geo;

TEST(Distance, IdenticalPointsAreZero) {
  const GeoPoint p{-25.2637, -57.5759};
  EXPECT_EQ(distance_meters(p, p), 0.0);
}

TEST(Distance, EquatorialOffsetJustOver500) {
  const double d = distance_meters({0.0, 0.0}, {0.0045, 0.0});
  EXPECT_NEAR(d, 0.0045 * std::numbers::pi * kEarthRadiusM / 180.0, 1e-6);
  EXPECT_NEAR(d, oracle::chord_distance_m({0.0, 0.0}, {0.0045, 0.0}), 1e-6);
  EXPECT_NEAR(d, 500.38, 0.01);
}

TEST(Distance, AsuncionEastwardHundredthDegree) {
  const GeoPoint a{-25.2637, -57.5759}, b{-25.2637, -57.5659};
  const double d = distance_meters(a, b);
  EXPECT_NEAR(d, oracle::chord_distance_m(a, b), 1e-6);
  const double small_angle = 0.01 * 111194.93 * std::cos(25.2637 * std::numbers::pi / 180.0);
  EXPECT_NEAR(d, small_angle, 0.1);
  EXPECT_NEAR(d, 1005.59, 0.01);
}

TEST(Distance, SymmetricAndTriangleOnSamples) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lat(-89, 89), lon(-179, 179);
  for (int i = 0; i < 5000; ++i) {
    const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
    ASSERT_EQ(distance_meters(a, b), distance_meters(b, a));
    const double ab = distance_meters(a, b), bc = distance_meters(b, c), ac = distance_meters(a, c);
    ASSERT_LE(ac, (ab + bc) * (1 + 1e-6));
    ASSERT_NEAR(ab, oracle::chord_distance_m(a, b), 1e-6 * std::max(1.0, ab));
  }
}

TEST(Proximity, ThresholdIsStrict) {
  EXPECT_EQ(classify_proximity(0.0), ProximityClass::near);
  EXPECT_EQ(classify_proximity(500.0), ProximityClass::near);
  EXPECT_EQ(classify_proximity(std::nextafter(500.0, 1e9)), ProximityClass::far);
  EXPECT_EQ(classify_proximity(distance_meters({0.0, 0.0}, {0.0045, 0.0})), ProximityClass::far);
}

TEST(Proximity, Monotone) {
  bool seen_far = false;
  for (int i = 0; i <= 20000; ++i) {
    const auto c = classify_proximity(i * 0.05);
    if (seen_far) {
      ASSERT_EQ(c, ProximityClass::far);
    }
    seen_far = seen_far || c == ProximityClass::far;
  }
  EXPECT_TRUE(seen_far);
}
