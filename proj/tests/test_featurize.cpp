#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "syncoord/featurize.hpp"

using namespace syncoord;
using std::numbers::pi;

TEST(Rbf, UnitAtCenters) {
  const int count = 16;
  const double d_max = 5.0;
  for (int k = 0; k < count; ++k) {
    const auto v = rbf(k * d_max / (count - 1), count, d_max);
    EXPECT_DOUBLE_EQ(v[k], 1.0);
  }
  EXPECT_DOUBLE_EQ(rbf(0.0, 8, 5.0)[0], 1.0);
}

TEST(Rbf, SymmetricExample) {
  const auto v = rbf(1.5, 4, 3.0);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_NEAR(v[0], std::exp(-1.125), 1e-15);
  EXPECT_NEAR(v[1], std::exp(-0.125), 1e-15);
  EXPECT_NEAR(v[2], std::exp(-0.125), 1e-15);
  EXPECT_NEAR(v[3], std::exp(-1.125), 1e-15);
}

TEST(Rbf, RejectsSingleCenter) { EXPECT_THROW(rbf(1.0, 1, 1.0), Error); }

TEST(Abf, Values) {
  for (double a : {0.0, 0.3, 2.0, pi}) EXPECT_DOUBLE_EQ(abf(a, 1)[0], 1.0);
  EXPECT_DOUBLE_EQ(abf(pi, 2)[1], -1.0);
  const auto v = abf(pi / 3, 3);
  EXPECT_NEAR(v[0], 1.0, 1e-12);
  EXPECT_NEAR(v[1], 0.5, 1e-12);
  EXPECT_NEAR(v[2], -0.5, 1e-12);
}

TEST(Layout, DistanceWidths) {
  FeaturizeConfig cfg;
  const auto bounds = distance_layout(cfg, CoordSources::only_bounds());
  ASSERT_EQ(bounds.size(), 2u);
  EXPECT_EQ(bounds[0].width, 8);
  EXPECT_EQ(bounds[1].width, 8);
  EXPECT_EQ(total_width(bounds), 16);
  EXPECT_EQ(total_width(distance_layout(cfg, CoordSources::only_sppr())), 16);
  EXPECT_EQ(total_width(distance_layout(cfg, CoordSources::both())), 32);
}

TEST(Layout, AngleWidths) {
  FeaturizeConfig cfg;
  const auto cmm = angle_layout(cfg, CoordSources::only_bounds());
  ASSERT_EQ(cmm.size(), 3u);
  for (const auto& b : cmm) EXPECT_EQ(b.width, 6);
  EXPECT_EQ(cmm[0].name, "abf_center");
  EXPECT_EQ(cmm[1].name, "abf_min");
  EXPECT_EQ(cmm[2].name, "abf_max");
  cfg.angle_mode = AngleMode::MIN_MAX;
  const auto mm = angle_layout(cfg, CoordSources::only_bounds());
  ASSERT_EQ(mm.size(), 2u);
  for (const auto& b : mm) EXPECT_EQ(b.width, 9);
  cfg.angle_mode = AngleMode::CENTER;
  EXPECT_EQ(total_width(angle_layout(cfg, CoordSources::both())), 36);
}

TEST(Blocks, WidthsMatchLayouts) {
  FeaturizeConfig cfg;
  PairDistances p{DistanceInterval{1.0, 1.2, 1}, 0.4};
  TripletAngles t{AngleBounds{1.8, 1.9, 2.0}, 1.2};
  for (auto s : {CoordSources::only_bounds(), CoordSources::only_sppr(), CoordSources::both()}) {
    EXPECT_EQ(static_cast<int>(distance_block(s, p, cfg).size()), total_width(distance_layout(cfg, s)));
    EXPECT_EQ(static_cast<int>(angle_block(s, t, cfg).size()), total_width(angle_layout(cfg, s)));
  }
}

TEST(Blocks, ZeroWidthBoundsGiveIdenticalHalves) {
  FeaturizeConfig cfg;
  const auto v = distance_block(CoordSources::only_bounds(), {DistanceInterval{1.3, 1.3, 1}, std::nullopt}, cfg);
  ASSERT_EQ(v.size(), 16u);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(v[i], v[i + 8]);

  const auto a = angle_block(CoordSources::only_bounds(), {AngleBounds{1.1, 1.1, 1.1}, std::nullopt}, cfg);
  ASSERT_EQ(a.size(), 18u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(a[i], a[i + 6]);
    EXPECT_EQ(a[i], a[i + 12]);
  }
}

TEST(Blocks, ComponentOrderFollowsMode) {
  FeaturizeConfig cfg;
  cfg.n_abf = 3;
  const auto a = angle_block(CoordSources::only_bounds(), {AngleBounds{0.5, 1.0, 1.5}, std::nullopt}, cfg);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a[0], 1.0);  // each block has one component: cos(0)
  cfg.n_abf = 6;
  const auto b = angle_block(CoordSources::only_bounds(), {AngleBounds{0.5, 1.0, 1.5}, std::nullopt}, cfg);
  EXPECT_DOUBLE_EQ(b[1], std::cos(1.0));
  EXPECT_DOUBLE_EQ(b[3], std::cos(0.5));
  EXPECT_DOUBLE_EQ(b[5], std::cos(1.5));
}

TEST(Blocks, MissingSourceData) {
  FeaturizeConfig cfg;
  EXPECT_THROW(distance_block(CoordSources::both(), {std::nullopt, 0.3}, cfg), Error);
  EXPECT_THROW(angle_block(CoordSources::both(), {AngleBounds{}, std::nullopt}, cfg), Error);
}

TEST(Config, Validation) {
  FeaturizeConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.n_rbf = 7;
  EXPECT_THROW(cfg.validate(CoordSources::only_bounds()), Error);
  EXPECT_NO_THROW(cfg.validate(CoordSources::only_sppr()));
  cfg = {};
  cfg.n_abf = 10;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.angle_mode = AngleMode::MIN_MAX;
  EXPECT_NO_THROW(cfg.validate());
  cfg.d_max_sppr = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Names, RoundTrip) {
  for (AngleMode m : {AngleMode::CENTER, AngleMode::MIN, AngleMode::MAX, AngleMode::MIN_MAX, AngleMode::CENTER_MIN_MAX})
    EXPECT_EQ(angle_mode_from_string(to_string(m)), m);
  EXPECT_FALSE(angle_mode_from_string("bogus").has_value());
  for (auto s : {CoordSources::only_bounds(), CoordSources::only_sppr(), CoordSources::both()})
    EXPECT_EQ(coord_sources_from_string(to_string(s)), s);
}
