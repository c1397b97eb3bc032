#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bvdeg/cantor.hpp"
#include "bvdeg/errors.hpp"
#include "bvdeg/gallery.hpp"
#include "bvdeg/variation.hpp"
#include "oracles.hpp"

using namespace bvdeg;

namespace {

GallerySpec spec(const std::string& name) {
  GallerySpec s;
  s.name = name;
  return s;
}

// Smallest distance between images of n random domain points.
double min_image_separation(const GalleryMap& g, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::array<double, 3>> img(n);
  std::array<double, 3> x{}, y{};
  for (auto& p : img) {
    for (int d = 0; d < g.dim_in; ++d) {
      x[d] = std::uniform_real_distribution<double>(g.lo[d], g.hi[d])(rng);
    }
    g.eval(std::span<const double>(x.data(), g.dim_in), std::span<double>(y.data(), g.dim_out));
    p = y;
  }
  std::sort(img.begin(), img.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && img[j][0] - img[i][0] < 1e-9; ++j) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) d2 += (img[j][c] - img[i][c]) * (img[j][c] - img[i][c]);
      best = std::min(best, std::sqrt(d2));
    }
  }
  return best;
}

}  // namespace

TEST(Cantor, LevelZeroIsIdentity) {
  for (double x : {0.0, 0.1, 0.5, 0.77, 1.0}) EXPECT_DOUBLE_EQ(cantor_value(0, x), x);
}

TEST(Cantor, MiddleThirdIsFlat) {
  for (int level = 1; level <= 10; ++level) {
    EXPECT_DOUBLE_EQ(cantor_value(level, 0.5), 0.5);
    EXPECT_NEAR(cantor_value(level, 1.0 / 3.0), 0.5, 1e-15);
    EXPECT_NEAR(cantor_value(level, 2.0 / 3.0), 0.5, 1e-15);
  }
}

TEST(Cantor, MatchesKnotConstruction) {
  for (int level : {1, 3, 6, 8}) {
    const oracle::CantorKnots knots(level);
    for (int i = 0; i <= 5000; ++i) {
      const double x = i / 5000.0;
      ASSERT_NEAR(cantor_value(level, x), knots.value(x), 1e-13) << "level " << level << " x " << x;
    }
  }
}

TEST(Cantor, UnitVariationAtEveryLevel) {
  for (int level : {0, 2, 5, 8}) {
    const std::size_t n = static_cast<std::size_t>(std::pow(3, std::min(level, 8))) + 1;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = cantor_value(level, static_cast<double>(i) / static_cast<double>(n - 1));
    EXPECT_NEAR(tv_1d(s), 1.0, 1e-15);
  }
}

TEST(Cantor, UniformConvergence) {
  for (int level = 0; level < 10; ++level) {
    double worst = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double x = i / 20000.0;
      worst = std::max(worst, std::abs(cantor_value(level + 1, x) - cantor_value(level, x)));
    }
    EXPECT_LE(worst, std::pow(2.0, -level - 1) + 1e-15) << level;
  }
}

TEST(Cantor, ShearInverse) {
  std::mt19937_64 rng(7);
  for (int level : {0, 4, 6, 9}) {
    for (int i = 0; i < 2000; ++i) {
      const double x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      EXPECT_NEAR(cantor_shear_inverse(level, cantor_shear(level, x)), x, 1e-12);
    }
  }
}

TEST(Gallery, CantorShearFormAndInverse) {
  auto s = spec("cantor_shear3d");
  s.level = 5;
  const auto g = make_gallery(s);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const oracle::CantorKnots knots(5);
  for (int i = 0; i < 10000; ++i) {
    const double x[3] = {u(rng), u(rng), u(rng)};
    double y[3], back[3];
    g.eval(x, y);
    EXPECT_NEAR(y[0], knots.shear(x[0]), 1e-13);
    EXPECT_EQ(y[1], x[1]);
    EXPECT_EQ(y[2], x[2]);
    g.inverse(y, back);
    for (int d = 0; d < 3; ++d) EXPECT_NEAR(back[d], x[d], 1e-12);
  }
  const double corner[3] = {1.0, 1.0, 1.0};
  double img[3];
  g.eval(corner, img);
  EXPECT_DOUBLE_EQ(img[0], 2.0);
}

TEST(Gallery, ZpowDoublesAngleAndKeepsRadius) {
  const auto g = make_gallery(spec("zpow"));
  const double x[2] = {0.3 * std::cos(0.4), 0.3 * std::sin(0.4)};
  double y[2];
  g.eval(x, y);
  EXPECT_NEAR(std::hypot(y[0], y[1]), 0.3, 1e-15);
  EXPECT_NEAR(std::atan2(y[1], y[0]), 0.8, 1e-14);
  EXPECT_THROW(make_gallery([] {
                 auto s = spec("zpow");
                 s.k = 0;
                 return s;
               }()),
               RangeError);
}

TEST(Gallery, IdentityAdjugateOracle) {
  EXPECT_DOUBLE_EQ(bvdeg::oracle(spec("identity3d"), "adj_total_variation"), 3.0);
}

TEST(Gallery, RejectsBadSpecs) {
  EXPECT_THROW(make_gallery(spec("torus")), RangeError);
  auto s = spec("linear");
  s.matrix = {1, 2, 2, 4};
  EXPECT_THROW(make_gallery(s), RangeError);
  s.matrix = {1, 2, 3};
  EXPECT_THROW(make_gallery(s), RangeError);
  auto c = spec("cantor_shear3d");
  c.level = -1;
  EXPECT_THROW(make_gallery(c), RangeError);
  EXPECT_THROW(bvdeg::oracle(spec("zpow"), "adj_total_variation"), RangeError);
}

TEST(Gallery, OraclesAgainstClosedForms) {
  auto c = spec("cantor_shear3d");
  EXPECT_DOUBLE_EQ(bvdeg::oracle(c, "adj_total_variation"), 5.0);
  EXPECT_DOUBLE_EQ(bvdeg::oracle(c, "mu_total"), 5.0);
  EXPECT_DOUBLE_EQ(bvdeg::oracle(c, "inverse_tv_total"), 5.0);
  EXPECT_DOUBLE_EQ(bvdeg::oracle(c, "pointwise_adj_total"), 3.0);
  const auto table = oracle_adjugate_table(c);
  const double expected[3][3] = {{1, 0, 0}, {0, 2, 0}, {0, 0, 2}};
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(table[k][j], expected[k][j]);

  auto lin = spec("linear");
  lin.matrix = {1, 0, 0, 0, 2, 0, 0, 0, 3};
  EXPECT_DOUBLE_EQ(bvdeg::oracle(lin, "adj_total_variation"), 11.0);
  const auto mu = oracle_mu_per_axis(lin);
  EXPECT_DOUBLE_EQ(mu[0], 6.0);
  EXPECT_DOUBLE_EQ(mu[1], 3.0);
  EXPECT_DOUBLE_EQ(mu[2], 2.0);

  for (int k : {1, 2, 3, -1}) {
    auto z = spec("zpow");
    z.k = k;
    EXPECT_NEAR(bvdeg::oracle(z, "jacobian_mass_disk", 0.8), k * std::numbers::pi * 0.64, 1e-12);
  }
  EXPECT_NEAR(bvdeg::oracle(spec("zpow"), "jacobian_mass_disk", 1.0), 2.0 * std::numbers::pi, 1e-12);
  EXPECT_THROW(bvdeg::oracle(spec("zpow"), "jacobian_mass_disk"), RangeError);
  EXPECT_DOUBLE_EQ(bvdeg::oracle(spec("cantor1d"), "tv"), 1.0);
}

TEST(Gallery, HomeomorphismsInjectiveOnMillionPoints) {
  auto lin = spec("linear");
  lin.matrix = {1, 0.5, 0, 0, 2, 0, 0.25, 0, 3};
  auto c = spec("cantor_shear3d");
  c.level = 8;
  auto z1 = spec("zpow");
  z1.k = 1;
  for (const auto& s : {c, spec("identity3d"), lin, spec("shear2d"), spec("radial_stretch"), z1}) {
    EXPECT_GT(min_image_separation(make_gallery(s), 1000000, 11), 1e-12) << s.name;
  }
}

TEST(Gallery, JsonRoundTrip) {
  auto s = spec("cantor_shear3d");
  s.level = 7;
  const auto back = gallery_spec_from_json(to_json(s));
  EXPECT_EQ(back.name, s.name);
  EXPECT_EQ(back.level, 7);
  auto lin = spec("linear");
  lin.matrix = {0, 1, 1, 0};
  EXPECT_EQ(gallery_spec_from_json(to_json(lin)).matrix, lin.matrix);
}

TEST(Gallery, SampleShapeMustMatch) {
  const std::size_t shape[2] = {5, 5};
  EXPECT_THROW(sample_gallery(spec("identity3d"), shape), RangeError);
  const auto f = sample_gallery(spec("zpow"), shape);
  EXPECT_DOUBLE_EQ(f.grid().origin[0], -1.0);
  EXPECT_DOUBLE_EQ(f.grid().upper(1), 1.0);
}
