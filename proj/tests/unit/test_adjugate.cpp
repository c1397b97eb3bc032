#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bvdeg/adjugate.hpp"
#include "bvdeg/cantor.hpp"
#include "bvdeg/errors.hpp"
#include "bvdeg/gallery.hpp"
#include "bvdeg/inversion.hpp"
#include "oracles.hpp"

using namespace bvdeg;

namespace {

GallerySpec spec(const std::string& name, std::vector<double> matrix = {}) {
  GallerySpec s;
  s.name = name;
  s.matrix = std::move(matrix);
  return s;
}

SampledMap sample(const GallerySpec& s, std::vector<std::size_t> shape) { return sample_gallery(s, shape); }

AdjugateConfig quick(int slices = 9) {
  AdjugateConfig c;
  c.n_slices = slices;
  c.depth = 2;
  c.raster = 32;
  return c;
}

}  // namespace

TEST(Adjugate, Identity) {
  const auto t = distributional_adjugate(sample(spec("identity3d"), {17, 17, 17}), quick());
  for (int k = 1; k <= 3; ++k)
    for (int j = 1; j <= 3; ++j) EXPECT_NEAR(t.entry(k, j), k == j ? 1.0 : 0.0, 0.03) << k << j;
  EXPECT_NEAR(t.total, 3.0, 0.09);
  EXPECT_TRUE(t.skipped.empty());
  EXPECT_EQ(t.slice_ts[0].size(), 9u);
}

TEST(Adjugate, DiagonalLinear) {
  const auto t = distributional_adjugate(sample(spec("linear", {1, 0, 0, 0, 2, 0, 0, 0, 3}), {17, 17, 17}), quick());
  EXPECT_NEAR(t.entry(1, 1), 6.0, 0.18);
  EXPECT_NEAR(t.entry(2, 2), 3.0, 0.09);
  EXPECT_NEAR(t.entry(3, 3), 2.0, 0.06);
  EXPECT_NEAR(t.total, 11.0, 0.33);
}

TEST(Adjugate, CantorShearEntries) {
  auto s = spec("cantor_shear3d");
  const auto t = distributional_adjugate(sample(s, {82, 41, 41}), quick(17));
  const auto want = oracle_adjugate_table(s);
  for (int k = 1; k <= 3; ++k)
    for (int j = 1; j <= 3; ++j) {
      const double w = want[k - 1][j - 1];
      EXPECT_NEAR(t.entry(k, j), w, w == 0.0 ? 0.02 : 0.03 * w) << k << j;
    }
  EXPECT_NEAR(t.total, 5.0, 0.15);
  for (const auto& row : t.entries)
    for (const auto& e : row)
      for (double m : e.slice_masses) EXPECT_GE(m, 0.0);
}

TEST(Adjugate, RejectsNonInjectiveSamples) {
  const std::size_t shape[3] = {9, 9, 9};
  const double lo[3] = {0, 0, 0}, hi[3] = {1, 1, 1};
  const auto fold = SampledMap::sample(Grid::spanning(shape, lo, hi), 3, [](auto x, auto y) {
    y[0] = std::abs(x[0] - 0.5);
    y[1] = x[1];
    y[2] = x[2];
  });
  EXPECT_THROW(check_injective_samples(fold, 2000), NonInjective);
  EXPECT_THROW(distributional_adjugate(fold, quick()), NonInjective);
  AdjugateConfig few = quick();
  few.n_slices = 4;
  EXPECT_THROW(distributional_adjugate(sample(spec("identity3d"), {9, 9, 9}), few), RangeError);
}

TEST(MuMeasure, Examples) {
  const auto id = mu_measure(sample(spec("identity3d"), {17, 17, 17}), quick());
  for (double a : id.per_axis) EXPECT_NEAR(a, 1.0, 0.03);
  EXPECT_NEAR(id.total, 3.0, 0.09);
  const auto c = mu_measure(sample(spec("cantor_shear3d"), {82, 41, 41}), quick());
  EXPECT_NEAR(c.per_axis[0], 1.0, 0.04);
  EXPECT_NEAR(c.per_axis[1], 2.0, 0.08);
  EXPECT_NEAR(c.per_axis[2], 2.0, 0.08);
  EXPECT_NEAR(c.total, 5.0, 0.2);
  const auto l = mu_measure(sample(spec("linear", {1, 0, 0, 0, 2, 0, 0, 0, 3}), {17, 17, 17}), quick());
  EXPECT_NEAR(l.per_axis[0], 6.0, 0.24);
  EXPECT_NEAR(l.per_axis[1], 3.0, 0.12);
  EXPECT_NEAR(l.per_axis[2], 2.0, 0.08);
}

TEST(Inversion, IdentityAndLinear) {
  const std::size_t image[3] = {21, 21, 21};
  const auto id = invert_homeomorphism(sample(spec("identity3d"), {11, 11, 11}), image);
  EXPECT_EQ(id.defined_fraction, 1.0);
  const auto& g = id.map.grid();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto idx = g.unravel(n);
    for (int d = 0; d < 3; ++d) ASSERT_NEAR(id.map.value(n, d), g.coord(d, idx[d]), 1e-9);
  }
  const std::vector<double> a{2, 1, 0, 0, 1, 0, 0, 0.5, 1.5};
  const auto lin = invert_homeomorphism(sample(spec("linear", a), {11, 11, 11}), image);
  const auto& lg = lin.map.grid();
  std::size_t checked = 0;
  for (std::size_t n = 0; n < lg.size(); ++n) {
    if (!lin.defined[n]) continue;
    const auto idx = lg.unravel(n);
    const double y[3] = {lg.coord(0, idx[0]), lg.coord(1, idx[1]), lg.coord(2, idx[2])};
    // A^{-1} y for this upper-triangular-by-blocks matrix.
    const double x1 = y[1];
    const double x0 = (y[0] - x1) / 2.0;
    const double x2 = (y[2] - 0.5 * x1) / 1.5;
    ASSERT_NEAR(lin.map.value(n, 0), x0, 1e-8);
    ASSERT_NEAR(lin.map.value(n, 1), x1, 1e-8);
    ASSERT_NEAR(lin.map.value(n, 2), x2, 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, lg.size() / 4);
}

TEST(Inversion, CantorFirstCoordinate) {
  const int level = 6;
  auto s = spec("cantor_shear3d");
  s.level = level;
  const auto f = sample(s, {730, 3, 3});  // nodes on every knot
  const std::size_t image[3] = {301, 3, 3};
  const auto inv = invert_homeomorphism(f, image);
  const oracle::CantorKnots knots(level);
  const auto& g = inv.map.grid();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto idx = g.unravel(n);
    if (idx[0] == 0 || idx[0] + 1 == g.shape[0] || !inv.defined[n]) continue;
    ASSERT_NEAR(inv.map.value(n, 0), knots.shear_inverse(g.coord(0, idx[0])), 1e-6);
  }
}

TEST(InverseVariation, Examples) {
  const std::size_t image[3] = {33, 33, 33};
  const auto id = inverse_variation(invert_homeomorphism(sample(spec("identity3d"), {17, 17, 17}), image));
  for (double v : id.per_coordinate) EXPECT_NEAR(v, 1.0, 1e-6);
  const std::size_t image_c[3] = {65, 33, 33};
  const auto c = inverse_variation(invert_homeomorphism(sample(spec("cantor_shear3d"), {82, 21, 21}), image_c));
  EXPECT_NEAR(c.per_coordinate[0], 1.0, 0.04);
  EXPECT_NEAR(c.per_coordinate[1], 2.0, 0.08);
  EXPECT_NEAR(c.per_coordinate[2], 2.0, 0.08);
  EXPECT_NEAR(c.total, 5.0, 0.2);
  const std::size_t image_l[3] = {33, 33, 33};
  const auto l = inverse_variation(
      invert_homeomorphism(sample(spec("linear", {1, 0, 0, 0, 2, 0, 0, 0, 3}), {17, 17, 17}), image_l));
  EXPECT_NEAR(l.per_coordinate[0], 6.0, 0.18);
  EXPECT_NEAR(l.per_coordinate[1], 3.0, 0.09);
  EXPECT_NEAR(l.per_coordinate[2], 2.0, 0.06);
}

TEST(InverseVariation, LowCoverageIsRejected) {
  const std::size_t image[3] = {17, 17, 17};
  // A rotation-like shear leaves much of the image box uncovered.
  const auto inv = invert_homeomorphism(sample(spec("linear", {1, 1, 0, -1, 1, 0, 0, 0, 1}), {9, 9, 9}), image);
  EXPECT_LT(inv.defined_fraction, 0.95);
  EXPECT_THROW(inverse_variation(inv), RangeError);
  EXPECT_NO_THROW(inverse_variation(inv, 0.3));
}

TEST(PointwiseAdjugate, SampledAndAnalytic) {
  const auto lin = spec("linear", {1, 0, 0, 0, 2, 0, 0, 0, 3});
  EXPECT_NEAR(pointwise_adjugate(sample(lin, {9, 9, 9})).total, 11.0, 1e-9);
  const auto g = make_gallery(spec("cantor_shear3d"));
  EXPECT_NEAR(pointwise_adjugate(g.derivative, g.lo, g.hi, 16).total, 3.0, 1e-12);
}

TEST(Pushforward, FlatAndPointMass) {
  const auto f = sample(spec("identity3d"), {17, 17, 17});
  const std::size_t cells[3] = {16, 16, 16};
  const double h[3] = {1.0 / 16, 1.0 / 16, 1.0 / 16}, o[3] = {1.0 / 32, 1.0 / 32, 1.0 / 32};
  const auto grid = Grid::make(cells, h, o);
  const CellMeasure flat(grid, 1, std::vector<double>(grid.size(), 1.0 / 4096.0));
  const auto t = pushforward_ac_test(f, flat, 3);
  for (double fr : t.fractions) EXPECT_LT(fr, 0.02);
  std::vector<double> spike(grid.size(), 0.0);
  spike[1234] = 1.0;
  const auto p = pushforward_ac_test(f, CellMeasure(grid, 1, spike), 3);
  for (double fr : p.fractions) EXPECT_DOUBLE_EQ(fr, 1.0);
}

TEST(Stability, IdentityAndShrinkingLinearMaps) {
  StabilityConfig cfg;
  cfg.shape = {9, 9, 9};
  cfg.adjugate = quick();
  cfg.oracle_tolerance = 0.03;
  const auto id = weak_convergence_stability({spec("identity3d")}, cfg);
  EXPECT_TRUE(id.pass) << id.to_json();
  EXPECT_NEAR(id.lhs, 3.0, 0.09);

  std::vector<GallerySpec> seq;
  for (int j = 1; j <= 4; ++j) {
    const double a = 1.0 + 1.0 / j;
    seq.push_back(spec("linear", {a, 0, 0, 0, a, 0, 0, 0, a}));
  }
  const auto r = weak_convergence_stability(seq, cfg);
  const auto totals = r.details["totals"].get<std::vector<double>>();
  for (std::size_t i = 0; i < totals.size(); ++i) {
    const double a = 1.0 + 1.0 / static_cast<double>(i + 1);
    EXPECT_NEAR(totals[i], 3.0 * a * a, 0.03 * 3.0 * a * a);
    if (i > 0) EXPECT_LT(totals[i], totals[i - 1]);
  }
  EXPECT_FALSE(r.details["bounded"].get<bool>());  // 12 vs 4.7: far beyond a 10% spread
}
