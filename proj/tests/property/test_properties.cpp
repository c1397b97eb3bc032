// Randomised properties. Every test draws from a fixed seed so failures replay.
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bvdeg/adjugate.hpp"
#include "bvdeg/degree.hpp"
#include "bvdeg/distjac.hpp"
#include "bvdeg/dyadic.hpp"
#include "bvdeg/errors.hpp"
#include "bvdeg/gallery.hpp"
#include "bvdeg/inversion.hpp"
#include "bvdeg/region.hpp"
#include "bvdeg/variation.hpp"
#include "oracles.hpp"

using namespace bvdeg;

namespace {

GallerySpec spec(const std::string& name, std::vector<double> matrix = {}) {
  GallerySpec s;
  s.name = name;
  s.matrix = std::move(matrix);
  return s;
}

std::vector<GallerySpec> planar_homeomorphisms() {
  return {spec("shear2d"), spec("radial_stretch"), spec("linear", {2, 1, 0.5, 1})};
}

double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

SampledMap sample3(const GallerySpec& s, std::size_t n) {
  const std::vector<std::size_t> shape{n, n, n};
  return sample_gallery(s, shape);
}

// Same samples, domain axes relabelled: out(x_p0, x_p1, x_p2) = f(x_0, x_1, x_2).
SampledMap permute_axes(const SampledMap& f, std::array<int, 3> p) {
  const Grid& g = f.grid();
  Grid out = g;
  for (int d = 0; d < 3; ++d) {
    out.shape[p[d]] = g.shape[d];
    out.spacing[p[d]] = g.spacing[d];
    out.origin[p[d]] = g.origin[d];
  }
  std::vector<double> v(f.values().size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto idx = g.unravel(n);
    std::array<std::size_t, 3> j{};
    for (int d = 0; d < 3; ++d) j[p[d]] = idx[d];
    const std::size_t m = out.index(j[0], j[1], j[2]);
    for (int c = 0; c < 3; ++c) v[m * 3 + c] = f.value(n, c);
  }
  return SampledMap(out, 3, std::move(v));
}

}  // namespace

TEST(Coarea, RandomFieldsAreExact) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    const int dim = 1 + i % 3;
    const auto u = oracle::random_field(rng, dim, 1, dim == 3 ? 8 : 20, i % 2 == 0);
    const double tv = anisotropic_tv(u);
    const double layer = level_set_profile(u).integral();
    EXPECT_NEAR(layer, tv, 1e-10 * std::max(tv, 1.0)) << i;
    EXPECT_NEAR(oracle::brute_layer_cake(u), tv, 1e-10 * std::max(tv, 1.0)) << i;
    EXPECT_TRUE(coarea_check(u).pass) << i;
  }
}

TEST(Coarea, ProfileInvariants) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto u = oracle::random_field(rng, 2, 1, 12, false);
    const auto p = level_set_profile(u);
    EXPECT_TRUE(std::is_sorted(p.thresholds.begin(), p.thresholds.end()));
    EXPECT_EQ(std::adjacent_find(p.thresholds.begin(), p.thresholds.end()), p.thresholds.end());
    for (double per : p.perimeters) EXPECT_GE(per, 0.0);
    const auto [lo, hi] = std::minmax_element(u.values().begin(), u.values().end());
    EXPECT_EQ(superlevel_perimeter(u, *hi + 1.0), 0.0);
    EXPECT_EQ(superlevel_perimeter(u, *lo - 1.0), 0.0);
  }
}

TEST(Bvl, SliceIntegralMatchesDirectionalMeasure) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const int dim = 1 + i % 3;
    const int m = 1 + i % 2;
    const auto f = oracle::random_field(rng, dim, m, dim == 3 ? 9 : 24, false);
    for (int axis = 1; axis <= dim; ++axis) {
      const double slices = slice_variation_integral(f, axis);
      const double measure = total_variation(directional_difference(f, axis - 1));
      EXPECT_NEAR(slices, measure, 1e-12 * std::max(measure, 1e-300)) << i << ' ' << axis;
      EXPECT_NEAR(slices, oracle::naive_line_variation(f, axis - 1), 1e-12 * std::max(slices, 1e-300));
    }
  }
}

TEST(Tv1d, ReversalInvariant) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> s(2 + rng() % 40);
    for (auto& v : s) v = uniform(rng, -5, 5);
    const double a = tv_1d(s);
    std::reverse(s.begin(), s.end());
    EXPECT_NEAR(tv_1d(s), a, 1e-12 * a);
  }
}

TEST(Degree, StableUnderSmallPerturbations) {
  std::mt19937_64 rng(31);
  auto z = spec("zpow");
  const auto gm = make_gallery(z);
  const std::vector<std::size_t> shape{129, 129};
  const auto g = sample_gallery(gm, shape);
  const auto region = PlanarRegion::disk({0.1, -0.05}, 0.5);
  const auto pm = planar_map(g);
  std::vector<Vec2> image;
  for (const auto& p : region.boundary(8192)) image.push_back(pm(p));
  const ClosedPolyline curve(image);
  const Box2 box = curve.bounds();
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 40; ++trial) {
    const Vec2 y{uniform(rng, box.lo.x, box.hi.x), uniform(rng, box.lo.y, box.hi.y)};
    const double margin = curve.distance(y);
    if (margin < 0.02) continue;
    std::vector<double> noisy(g.values().begin(), g.values().end());
    for (auto& v : noisy) v += uniform(rng, -0.4, 0.4) * margin;
    const SampledMap h(g.grid(), 2, std::move(noisy));
    EXPECT_EQ(topological_degree(planar_map(h), region, y), topological_degree(pm, region, y));
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(Degree, AbsoluteIntegralBoundedByJacobianVariation) {
  std::mt19937_64 rng(41);
  auto maps = planar_homeomorphisms();
  maps.push_back(spec("zpow"));
  maps.push_back(spec("linear", {0, 1, 1, 0}));
  for (const auto& s : maps) {
    const auto gm = make_gallery(s);
    const auto pm = planar_map(gm);
    const double w = gm.hi[0] - gm.lo[0];
    for (int c = 0; c < 50; ++c) {
      const int depth = 1 + static_cast<int>(rng() % 3);
      const double side = w / static_cast<double>(1 << depth);
      const auto i = rng() % (1u << depth), j = rng() % (1u << depth);
      const Vec2 corner{gm.lo[0] + side * static_cast<double>(i), gm.lo[1] + side * static_cast<double>(j)};
      const auto cell = PlanarRegion::rect(corner, {side, side});
      double absolute = 0.0, variation = 0.0;
      try {
        absolute = degree_integral(pm, cell, 64).absolute;
        const auto mu = jacobian_measure(pm, cell, DyadicGrid::covering(cell), 2);
        for (double v : mu.weights()) variation += std::abs(v);
      } catch (const UnstableDegree&) {
        continue;
      } catch (const DegenerateBoundary&) {
        continue;
      }
      EXPECT_LE(absolute, variation * 1.03 + 1e-12) << s.name << " cell " << c;
    }
  }
}

TEST(Degree, UEstimateIsMonotoneInDepth) {
  std::mt19937_64 rng(42);
  const std::size_t n[2] = {65, 65};
  const double lo[2] = {-1, -1}, hi[2] = {1, 1};
  const auto fold = SampledMap::sample(Grid::spanning(n, lo, hi), 2, [](auto x, auto y) {
    y[0] = x[0] * x[0] - 0.3 * x[1];
    y[1] = x[1] + 0.2 * std::sin(3.0 * x[0]);
  });
  std::vector<std::pair<PlanarMap, Box2>> maps;
  maps.push_back({planar_map(fold), Box2{{-1, -1}, {1, 1}}});
  const auto zp = make_gallery(spec("zpow"));
  maps.push_back({planar_map(zp), Box2{{-1, -1}, {1, 1}}});
  for (const auto& [pm, box] : maps) {
    for (int r = 0; r < 4; ++r) {
      const Vec2 corner{uniform(rng, box.lo.x, box.lo.x + 0.5), uniform(rng, box.lo.y, box.lo.y + 0.5)};
      const auto region = PlanarRegion::rect(corner, {uniform(rng, 0.6, 1.4), uniform(rng, 0.6, 1.4)});
      const auto av = area_variation(pm, region, DyadicGrid::covering(region), 3);
      for (std::size_t d = 1; d < av.u.size(); ++d) EXPECT_GE(av.u[d], av.u[d - 1]) << d;
    }
  }
}

TEST(Degree, OrientationPreservingJacobianIsNonNegative) {
  std::mt19937_64 rng(43);
  for (const auto& s : planar_homeomorphisms()) {
    const auto gm = make_gallery(s);
    const auto pm = planar_map(gm);
    const double w = gm.hi[0] - gm.lo[0];
    for (int r = 0; r < 5; ++r) {
      const Vec2 corner{gm.lo[0] + uniform(rng, 0.0, 0.4) * w, gm.lo[1] + uniform(rng, 0.0, 0.4) * w};
      const auto region = PlanarRegion::rect(corner, {uniform(rng, 0.2, 0.55) * w, uniform(rng, 0.2, 0.55) * w});
      const auto mu = jacobian_measure(pm, region, DyadicGrid::covering(region), 3);
      for (double v : mu.weights()) EXPECT_GE(v, -1e-9) << s.name;
    }
  }
}

TEST(Adjugate, MassesNonNegativeAndOffDiagonalsVanish) {
  AdjugateConfig cfg;
  cfg.n_slices = 9;
  cfg.depth = 2;
  std::mt19937_64 rng(51);
  std::vector<GallerySpec> maps{spec("identity3d"), spec("cantor_shear3d")};
  for (int i = 0; i < 2; ++i)
    maps.push_back(spec("linear", {uniform(rng, 0.5, 2), 0, 0, 0, uniform(rng, 0.5, 2), 0, 0, 0, uniform(rng, 0.5, 2)}));
  for (const auto& s : maps) {
    const auto t = distributional_adjugate(sample3(s, s.name == "cantor_shear3d" ? 82 : 17), cfg);
    for (int k = 1; k <= 3; ++k)
      for (int j = 1; j <= 3; ++j) {
        for (double m : t.entries[k - 1][j - 1].slice_masses) EXPECT_GE(m, 0.0);
        if (k != j) EXPECT_LE(t.entry(k, j), 0.02 * t.total) << s.name << k << j;
      }
    double sum = 0.0;
    for (int k = 1; k <= 3; ++k)
      for (int j = 1; j <= 3; ++j) sum += t.entry(k, j);
    EXPECT_NEAR(sum, t.total, 1e-12 * t.total);
  }
}

TEST(Adjugate, PermutingDomainAxesPermutesRows) {
  AdjugateConfig cfg;
  cfg.n_slices = 9;
  cfg.depth = 2;
  const auto f = sample3(spec("linear", {1, 0.3, 0, 0, 1, 0.2, 0.1, 0, 1}), 13);
  const auto base = distributional_adjugate(f, cfg);
  for (const std::array<int, 3> p : {std::array<int, 3>{1, 2, 0}, {0, 2, 1}, {2, 1, 0}}) {
    const auto t = distributional_adjugate(permute_axes(f, p), cfg);
    EXPECT_NEAR(t.total, base.total, 1e-9 * base.total);
    for (int k = 0; k < 3; ++k)
      for (int j = 1; j <= 3; ++j) EXPECT_NEAR(t.entry(p[k] + 1, j), base.entry(k + 1, j), 1e-9 * base.total);
  }
}

TEST(Adjugate, SmoothMapsMatchPointwiseAdjugate) {
  AdjugateConfig cfg;
  cfg.n_slices = 17;
  cfg.depth = 2;
  const auto lin = sample3(spec("linear", {1, 0.3, 0, 0, 1, 0.2, 0.1, 0, 1}), 17);
  const std::size_t n[3] = {25, 25, 25};
  const double lo[3] = {0, 0, 0}, hi[3] = {1, 1, 1};
  const auto wavy = SampledMap::sample(Grid::spanning(n, lo, hi), 3, [](auto x, auto y) {
    y[0] = x[0] + 0.1 * std::sin(2.0 * x[1]);
    y[1] = x[1] + 0.1 * std::sin(2.0 * x[2]);
    y[2] = 1.5 * x[2] + 0.1 * std::sin(2.0 * x[0]);
  });
  for (const auto* f : {&lin, &wavy}) {
    const double adj = distributional_adjugate(*f, cfg).total;
    const double pw = pointwise_adjugate(*f).total;
    EXPECT_NEAR(adj, pw, 0.03 * pw) << adj << " vs " << pw;
  }
}

TEST(Adjugate, InverseVariationBoundedByMu) {
  std::mt19937_64 rng(61);
  AdjugateConfig cfg;
  cfg.n_slices = 9;
  cfg.depth = 2;
  for (int i = 0; i < 3; ++i) {
    const auto s = spec("linear", {uniform(rng, 0.5, 2), 0, 0, 0, uniform(rng, 0.5, 2), 0, 0, 0, uniform(rng, 0.5, 2)});
    const auto f = sample3(s, 13);
    const std::size_t image[3] = {25, 25, 25};
    const double inv = inverse_variation(invert_homeomorphism(f, image)).total;
    const double mu = mu_measure(f, cfg).total;
    EXPECT_LE(inv, 1.05 * mu);
    EXPECT_NEAR(inv, mu, 0.05 * mu);
    EXPECT_NEAR(mu, bvdeg::oracle(s, "mu_total"), 0.03 * mu);
  }
}
