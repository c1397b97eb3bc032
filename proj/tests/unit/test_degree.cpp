#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bvdeg/degree.hpp"
#include "bvdeg/errors.hpp"
#include "bvdeg/gallery.hpp"

using namespace bvdeg;

namespace {

std::vector<Vec2> circle(std::size_t n, double r = 1.0, int turns = 1, Vec2 c = {}) {
  std::vector<Vec2> p;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * turns * static_cast<double>(i) / static_cast<double>(n);
    p.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  return p;
}

PlanarMap gallery(const std::string& name, int k = 2) {
  GallerySpec s;
  s.name = name;
  s.k = k;
  return planar_map(make_gallery(s));
}

PlanarMap reflection() {
  GallerySpec s;
  s.name = "linear";
  s.matrix = {0, 1, 1, 0};
  return planar_map(make_gallery(s));
}

const PlanarMap identity = [](Vec2 p) { return p; };

}  // namespace

TEST(WindingNumber, Examples) {
  const ClosedPolyline unit(circle(64));
  EXPECT_EQ(winding_number(unit, {0.0, 0.0}), 1);
  EXPECT_EQ(winding_number(unit, {2.0, 0.0}), 0);
  EXPECT_EQ(winding_number(ClosedPolyline(circle(128, 1.0, 2)), {0.0, 0.0}), 2);
  auto cw = circle(64);
  std::reverse(cw.begin(), cw.end());
  EXPECT_EQ(winding_number(ClosedPolyline(cw), {0.1, -0.2}), -1);
}

TEST(WindingNumber, AdditiveUnderConcatenation) {
  // Two loops through a shared base point: the concatenation winds by the sum.
  const Vec2 base{1.0, 0.0};
  const auto a = circle(97, 1.0, 1);
  std::vector<Vec2> b;
  for (std::size_t i = 0; i < 61; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / 61.0;
    b.push_back({0.5 + 0.5 * std::cos(t), 0.5 * std::sin(t)});  // passes through base
  }
  std::vector<Vec2> both = a;
  both.push_back(base);
  both.insert(both.end(), b.begin(), b.end());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const ClosedPolyline pa(a), pb(b), pab(both);
  int tested = 0;
  for (int i = 0; i < 500; ++i) {
    const Vec2 y{u(rng), u(rng)};
    if (pab.distance(y) < 1e-6) continue;
    EXPECT_EQ(winding_number(pab, y), winding_number(pa, y) + winding_number(pb, y));
    ++tested;
  }
  EXPECT_GT(tested, 400);
}

TEST(WindingNumber, OnBoundaryThrows) {
  const ClosedPolyline unit(circle(64));
  EXPECT_THROW(winding_number(unit, unit.vertices()[5]), OnBoundary);
}

TEST(TopologicalDegree, Examples) {
  EXPECT_EQ(topological_degree(identity, PlanarRegion::disk({0, 0}, 1.0), {0, 0}), 1);
  EXPECT_EQ(topological_degree(gallery("zpow"), PlanarRegion::disk({0, 0}, 1.0), {0.3, 0.1}), 2);
  EXPECT_EQ(topological_degree(gallery("zpow", 3), PlanarRegion::disk({0, 0}, 0.9), {-0.2, 0.4}), 3);
  EXPECT_EQ(topological_degree(reflection(), PlanarRegion::rect({0, 0}, {1, 1}), {0.3, 0.6}), -1);
  EXPECT_EQ(topological_degree(identity, PlanarRegion::disk({0, 0}, 1.0), {3, 0}), 0);
}

TEST(TopologicalDegree, SampledMapAgreesWithAnalytic) {
  GallerySpec s;
  s.name = "zpow";
  const std::size_t shape[2] = {257, 257};
  const auto g = planar_map(sample_gallery(s, shape));
  EXPECT_EQ(topological_degree(g, PlanarRegion::disk({0, 0}, 0.8), {0.3, 0.1}), 2);
}

TEST(TopologicalDegree, RefusesPointsOnTheImageBoundary) {
  EXPECT_THROW(topological_degree(identity, PlanarRegion::disk({0, 0}, 1.0), {1.0, 0.0}), Error);
  // Close enough that no allowed refinement separates it.
  EXPECT_THROW(topological_degree(identity, PlanarRegion::disk({0, 0}, 1.0, 8), {1.0 - 1e-9, 0.0}), UnstableDegree);
}

TEST(TopologicalDegree, OrientationPreservingHomeomorphismsGiveZeroOrOne) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.9, 0.9), r(0.05, 0.4);
  GallerySpec z1;
  z1.name = "zpow";
  z1.k = 1;
  for (const auto& g : {gallery("shear2d"), gallery("radial_stretch"), planar_map(make_gallery(z1))}) {
    for (int i = 0; i < 200; ++i) {
      const Vec2 c{u(rng), u(rng)};
      const auto region = PlanarRegion::disk(c, r(rng));
      const Vec2 y{u(rng), u(rng)};
      try {
        const int d = topological_degree(g, region, y);
        EXPECT_TRUE(d == 0 || d == 1) << d;
      } catch (const UnstableDegree&) {
      }
    }
  }
}

TEST(DegreeIntegral, Examples) {
  const auto id = degree_integral(identity, PlanarRegion::disk({0, 0}, 0.7), 256);
  EXPECT_NEAR(id.signed_value, std::numbers::pi * 0.49, 0.02 * std::numbers::pi * 0.49);
  const auto z = degree_integral(gallery("zpow"), PlanarRegion::disk({0, 0}, 1.0), 512);
  EXPECT_NEAR(z.signed_value, 2.0 * std::numbers::pi, 0.02 * 2.0 * std::numbers::pi);
  EXPECT_NEAR(z.absolute, 2.0 * std::numbers::pi, 0.02 * 2.0 * std::numbers::pi);
  const auto r = degree_integral(reflection(), PlanarRegion::rect({0, 0}, {1, 1}), 256);
  EXPECT_NEAR(r.signed_value, -1.0, 0.02);
  EXPECT_NEAR(r.absolute, 1.0, 0.02);
}

TEST(DegreeIntegral, DegenerateImage) {
  const PlanarMap flat = [](Vec2 p) { return Vec2{p.x, 0.0}; };
  const auto d = degree_integral(flat, PlanarRegion::rect({0, 0}, {1, 1}), 64);
  EXPECT_TRUE(d.degenerate_image);
  EXPECT_EQ(d.signed_value, 0.0);
  EXPECT_EQ(d.absolute, 0.0);
}

TEST(PreimageCount, Examples) {
  EXPECT_EQ(preimage_count(identity, PlanarRegion::disk({0, 0}, 1.0), {0.2, 0.3}, 128), 1);
  EXPECT_EQ(preimage_count(gallery("zpow"), PlanarRegion::disk({0, 0}, 1.0), {0.3, 0.1}, 256), 2);
  EXPECT_EQ(preimage_count(identity, PlanarRegion::disk({0, 0}, 1.0), {5.0, 0.0}, 128), 0);
}

TEST(DegreeAxioms, QuadrantSplitOfIdentity) {
  const auto square = PlanarRegion::rect({0, 0}, {1, 1});
  std::vector<PlanarRegion> parts;
  for (double x : {0.0, 0.5})
    for (double y : {0.0, 0.5}) parts.push_back(PlanarRegion::rect({x, y}, {0.5, 0.5}));
  const auto r = check_degree_axioms(identity, square, parts, {0.2, 0.7});
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.details["applicable"].get<bool>());
  EXPECT_EQ(r.lhs, 1.0);
  EXPECT_EQ(r.details["part_degrees"], (std::vector<int>{0, 1, 0, 0}));
  EXPECT_EQ(r.check, "degree_decomposition");
}

TEST(DegreeAxioms, HalfDisksOfZpow) {
  const auto disk = PlanarRegion::disk({0, 0}, 1.0);
  Box2 upper, lower;
  upper.expand({-1, 0});
  upper.expand({1, 1});
  lower.expand({-1, -1});
  lower.expand({1, 0});
  const std::vector<PlanarRegion> halves{PlanarRegion::polygon(disk.clip_box(upper)),
                                         PlanarRegion::polygon(disk.clip_box(lower))};
  const auto r = check_degree_axioms(gallery("zpow"), disk, halves, {0.3, 0.1});
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.details["applicable"].get<bool>());
  EXPECT_EQ(r.details["part_degrees"], (std::vector<int>{1, 1}));
  EXPECT_EQ(r.lhs, 2.0);
}

TEST(DegreeAxioms, PointOutsideImage) {
  const auto square = PlanarRegion::rect({0, 0}, {1, 1});
  const std::vector<PlanarRegion> parts{PlanarRegion::rect({0, 0}, {0.5, 1}), PlanarRegion::rect({0.5, 0}, {0.5, 1})};
  const auto r = check_degree_axioms(identity, square, parts, {3.0, 3.0});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
}

TEST(DegreeAxioms, ExcisionAroundTheOnlyPreimage) {
  const auto square = PlanarRegion::rect({0, 0}, {1, 1});
  const auto r = check_degree_axioms(gallery("shear2d"), square, {PlanarRegion::rect({0.3, 0.3}, {0.2, 0.2})},
                                     {0.4 + 0.5 * 0.4, 0.4});
  EXPECT_EQ(r.check, "degree_excision");
  EXPECT_TRUE(r.details["applicable"].get<bool>());
  EXPECT_TRUE(r.pass);
}

TEST(Region, ContainsAndClip) {
  const auto disk = PlanarRegion::disk({0, 0}, 1.0);
  Box2 b;
  b.expand({-2, -2});
  b.expand({0.25, 2});
  const auto poly = PlanarRegion::polygon(disk.clip_box(b));
  EXPECT_TRUE(poly.contains({0.0, 0.0}));
  EXPECT_TRUE(poly.contains({-0.99, 0.0}));
  EXPECT_FALSE(poly.contains({0.3, 0.0}));
  EXPECT_FALSE(poly.contains({-0.8, 0.8}));
  EXPECT_NEAR(poly.area(), std::numbers::pi / 2 + (0.25 * std::sqrt(1 - 0.0625) + std::asin(0.25)), 1e-6);
  // Every vertex lies on the boundary, none is strictly inside.
  for (const auto& v : poly.vertices()) EXPECT_FALSE(poly.contains(v));
  EXPECT_THROW(PlanarRegion::disk({0, 0}, -1.0), RangeError);
  EXPECT_THROW(PlanarRegion::polygon({{0, 0}, {1, 1}, {2, 2}}), RangeError);
}
