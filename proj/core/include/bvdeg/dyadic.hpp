#pragma once

#include <vector>

#include "bvdeg/degree.hpp"

namespace bvdeg {

/// Squares anchor + side * [i, i+1) x [j, j+1), side = base_size / 2^depth.
struct DyadicGrid {
  Vec2 anchor{};
  double base_size = 1.0;

  double side(int depth) const;
  /// Grid whose depth-0 square has the region's bounding box as lower-left
  /// corner and covers it.
  static DyadicGrid covering(const PlanarRegion& region);
};

struct DyadicCell {
  std::ptrdiff_t i = 0;
  std::ptrdiff_t j = 0;
  Box2 box;
  std::vector<Vec2> clipped;  // intersection with the region; empty if none
};

/// All squares at `depth` meeting the region's bounding box, row-major in
/// (i, j) with j fastest.
struct DyadicLayer {
  std::ptrdiff_t i0 = 0;
  std::ptrdiff_t j0 = 0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double side = 0.0;
  std::vector<DyadicCell> cells;
};

DyadicLayer dyadic_layer(const DyadicGrid& grid, const PlanarRegion& region, int depth);

struct JacobianOptions {
  int raster = 32;
  int cell_boundary_resolution = 64;
};

/// J_g(Q) for the dyadic squares Q at `depth` (clipped to the region), each
/// taken as the signed degree integral over Q. Cell (i, j) of the returned
/// measure sits at the square's centre. If a square has a degenerate
/// boundary the anchor is moved by up to three fixed offsets (fractions of
/// the finest side) before DegenerateBoundary is rethrown naming the square.
CellMeasure jacobian_measure(const PlanarMap& g, const PlanarRegion& region, const DyadicGrid& grid,
                             int depth, const JacobianOptions& options = {});

struct AreaVariation {
  /// V_d: sum over squares at depth d of the integral of |deg|, d = 0..max.
  std::vector<double> v;
  /// U_d: sum over squares at depth d of |integral of deg|. Square integrals
  /// at coarser depths are sums of their children's, so U is non-decreasing.
  std::vector<double> u;
  double sup_v = 0.0;
  double sup_u = 0.0;
  DyadicGrid grid_used;
};

AreaVariation area_variation(const PlanarMap& g, const PlanarRegion& region, const DyadicGrid& grid,
                             int max_depth, const JacobianOptions& options = {});

struct LebesgueAreaBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::array<double, 3> v{0.0, 0.0, 0.0};  // V of g_j, output j dropped
};

/// Two-sided Lebesgue area bounds for a surface F: region -> R^3 from the
/// area variations of its three coordinate projections.
LebesgueAreaBounds lebesgue_area_bounds(const SampledMap& surface, const PlanarRegion& region,
                                        const DyadicGrid& grid, int depth,
                                        const JacobianOptions& options = {});

}  // namespace bvdeg
