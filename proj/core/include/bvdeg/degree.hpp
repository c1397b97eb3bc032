#pragma once

#include <functional>
#include <vector>

#include "bvdeg/field.hpp"
#include "bvdeg/region.hpp"
#include "bvdeg/report.hpp"

namespace bvdeg {

struct GalleryMap;

using PlanarMap = std::function<Vec2(Vec2)>;

/// Bilinear evaluator of components (0, 1) of a planar sampled map. The
/// returned function shares the samples.
PlanarMap planar_map(const SampledMap& g);
PlanarMap planar_map(const GalleryMap& g);

/// Winding number of `poly` around y, by signed crossings of the ray
/// y + s (1, phi - 1). Vertices on the ray count as lying above it.
/// Throws OnBoundary when y is within 1e-12 * diameter of the polyline.
int winding_number(const ClosedPolyline& poly, Vec2 y);

/// Maximum number of boundary points any degree computation will use.
inline constexpr std::size_t kMaxBoundaryPoints = std::size_t{1} << 20;

/// deg(g, region, y) as the winding number of the image of the sampled
/// boundary. The boundary is refined (up to 16x the region's resolution)
/// until y is at least twice the longest image step away from the image
/// polyline; otherwise UnstableDegree is thrown.
int topological_degree(const PlanarMap& g, const PlanarRegion& region, Vec2 y);

struct DegreeIntegral {
  double signed_value = 0.0;
  double absolute = 0.0;
  double skipped_area = 0.0;
  double box_area = 0.0;
  std::size_t boundary_points = 0;
  /// The image of the boundary has (numerically) no interior; both integrals
  /// are zero.
  bool degenerate_image = false;
};

/// Integrals of deg(g, region, .) and |deg(g, region, .)| over the plane.
/// The bounding box of the boundary image is split into raster x raster
/// pixels and the degree is taken at pixel centres by a scanline crossing
/// count. The boundary is refined until consecutive image points are at most
/// 1/32 pixel apart; pixels whose centre lies within two such steps of the
/// image are skipped and reported. Throws DegenerateBoundary if more than 5%
/// of the box is skipped.
DegreeIntegral degree_integral(const PlanarMap& g, const PlanarRegion& region, int raster);

/// Resolution-stamped count of preimage clusters of y: the region's bounding
/// box is divided into search_resolution^2 cells, cells meeting the region
/// are marked when y lies within the image diameter of the convex hull of the
/// cell's corner images, and 8-connected marked components are counted.
int preimage_count(const PlanarMap& g, const PlanarRegion& region, Vec2 y, int search_resolution);

/// Domain decomposition / excision: deg(g, region, y) against the sum over
/// `parts`. The identity is only claimed when y stays away from the image of
/// region minus the parts; that is checked on a raster x raster sample and
/// reported as details.applicable (a non-applicable case passes vacuously).
VerificationReport check_degree_axioms(const PlanarMap& g, const PlanarRegion& region,
                                       const std::vector<PlanarRegion>& parts, Vec2 y,
                                       int raster = 128);

}  // namespace bvdeg
