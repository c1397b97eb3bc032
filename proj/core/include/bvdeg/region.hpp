#pragma once

#include <vector>

#include "bvdeg/geometry.hpp"

namespace bvdeg {

/// Ordered cyclic list of planar points; the last vertex connects to the first.
class ClosedPolyline {
 public:
  explicit ClosedPolyline(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  Box2 bounds() const;
  /// Diagonal of the bounding box.
  double diameter() const;
  /// Distance from p to the nearest edge.
  double distance(Vec2 p) const;
  /// Longest edge.
  double max_step() const;

 private:
  std::vector<Vec2> vertices_;
};

/// Disk, axis-aligned rectangle or convex polygon (counter-clockwise) in the
/// plane, used as the domain of a degree computation.
class PlanarRegion {
 public:
  enum class Kind { Disk, Rect, Polygon };

  static PlanarRegion disk(Vec2 center, double radius, int boundary_resolution = 256);
  static PlanarRegion rect(Vec2 corner, Vec2 sides, int boundary_resolution = 256);
  static PlanarRegion polygon(std::vector<Vec2> vertices, int boundary_resolution = 256);

  Kind kind() const noexcept { return kind_; }
  Vec2 center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  int boundary_resolution() const noexcept { return resolution_; }
  PlanarRegion with_resolution(int n) const;

  Box2 bounds() const;
  double area() const;
  double perimeter() const;
  bool contains(Vec2 p) const;
  /// 0 inside, Euclidean distance to the region outside.
  double distance(Vec2 p) const;

  /// About n points along the boundary, counter-clockwise, spaced by arc
  /// length. Polygon vertices are always included.
  std::vector<Vec2> boundary(std::size_t n) const;

  /// Vertices (counter-clockwise) of the intersection with an axis-aligned
  /// box; empty when the intersection has no area. Disks are clipped as an
  /// 8192-gon.
  std::vector<Vec2> clip_box(const Box2& box) const;

 private:
  PlanarRegion() = default;

  Kind kind_ = Kind::Disk;
  Vec2 center_{};
  double radius_ = 0.0;
  std::vector<Vec2> vertices_;  // Rect and Polygon, counter-clockwise
  int resolution_ = 256;
};

/// Shoelace area of a simple polygon (positive when counter-clockwise).
double polygon_area(const std::vector<Vec2>& poly);

/// Sutherland-Hodgman clip of `subject` against a convex CCW `clipper`.
std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clipper);

}  // namespace bvdeg
