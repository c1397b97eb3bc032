#include "bvdeg/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bvdeg/errors.hpp"

namespace bvdeg {
namespace {

constexpr std::size_t kDiskClipSides = 8192;

bool finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Drops repeated and collinear vertices left behind by clipping.
std::vector<Vec2> simplify(std::vector<Vec2> poly) {
  double scale = 0.0;
  for (const auto& v : poly) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
  const double eps = 1e-13 * std::max(scale, 1e-300);
  bool changed = true;
  while (changed && poly.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < poly.size() && poly.size() >= 3; ++i) {
      const Vec2 prev = poly[(i + poly.size() - 1) % poly.size()];
      const Vec2 cur = poly[i];
      const Vec2 next = poly[(i + 1) % poly.size()];
      const double len = norm(next - prev);
      if (norm(cur - prev) <= eps || std::abs(cross(cur - prev, next - prev)) <= eps * len) {
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  if (poly.size() < 3) poly.clear();
  return poly;
}

std::vector<Vec2> box_polygon(const Box2& b) {
  return {b.lo, {b.hi.x, b.lo.y}, b.hi, {b.lo.x, b.hi.y}};
}

}  // namespace

ClosedPolyline::ClosedPolyline(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw RangeError("a closed polyline needs at least 3 vertices");
  for (const auto& v : vertices_) {
    if (!finite(v)) throw RangeError("polyline vertices must be finite");
  }
}

Box2 ClosedPolyline::bounds() const {
  Box2 b;
  for (const auto& v : vertices_) b.expand(v);
  return b;
}

double ClosedPolyline::diameter() const {
  const Box2 b = bounds();
  return std::hypot(b.width(), b.height());
}

double ClosedPolyline::distance(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
  }
  return best;
}

double ClosedPolyline::max_step() const {
  double best = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, norm(vertices_[(i + 1) % n] - vertices_[i]));
  return best;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double twice = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * twice;
}

std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clipper) {
  std::vector<Vec2> out = subject;
  const std::size_t m = clipper.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2 a = clipper[e];
    const Vec2 b = clipper[(e + 1) % m];
    const Vec2 dir = b - a;
    auto side = [&](Vec2 p) { return cross(dir, p - a); };
    std::vector<Vec2> in = std::move(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2 p = in[i];
      const Vec2 q = in[(i + 1) % in.size()];
      const double sp = side(p), sq = side(q);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double s = sp / (sp - sq);
        out.push_back(p + s * (q - p));
      }
    }
  }
  return out;
}

PlanarRegion PlanarRegion::disk(Vec2 center, double radius, int boundary_resolution) {
  if (!(radius > 0.0) || !finite(center)) throw RangeError("disk needs a finite center and radius > 0");
  if (boundary_resolution < 8) throw RangeError("boundary resolution must be at least 8");
  PlanarRegion r;
  r.kind_ = Kind::Disk;
  r.center_ = center;
  r.radius_ = radius;
  r.resolution_ = boundary_resolution;
  return r;
}

PlanarRegion PlanarRegion::rect(Vec2 corner, Vec2 sides, int boundary_resolution) {
  if (!(sides.x > 0.0 && sides.y > 0.0) || !finite(corner)) {
    throw RangeError("rectangle needs positive sides");
  }
  if (boundary_resolution < 8) throw RangeError("boundary resolution must be at least 8");
  PlanarRegion r;
  r.kind_ = Kind::Rect;
  r.vertices_ = {corner, {corner.x + sides.x, corner.y}, corner + sides, {corner.x, corner.y + sides.y}};
  r.center_ = corner + 0.5 * sides;
  r.resolution_ = boundary_resolution;
  return r;
}

PlanarRegion PlanarRegion::polygon(std::vector<Vec2> vertices, int boundary_resolution) {
  if (vertices.size() < 3) throw RangeError("polygon needs at least 3 vertices");
  if (boundary_resolution < 8) throw RangeError("boundary resolution must be at least 8");
  for (const auto& v : vertices) {
    if (!finite(v)) throw RangeError("polygon vertices must be finite");
  }
  if (polygon_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
  if (!(polygon_area(vertices) > 0.0)) throw RangeError("polygon has no area");
  PlanarRegion r;
  r.kind_ = Kind::Polygon;
  r.vertices_ = std::move(vertices);
  Vec2 c{};
  for (const auto& v : r.vertices_) c = c + v;
  r.center_ = (1.0 / static_cast<double>(r.vertices_.size())) * c;
  r.resolution_ = boundary_resolution;
  return r;
}

PlanarRegion PlanarRegion::with_resolution(int n) const {
  if (n < 8) throw RangeError("boundary resolution must be at least 8");
  PlanarRegion r = *this;
  r.resolution_ = n;
  return r;
}

Box2 PlanarRegion::bounds() const {
  Box2 b;
  if (kind_ == Kind::Disk) {
    b.expand({center_.x - radius_, center_.y - radius_});
    b.expand({center_.x + radius_, center_.y + radius_});
  } else {
    for (const auto& v : vertices_) b.expand(v);
  }
  return b;
}

double PlanarRegion::area() const {
  return kind_ == Kind::Disk ? std::numbers::pi * radius_ * radius_ : polygon_area(vertices_);
}

double PlanarRegion::perimeter() const {
  if (kind_ == Kind::Disk) return 2.0 * std::numbers::pi * radius_;
  double total = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    total += norm(vertices_[(i + 1) % vertices_.size()] - vertices_[i]);
  }
  return total;
}

bool PlanarRegion::contains(Vec2 p) const {
  if (kind_ == Kind::Disk) return norm(p - center_) < radius_;
  const std::size_t n = vertices_.size();
  if (n <= 16) {
    for (std::size_t i = 0; i < n; ++i) {
      if (cross(vertices_[(i + 1) % n] - vertices_[i], p - vertices_[i]) <= 0.0) return false;
    }
    return true;
  }
  // Convex: locate the fan wedge at vertex 0 by bisection.
  const Vec2 v0 = vertices_[0];
  const Vec2 d = p - v0;
  if (cross(vertices_[1] - v0, d) <= 0.0 || cross(vertices_[n - 1] - v0, d) >= 0.0) return false;
  std::size_t lo = 1, hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (cross(vertices_[mid] - v0, d) > 0.0) lo = mid;
    else hi = mid;
  }
  return cross(vertices_[hi] - vertices_[lo], p - vertices_[lo]) > 0.0;
}

double PlanarRegion::distance(Vec2 p) const {
  if (kind_ == Kind::Disk) return std::max(0.0, norm(p - center_) - radius_);
  if (contains(p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
  }
  return best;
}

std::vector<Vec2> PlanarRegion::boundary(std::size_t n) const {
  n = std::max<std::size_t>(n, 8);
  std::vector<Vec2> pts;
  if (kind_ == Kind::Disk) {
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      pts.push_back({center_.x + radius_ * std::cos(t), center_.y + radius_ * std::sin(t)});
    }
    return pts;
  }
  const double total = perimeter();
  const std::size_t m = vertices_.size();
  pts.reserve(n + m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[(i + 1) % m];
    const double len = norm(b - a);
    const auto pieces = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * len / total)));
    for (std::size_t s = 0; s < pieces; ++s) {
      const double u = static_cast<double>(s) / static_cast<double>(pieces);
      pts.push_back(a + u * (b - a));
    }
  }
  return pts;
}

std::vector<Vec2> PlanarRegion::clip_box(const Box2& box) const {
  const auto subject = box_polygon(box);
  if (kind_ == Kind::Disk) {
    const Box2 mine = bounds();
    if (box.hi.x <= mine.lo.x || box.lo.x >= mine.hi.x || box.hi.y <= mine.lo.y || box.lo.y >= mine.hi.y) {
      return {};
    }
    // Box entirely inside the disk: no clipping needed.
    bool inside = true;
    for (const auto& v : subject) inside = inside && norm(v - center_) <= radius_;
    if (inside) return subject;
    std::vector<Vec2> gon(kDiskClipSides);
    for (std::size_t i = 0; i < kDiskClipSides; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(kDiskClipSides);
      gon[i] = {center_.x + radius_ * std::cos(t), center_.y + radius_ * std::sin(t)};
    }
    // Clip the many-sided polygon against the four box edges, not the reverse.
    auto out = simplify(clip_convex(gon, subject));
    return polygon_area(out) > 0.0 ? out : std::vector<Vec2>{};
  }
  auto out = simplify(vertices_.size() > 4 ? clip_convex(vertices_, subject) : clip_convex(subject, vertices_));
  return polygon_area(out) > 0.0 ? out : std::vector<Vec2>{};
}

}  // namespace bvdeg
