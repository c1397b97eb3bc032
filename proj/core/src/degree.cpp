#include "bvdeg/degree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "bvdeg/errors.hpp"
#include "bvdeg/gallery.hpp"
#include "bvdeg/parallel.hpp"

namespace bvdeg {
namespace {

constexpr double kRaySlope = std::numbers::phi - 1.0;

std::vector<Vec2> image_of(const PlanarMap& g, const std::vector<Vec2>& pts) {
  std::vector<Vec2> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = g(pts[i]);
  return out;
}

double max_step(const std::vector<Vec2>& img) {
  double best = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) best = std::max(best, norm(img[(i + 1) % img.size()] - img[i]));
  return best;
}

double polyline_distance(const std::vector<Vec2>& img, Vec2 y) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < img.size(); ++i) {
    best = std::min(best, segment_distance(y, img[i], img[(i + 1) % img.size()]));
  }
  return best;
}

int crossings(const std::vector<Vec2>& poly, Vec2 y) {
  const Vec2 dir{1.0, kRaySlope};
  int w = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const double sa = cross(dir, a - y);
    const double sb = cross(dir, b - y);
    const bool above_a = sa >= 0.0;
    const bool above_b = sb >= 0.0;
    if (above_a == above_b) continue;
    const double t = sa / (sa - sb);
    const Vec2 p = a + t * (b - a);
    if (dot(p - y, dir) <= 0.0) continue;
    w += above_b ? 1 : -1;
  }
  return w;
}

// Convex hull of up to 4 points, counter-clockwise (monotone chain).
std::vector<Vec2> small_hull(std::array<Vec2, 4> p) {
  std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Vec2> h;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = h.size();
    for (int i = 0; i < 4; ++i) {
      const Vec2 q = pass == 0 ? p[i] : p[3 - i];
      while (h.size() >= base + 2 && cross(h[h.size() - 1] - h[h.size() - 2], q - h[h.size() - 2]) <= 0.0) {
        h.pop_back();
      }
      h.push_back(q);
    }
    h.pop_back();
  }
  return h;
}

double hull_distance(const std::vector<Vec2>& hull, Vec2 y) {
  if (hull.size() == 1) return norm(y - hull[0]);
  bool inside = hull.size() >= 3;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 a = hull[i];
    const Vec2 b = hull[(i + 1) % hull.size()];
    if (cross(b - a, y - a) < 0.0) inside = false;
    best = std::min(best, segment_distance(y, a, b));
  }
  return inside ? 0.0 : best;
}

}  // namespace

PlanarMap planar_map(const SampledMap& g) {
  if (g.dim_in() != 2 || g.dim_out() < 2) throw RangeError("a planar map needs a 2D grid and 2 outputs");
  return [g](Vec2 p) { return g.eval2(p); };
}

PlanarMap planar_map(const GalleryMap& g) {
  if (g.dim_in != 2 || g.dim_out != 2) throw RangeError("gallery map is not planar");
  auto eval = g.eval;
  return [eval](Vec2 p) {
    const double x[2] = {p.x, p.y};
    double y[2];
    eval(x, y);
    return Vec2{y[0], y[1]};
  };
}

int winding_number(const ClosedPolyline& poly, Vec2 y) {
  if (poly.distance(y) <= 1e-12 * poly.diameter()) {
    std::ostringstream msg;
    msg << "point (" << y.x << ", " << y.y << ") lies on the polyline";
    throw OnBoundary(msg.str());
  }
  return crossings(poly.vertices(), y);
}

int topological_degree(const PlanarMap& g, const PlanarRegion& region, Vec2 y) {
  std::size_t n = static_cast<std::size_t>(region.boundary_resolution());
  double margin = 0.0, step = 0.0;
  for (int attempt = 0; attempt < 5; ++attempt, n *= 2) {
    const auto img = image_of(g, region.boundary(n));
    margin = polyline_distance(img, y);
    step = max_step(img);
    if (margin >= 2.0 * step && margin > 0.0) return winding_number(ClosedPolyline(img), y);
    if (margin == 0.0) break;
  }
  std::ostringstream msg;
  msg << "degree at (" << y.x << ", " << y.y << ") is unstable: distance " << margin
      << " to the boundary image is below twice the step " << step;
  throw UnstableDegree(msg.str());
}

DegreeIntegral degree_integral(const PlanarMap& g, const PlanarRegion& region, int raster) {
  if (raster < 1) throw RangeError("raster must be positive");
  const auto R = static_cast<std::size_t>(raster);
  DegreeIntegral out;

  std::size_t n = static_cast<std::size_t>(region.boundary_resolution());
  std::vector<Vec2> img;
  Box2 box;
  double px = 0.0, py = 0.0, omega = 0.0;
  for (;;) {
    img = image_of(g, region.boundary(n));
    box = Box2{};
    for (const auto& p : img) box.expand(p);
    const double wide = std::max(box.width(), box.height());
    if (!(wide > 0.0) || std::min(box.width(), box.height()) <= 1e-9 * wide) {
      out.degenerate_image = true;
      out.boundary_points = img.size();
      return out;
    }
    px = box.width() / static_cast<double>(R);
    py = box.height() / static_cast<double>(R);
    omega = max_step(img);
    const double target = std::min(px, py) / 32.0;
    if (omega <= target || n >= kMaxBoundaryPoints) break;
    std::size_t factor = 2;
    while (factor < 1024 && omega / static_cast<double>(factor) > target) factor *= 2;
    n = std::min(n * factor, kMaxBoundaryPoints);
  }
  out.boundary_points = img.size();
  out.box_area = box.area();
  const double margin = 2.0 * omega;
  const double pixel_area = px * py;

  // Pixels whose centre is too close to the boundary image.
  std::vector<char> skip(R * R, 0);
  auto column = [&](double x) { return (x - box.lo.x) / px - 0.5; };
  auto row = [&](double y) { return (y - box.lo.y) / py - 0.5; };
  auto clamp_index = [&](double v) {
    return static_cast<std::ptrdiff_t>(std::clamp(v, -1.0, static_cast<double>(R)));
  };
  const std::size_t m = img.size();
  for (std::size_t e = 0; e < m; ++e) {
    const Vec2 a = img[e];
    const Vec2 b = img[(e + 1) % m];
    const auto i0 = std::max<std::ptrdiff_t>(0, clamp_index(std::ceil(column(std::min(a.x, b.x) - margin))));
    const auto i1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(R) - 1,
                                             clamp_index(std::floor(column(std::max(a.x, b.x) + margin))));
    const auto j0 = std::max<std::ptrdiff_t>(0, clamp_index(std::ceil(row(std::min(a.y, b.y) - margin))));
    const auto j1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(R) - 1,
                                             clamp_index(std::floor(row(std::max(a.y, b.y) + margin))));
    for (auto j = j0; j <= j1; ++j) {
      for (auto i = i0; i <= i1; ++i) {
        const Vec2 c{box.lo.x + (static_cast<double>(i) + 0.5) * px, box.lo.y + (static_cast<double>(j) + 0.5) * py};
        if (segment_distance(c, a, b) <= margin) skip[static_cast<std::size_t>(j) * R + static_cast<std::size_t>(i)] = 1;
      }
    }
  }

  // Crossings of each pixel-centre scanline, with the half-open rule.
  std::vector<std::vector<std::pair<double, int>>> rows(R);
  for (std::size_t e = 0; e < m; ++e) {
    const Vec2 a = img[e];
    const Vec2 b = img[(e + 1) % m];
    if (a.y == b.y) continue;
    const auto j0 = std::max<std::ptrdiff_t>(0, clamp_index(std::floor(row(std::min(a.y, b.y)))));
    const auto j1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(R) - 1,
                                             clamp_index(std::ceil(row(std::max(a.y, b.y)))));
    for (auto j = j0; j <= j1; ++j) {
      const double yc = box.lo.y + (static_cast<double>(j) + 0.5) * py;
      if ((a.y <= yc) == (b.y <= yc)) continue;
      const double x = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
      rows[static_cast<std::size_t>(j)].push_back({x, b.y > a.y ? 1 : -1});
    }
  }

  std::vector<std::array<double, 3>> partial(R);
  parallel_for(R, [&](std::size_t j) {
    auto& cr = rows[j];
    std::sort(cr.begin(), cr.end());
    int w = 0;
    for (const auto& c : cr) w += c.second;  // winding far to the left
    std::size_t next = 0;
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < R; ++i) {
      const double xc = box.lo.x + (static_cast<double>(i) + 0.5) * px;
      while (next < cr.size() && cr[next].first <= xc) w -= cr[next++].second;
      if (skip[j * R + i]) {
        acc[2] += 1.0;
      } else {
        acc[0] += w;
        acc[1] += std::abs(w);
      }
    }
    partial[j] = acc;
  });
  double sum_signed = 0.0, sum_abs = 0.0, skipped = 0.0;
  for (const auto& p : partial) {
    sum_signed += p[0];
    sum_abs += p[1];
    skipped += p[2];
  }
  out.signed_value = sum_signed * pixel_area;
  out.absolute = sum_abs * pixel_area;
  out.skipped_area = skipped * pixel_area;
  if (out.skipped_area > 0.05 * out.box_area) {
    std::ostringstream msg;
    msg << "degree raster skipped " << 100.0 * out.skipped_area / out.box_area
        << "% of the image box near the boundary image";
    throw DegenerateBoundary(msg.str());
  }
  return out;
}

int preimage_count(const PlanarMap& g, const PlanarRegion& region, Vec2 y, int search_resolution) {
  if (search_resolution < 1) throw RangeError("search resolution must be positive");
  const auto S = static_cast<std::size_t>(search_resolution);
  const Box2 b = region.bounds();
  const double hx = b.width() / static_cast<double>(S);
  const double hy = b.height() / static_cast<double>(S);
  const double half_diag = 0.5 * std::hypot(hx, hy);

  std::vector<Vec2> corners((S + 1) * (S + 1));
  parallel_for(S + 1, [&](std::size_t j) {
    for (std::size_t i = 0; i <= S; ++i) {
      corners[j * (S + 1) + i] = g({b.lo.x + static_cast<double>(i) * hx, b.lo.y + static_cast<double>(j) * hy});
    }
  });

  std::vector<char> marked(S * S, 0);
  parallel_for(S, [&](std::size_t j) {
    for (std::size_t i = 0; i < S; ++i) {
      const Vec2 c{b.lo.x + (static_cast<double>(i) + 0.5) * hx, b.lo.y + (static_cast<double>(j) + 0.5) * hy};
      if (region.distance(c) > half_diag) continue;
      const std::array<Vec2, 4> q{corners[j * (S + 1) + i], corners[j * (S + 1) + i + 1],
                                  corners[(j + 1) * (S + 1) + i], corners[(j + 1) * (S + 1) + i + 1]};
      Box2 qb;
      double diam = 0.0;
      for (int u = 0; u < 4; ++u) {
        qb.expand(q[u]);
        for (int v = u + 1; v < 4; ++v) diam = std::max(diam, norm(q[u] - q[v]));
      }
      if (y.x < qb.lo.x - diam || y.x > qb.hi.x + diam || y.y < qb.lo.y - diam || y.y > qb.hi.y + diam) continue;
      if (hull_distance(small_hull(q), y) <= diam) marked[j * S + i] = 1;
    }
  });

  int components = 0;
  std::vector<char> seen(S * S, 0);
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < S * S; ++start) {
    if (!marked[start] || seen[start]) continue;
    ++components;
    seen[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const auto cj = static_cast<std::ptrdiff_t>(cur / S);
      const auto ci = static_cast<std::ptrdiff_t>(cur % S);
      for (std::ptrdiff_t dj = -1; dj <= 1; ++dj)
        for (std::ptrdiff_t di = -1; di <= 1; ++di) {
          const auto nj = cj + dj, ni = ci + di;
          if (nj < 0 || ni < 0 || nj >= static_cast<std::ptrdiff_t>(S) || ni >= static_cast<std::ptrdiff_t>(S)) continue;
          const auto nb = static_cast<std::size_t>(nj) * S + static_cast<std::size_t>(ni);
          if (marked[nb] && !seen[nb]) {
            seen[nb] = 1;
            queue.push_back(nb);
          }
        }
    }
  }
  return components;
}

VerificationReport check_degree_axioms(const PlanarMap& g, const PlanarRegion& region,
                                       const std::vector<PlanarRegion>& parts, Vec2 y, int raster) {
  if (raster < 2) throw RangeError("raster must be at least 2");
  const int whole = topological_degree(g, region, y);
  std::vector<int> part_degrees;
  int sum = 0;
  for (const auto& part : parts) {
    part_degrees.push_back(topological_degree(g, part, y));
    sum += part_degrees.back();
  }

  // Is y kept away from g(region \ union of parts)?
  const auto R = static_cast<std::size_t>(raster);
  const Box2 b = region.bounds();
  const double hx = b.width() / static_cast<double>(R - 1);
  const double hy = b.height() / static_cast<double>(R - 1);
  std::vector<Vec2> img(R * R);
  std::vector<char> outside(R * R, 0);
  for (std::size_t j = 0; j < R; ++j) {
    for (std::size_t i = 0; i < R; ++i) {
      const Vec2 p{b.lo.x + static_cast<double>(i) * hx, b.lo.y + static_cast<double>(j) * hy};
      img[j * R + i] = g(p);
      if (!region.contains(p)) continue;
      bool covered = false;
      for (const auto& part : parts) covered = covered || part.contains(p);
      outside[j * R + i] = covered ? 0 : 1;
    }
  }
  double modulus = 0.0;
  for (std::size_t j = 0; j < R; ++j) {
    for (std::size_t i = 0; i < R; ++i) {
      if (i + 1 < R) modulus = std::max(modulus, norm(img[j * R + i + 1] - img[j * R + i]));
      if (j + 1 < R) modulus = std::max(modulus, norm(img[(j + 1) * R + i] - img[j * R + i]));
    }
  }
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < R * R; ++n) {
    if (outside[n]) nearest = std::min(nearest, norm(img[n] - y));
  }
  const bool applicable = nearest > modulus;

  auto report = compare(parts.size() == 1 ? "degree_excision" : "degree_decomposition", whole, sum, 0.0,
                        GapKind::Absolute);
  if (!applicable) report.pass = true;
  report.details = {{"applicable", applicable},
                    {"region_degree", whole},
                    {"part_degrees", part_degrees},
                    {"distance_to_excluded_image", std::isfinite(nearest) ? nearest : -1.0},
                    {"sample_modulus", modulus}};
  return report;
}

}  // namespace bvdeg
