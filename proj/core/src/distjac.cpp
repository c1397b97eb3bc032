#include "bvdeg/distjac.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bvdeg/errors.hpp"
#include "bvdeg/parallel.hpp"
#include "bvdeg/variation.hpp"

namespace bvdeg {
namespace {

double bump_kernel(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_kernel_derivative(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

// 1D cutoff on [lo, hi]: 1 on [lo + w, hi - w].
double cutoff_1d(double x, double lo, double hi, double w) {
  return smooth_step((lo + w - x) / w) * smooth_step((x - (hi - w)) / w);
}

double cutoff_1d_derivative(double x, double lo, double hi, double w) {
  const double a = (lo + w - x) / w;
  const double b = (x - (hi - w)) / w;
  return -smooth_step_derivative(a) / w * smooth_step(b) + smooth_step(a) * smooth_step_derivative(b) / w;
}

}  // namespace

double smooth_step(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = bump_kernel(1.0 - s);
  const double b = bump_kernel(s);
  return a / (a + b);
}

double smooth_step_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = bump_kernel(1.0 - s);
  const double b = bump_kernel(s);
  const double da = -bump_kernel_derivative(1.0 - s);
  const double db = bump_kernel_derivative(s);
  return (da * b - a * db) / ((a + b) * (a + b));
}

TestFunction TestFunction::bump(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw RangeError("bump radius must be positive");
  TestFunction f;
  f.value = [=](Vec2 p) {
    const double q = dot(p - center, p - center) / (radius * radius);
    return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
  };
  f.gradient = [=](Vec2 p) {
    const Vec2 d = p - center;
    const double q = dot(d, d) / (radius * radius);
    if (q >= 1.0) return Vec2{};
    const double v = std::exp(1.0 - 1.0 / (1.0 - q));
    const double dq = -v / ((1.0 - q) * (1.0 - q));
    return (2.0 * dq / (radius * radius)) * d;
  };
  f.support.expand(center - Vec2{radius, radius});
  f.support.expand(center + Vec2{radius, radius});
  return f;
}

TestFunction TestFunction::disk_cutoff(Vec2 center, double radius, double width) {
  if (!(radius > 0.0) || !(width > 0.0) || width > radius) {
    throw RangeError("disk cutoff needs 0 < width <= radius");
  }
  TestFunction f;
  f.value = [=](Vec2 p) { return smooth_step((norm(p - center) - (radius - width)) / width); };
  f.gradient = [=](Vec2 p) {
    const Vec2 d = p - center;
    const double r = norm(d);
    if (r == 0.0) return Vec2{};
    return (smooth_step_derivative((r - (radius - width)) / width) / (width * r)) * d;
  };
  f.support.expand(center - Vec2{radius, radius});
  f.support.expand(center + Vec2{radius, radius});
  return f;
}

TestFunction TestFunction::rect_cutoff(const Box2& box, double width) {
  if (!(width > 0.0) || 2.0 * width > std::min(box.width(), box.height())) {
    throw RangeError("rectangle cutoff width must be positive and at most half the shorter side");
  }
  TestFunction f;
  f.value = [=](Vec2 p) {
    return cutoff_1d(p.x, box.lo.x, box.hi.x, width) * cutoff_1d(p.y, box.lo.y, box.hi.y, width);
  };
  f.gradient = [=](Vec2 p) {
    return Vec2{cutoff_1d_derivative(p.x, box.lo.x, box.hi.x, width) * cutoff_1d(p.y, box.lo.y, box.hi.y, width),
                cutoff_1d(p.x, box.lo.x, box.hi.x, width) * cutoff_1d_derivative(p.y, box.lo.y, box.hi.y, width)};
  };
  f.support = box;
  return f;
}

double distributional_jacobian(const SampledMap& g, const TestFunction& phi) {
  if (g.dim_in() != 2 || g.dim_out() < 2) throw RangeError("distributional Jacobian needs a planar map");
  const Grid& grid = g.grid();
  const double h1 = grid.spacing[0];
  const double h2 = grid.spacing[1];
  const Box2& s = phi.support;
  const double slack = 1e-9 * std::max(h1, h2);
  if (s.lo.x < grid.origin[0] + h1 - slack || s.hi.x > grid.upper(0) - h1 + slack ||
      s.lo.y < grid.origin[1] + h2 - slack || s.hi.y > grid.upper(1) - h2 + slack) {
    throw RangeError("test function support must stay one cell inside the grid");
  }
  const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor((s.lo.x - grid.origin[0]) / h1) - 1.0));
  const auto i1 = std::min(grid.shape[0] - 1,
                           static_cast<std::size_t>(std::ceil((s.hi.x - grid.origin[0]) / h1) + 1.0));
  const auto j0 = static_cast<std::size_t>(std::max(0.0, std::floor((s.lo.y - grid.origin[1]) / h2) - 1.0));
  const auto j1 = std::min(grid.shape[1] - 1,
                           static_cast<std::size_t>(std::ceil((s.hi.y - grid.origin[1]) / h2) + 1.0));

  const std::size_t n1 = grid.shape[1];
  std::vector<double> rows(i1 - i0);
  parallel_for(i1 - i0, [&](std::size_t r) {
    const std::size_t i = i0 + r;
    double acc = 0.0;
    for (std::size_t j = j0; j < j1; ++j) {
      const std::size_t f00 = i * n1 + j;
      const std::size_t f01 = f00 + 1;
      const std::size_t f10 = f00 + n1;
      const std::size_t f11 = f10 + 1;
      const Vec2 c{grid.coord(0, i) + 0.5 * h1, grid.coord(1, j) + 0.5 * h2};
      const Vec2 grad = phi.gradient(c);
      if (grad.x == 0.0 && grad.y == 0.0) continue;
      const double g1 = 0.25 * (g.value(f00, 0) + g.value(f01, 0) + g.value(f10, 0) + g.value(f11, 0));
      const double d2g2 = 0.5 * ((g.value(f01, 1) - g.value(f00, 1)) + (g.value(f11, 1) - g.value(f10, 1))) * h1;
      const double d1g2 = 0.5 * ((g.value(f10, 1) - g.value(f00, 1)) + (g.value(f11, 1) - g.value(f01, 1))) * h2;
      acc += g1 * (grad.x * d2g2 - grad.y * d1g2);
    }
    rows[r] = acc;
  });
  double total = 0.0;
  for (double v : rows) total += v;
  return -total;
}

VerificationReport verify_degree_identity(const SampledMap& g, const PlanarRegion& region, int raster,
                                          double tolerance, double delta) {
  if (region.kind() == PlanarRegion::Kind::Polygon) {
    throw RangeError("degree identity is checked on disks and rectangles");
  }
  const Box2 box = region.bounds();
  if (!(delta > 0.0)) {
    delta = region.kind() == PlanarRegion::Kind::Disk ? 0.3 * region.radius()
                                                       : 0.15 * std::min(box.width(), box.height());
    // The finest cutoff should still span several cells.
    const double reach = region.kind() == PlanarRegion::Kind::Disk ? 0.5 * region.radius()
                                                                   : 0.25 * std::min(box.width(), box.height());
    const double h = std::max(g.grid().spacing[0], g.grid().spacing[1]);
    delta = std::max(delta, std::min(32.0 * h, reach));
  }
  auto pairing = [&](double w) {
    const auto phi = region.kind() == PlanarRegion::Kind::Disk
                         ? TestFunction::disk_cutoff(region.center(), region.radius(), w)
                         : TestFunction::rect_cutoff(box, w);
    return distributional_jacobian(g, phi);
  };
  const double j1 = pairing(delta);
  const double j2 = pairing(0.5 * delta);
  const double j4 = pairing(0.25 * delta);
  const double extrapolated = (j1 - 6.0 * j2 + 8.0 * j4) / 3.0;
  const auto deg = degree_integral(planar_map(g), region, raster);

  auto report = compare("degree_identity", deg.signed_value, extrapolated, tolerance);
  report.details = {{"degree_integral", {{"signed", deg.signed_value},
                                         {"absolute", deg.absolute},
                                         {"skipped_area", deg.skipped_area},
                                         {"boundary_points", deg.boundary_points}}},
                    {"widths", {delta, 0.5 * delta, 0.25 * delta}},
                    {"pairings", {j1, j2, j4}},
                    {"extrapolated", extrapolated},
                    {"raster", raster}};
  return report;
}

double boundary_pairing(const PlanarMap& g, Vec2 center, double radius, std::size_t samples) {
  if (samples < 64) throw RangeError("boundary pairing needs at least 64 circle samples");
  if (!(radius > 0.0)) throw RangeError("radius must be positive");
  const double step = 2.0 * std::numbers::pi / static_cast<double>(samples);
  auto at = [&](double t) { return g({center.x + radius * std::cos(t), center.y + radius * std::sin(t)}); };
  std::vector<Vec2> nodes(samples);
  for (std::size_t i = 0; i < samples; ++i) nodes[i] = at(step * static_cast<double>(i));
  double total = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec2 mid = at(step * (static_cast<double>(i) + 0.5));
    total += mid.x * (nodes[(i + 1) % samples].y - nodes[i].y);
  }
  return total;
}

VerificationReport mollified_boundary_convergence(const SampledMap& g, Vec2 center, double radius,
                                                  const std::vector<double>& eps_sequence,
                                                  const BoundaryConvergenceOptions& options) {
  if (g.dim_in() != 2 || g.dim_out() < 2) throw RangeError("boundary convergence needs a planar map");
  if (eps_sequence.empty()) throw RangeError("epsilon sequence is empty");
  for (std::size_t i = 1; i < eps_sequence.size(); ++i) {
    if (!(eps_sequence[i] < eps_sequence[i - 1])) throw RangeError("epsilon sequence must decrease");
  }
  const std::size_t n = options.circle_samples;
  auto circle_variation = [&](const SampledMap& f) {
    const Grid& gr = f.grid();
    if (center.x - radius < gr.origin[0] || center.x + radius > gr.upper(0) ||
        center.y - radius < gr.origin[1] || center.y + radius > gr.upper(1)) {
      throw RangeError("circle leaves the grid of the (mollified) map");
    }
    std::vector<double> pts(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      const Vec2 v = f.eval2({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
      pts[2 * i] = v.x;
      pts[2 * i + 1] = v.y;
    }
    return curve_variation(pts, 2, true);
  };
  const auto disk = PlanarRegion::disk(center, radius);
  auto degree_of = [&](const SampledMap& f) {
    return degree_integral(planar_map(f), disk, options.raster).signed_value;
  };

  const double base_var = circle_variation(g);
  const double base_deg = degree_of(g);
  auto rel = [](double v, double ref) { return ref == 0.0 ? std::abs(v) : std::abs(v - ref) / std::abs(ref); };

  std::vector<double> vars, degs, gaps, deg_gaps;
  std::vector<bool> unchanged;
  for (double eps : eps_sequence) {
    const auto m = mollify(g, MollifierSpec{eps, MollifierProfile::CubicBump});
    vars.push_back(circle_variation(m.map));
    degs.push_back(degree_of(m.map));
    gaps.push_back(rel(vars.back(), base_var));
    deg_gaps.push_back(rel(degs.back(), base_deg));
    unchanged.push_back(m.unchanged);
  }
  const double first = gaps.front();
  const double last = gaps.back();
  auto report = compare("mollified_boundary_variation", vars.back(), base_var, options.tolerance);
  report.pass = last <= options.tolerance && (last < first || last == 0.0);
  report.details = {{"epsilons", eps_sequence},
                    {"variations", vars},
                    {"variation_gaps", gaps},
                    {"degree_integrals", degs},
                    {"degree_gaps", deg_gaps},
                    {"unmollified_variation", base_var},
                    {"unmollified_degree_integral", base_deg},
                    {"unchanged", unchanged}};
  return report;
}

}  // namespace bvdeg
