#pragma once

#include <functional>
#include <vector>

#include "bvdeg/degree.hpp"
#include "bvdeg/field.hpp"
#include "bvdeg/report.hpp"

namespace bvdeg {

/// C-infinity step: 1 for s <= 0, 0 for s >= 1.
double smooth_step(double s);
double smooth_step_derivative(double s);

/// Smooth compactly supported function with its gradient.
struct TestFunction {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
  Box2 support;

  /// exp(1 - 1 / (1 - |x - c|^2 / r^2)) inside the disk, 0 outside.
  static TestFunction bump(Vec2 center, double radius);
  /// 1 on the disk of radius r - width, 0 outside radius r.
  static TestFunction disk_cutoff(Vec2 center, double radius, double width);
  /// Product of 1D cutoffs: 1 on the box shrunk by width, 0 outside it.
  static TestFunction rect_cutoff(const Box2& box, double width);
};

/// -sum over grid cells of g1 * (d1 phi * D2 g2 - d2 phi * D1 g2), where g1
/// and the gradient of phi are taken at the cell centre and D_i g2 is the
/// mean forward difference of g2 along axis i times the transverse spacing.
/// The support of phi must stay one cell away from the grid boundary.
double distributional_jacobian(const SampledMap& g, const TestFunction& phi);

/// Signed degree integral over a disk or rectangle against the distributional
/// Jacobian paired with cutoffs of widths delta, delta/2, delta/4, combined by
/// Richardson extrapolation (exact when the pairing is quadratic in delta).
/// delta <= 0 picks 0.3 * (radius or half the shorter side), raised towards
/// 32 grid cells (at most half that reach) so the finest cutoff is resolved.
VerificationReport verify_degree_identity(const SampledMap& g, const PlanarRegion& region, int raster,
                                          double tolerance, double delta = 0.0);

/// Stieltjes sum of g1 d(g2) around the circle, counter-clockwise, with g1
/// taken at the arc midpoints.
double boundary_pairing(const PlanarMap& g, Vec2 center, double radius, std::size_t samples = 4096);

struct BoundaryConvergenceOptions {
  std::size_t circle_samples = 4096;
  int raster = 128;
  double tolerance = 0.05;
};

/// For each epsilon: mollify g, restrict to the circle and compare the curve
/// variation (and the signed degree integral) with the unmollified values.
/// Passes when the gap at the last epsilon is within tolerance and below the
/// gap at the first.
VerificationReport mollified_boundary_convergence(const SampledMap& g, Vec2 center, double radius,
                                                  const std::vector<double>& eps_sequence,
                                                  const BoundaryConvergenceOptions& options = {});

}  // namespace bvdeg
