#pragma once

#include <array>
#include <span>
#include <vector>

#include "bvdeg/field.hpp"
#include "bvdeg/report.hpp"

namespace bvdeg {

/// Sum of |s[i+1] - s[i]|. Throws RangeError for fewer than 2 samples.
double tv_1d(std::span<const double> samples);

/// Variation of a sampled curve in R^m (points interleaved, m components):
/// sum of Euclidean step lengths. `closed` adds the step from last to first.
double curve_variation(std::span<const double> points, int m, bool closed = false);

/// Integral over lines parallel to `axis` (1-based) of the 1D variation along
/// each line, weighted by the transverse dual-cell measure of the line.
/// Vector-valued maps use the Euclidean norm of each step.
double slice_variation_integral(const SampledMap& f, int axis);

/// Sum over axes of total_variation(directional_difference(f, axis)).
double anisotropic_tv(const SampledMap& f);

/// Secondary estimator: per cell, Euclidean norm of the averaged forward
/// differences times the cell volume, summed over output components.
double isotropic_tv(const SampledMap& f);

/// Relative l1 perimeter of {u > t}: adjacent sample pairs that disagree on
/// membership, each weighted by its transverse dual-cell measure.
double superlevel_perimeter(const SampledMap& u, double t);

struct LevelSetProfile {
  std::vector<double> thresholds;  // midpoints between consecutive distinct values
  std::vector<double> perimeters;
  std::vector<double> gaps;        // distance between the bracketing values
  /// Layer-cake integral: sum of perimeter * gap.
  double integral() const;
};

/// Perimeters of every superlevel set of a scalar field. All thresholds
/// between two consecutive distinct sample values give the same set, so the
/// list is complete.
LevelSetProfile level_set_profile(const SampledMap& u);

/// Anisotropic |Du| against the layer-cake integral of perimeters.
VerificationReport coarea_check(const SampledMap& u, double tolerance = 1e-10);

struct HausdorffEstimate {
  double value = 0.0;
  std::array<double, 3> passes{0.0, 0.0, 0.0};
  double spacing = 0.0;  // median nearest-neighbour distance
};

/// Greedy upper estimate of the unnormalised content H^k_delta of a point
/// cloud (points interleaved, `dim` coordinates each). Each pass walks the
/// points from a different start, grouping everything within delta/2 of the
/// seed, and charges min(bbox diagonal + spacing, delta)^k per group. The
/// single-set cover is used when the whole cloud fits in diameter delta.
HausdorffEstimate hausdorff_content(std::span<const double> points, int dim, int k, double delta);

}  // namespace bvdeg
