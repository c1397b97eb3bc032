#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bvdeg/dyadic.hpp"
#include "bvdeg/field.hpp"
#include "bvdeg/gallery.hpp"
#include "bvdeg/inversion.hpp"
#include "bvdeg/report.hpp"

namespace bvdeg {

struct AdjugateConfig {
  int n_slices = 33;
  int depth = 3;
  int raster = 32;
  int cell_boundary_resolution = 64;
  std::size_t injectivity_samples = 20000;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

struct AdjugateEntry {
  std::vector<double> slice_masses;  // |J| of the planar pair on each slice
  double integrated = 0.0;
};

/// (ADJ Df)_{k,j} masses, entries[k-1][j-1]: slices x_k = t, output j dropped.
struct AdjugateTable {
  std::array<std::array<AdjugateEntry, 3>, 3> entries;
  std::array<std::vector<double>, 3> slice_ts;
  double total = 0.0;
  /// Slices that failed even after the retry, as "k=<k> t=<t>: <reason>".
  std::vector<std::string> skipped;

  double entry(int k, int j) const { return entries[k - 1][j - 1].integrated; }
  nlohmann::json to_json() const;
};

/// Throws NonInjective if two of `samples` randomly chosen nodes (fixed seed)
/// have images closer than 1e-12 relative to the image diameter.
void check_injective_samples(const SampledMap& f, std::size_t samples, std::uint64_t seed = 0);

/// Per slice x_k = t (midpoints of n_slices equal steps) and dropped output
/// j, the total variation of the dyadic Jacobian measure of the planar pair;
/// integrated over t by the midpoint rule. A slice that raises a degree error
/// is retried once at t + step/4 and once at t - step/4, then skipped (the
/// remaining slices are rescaled to the full interval).
AdjugateTable distributional_adjugate(const SampledMap& f, const AdjugateConfig& config = {});

struct MuMeasure {
  std::array<double, 3> per_axis{0.0, 0.0, 0.0};
  std::array<double, 3> per_axis_lower{0.0, 0.0, 0.0};
  double total = 0.0;
  std::vector<std::string> skipped;
  nlohmann::json to_json() const;
};

/// Integral over t of the image area of each slice x_k = t, the area taken as
/// the upper Lebesgue-area bound of the slice surface.
MuMeasure mu_measure(const SampledMap& f, const AdjugateConfig& config = {});

/// Per-entry |minors| of the derivative integrated over the domain.
struct PointwiseAdjugate {
  std::array<std::array<double, 3>, 3> entries{};  // [k-1][j-1]
  double total = 0.0;
};

/// Central differences at the nodes (one-sided on faces), trapezoid weights.
PointwiseAdjugate pointwise_adjugate(const SampledMap& f);
/// Midpoint quadrature of an a.e. derivative on the box [lo, hi] with n
/// points per axis.
PointwiseAdjugate pointwise_adjugate(const DerivativeFn& derivative, const std::array<double, 3>& lo,
                                     const std::array<double, 3>& hi, std::size_t n);

/// Per domain cell, sum of |minors| of the cell-averaged difference quotient
/// times the cell volume: a cellwise discretisation of |ADJ Df|.
CellMeasure cell_adjugate_measure(const SampledMap& f);

struct PushforwardTrend {
  std::vector<std::size_t> resolutions;
  std::vector<double> fractions;  // mass share of the densest 1% of image cells
  double slope = 0.0;             // least-squares slope over the scale index
  nlohmann::json to_json() const;
};

/// Pushes the cell masses of `measure` (located at cell centres) through f
/// onto image grids of 2^(s+2) cells per axis, s = 0..n_scales-1. A flat
/// density keeps the fraction near 1%; concentration drives it towards 1.
/// Heuristic indicator only.
PushforwardTrend pushforward_ac_test(const SampledMap& f, const CellMeasure& measure, int n_scales);

struct RegularityConfig {
  AdjugateConfig adjugate;
  std::array<std::size_t, 3> image_shape{65, 65, 65};
  int ac_scales = 4;
  /// Analytic a.e. derivative for the pointwise adjugate; central differences
  /// of the samples are used when empty.
  DerivativeFn derivative;
  std::size_t derivative_points = 64;
  double tolerance = 0.05;
};

struct RegularityVerdict {
  AdjugateTable adj;
  MuMeasure mu;
  InverseVariation inverse_tv;
  PointwiseAdjugate pointwise;
  PushforwardTrend pushforward;
  bool adj_finite = false;
  bool slice_areas_finite = false;
  nlohmann::json gaps = nlohmann::json::object();
  nlohmann::json to_json() const;
};

/// Runs the adjugate, mu, inversion and pointwise stages and records the
/// consistency gaps: inverse_tv vs mu (asserted by callers), adj vs
/// inverse_tv (informational), inverse_tv vs pointwise adjugate and the
/// singular part adj - pointwise.
RegularityVerdict regularity_verdict(const SampledMap& f, const RegularityConfig& config);

struct StabilityConfig {
  std::vector<std::size_t> shape{97, 49, 49};
  AdjugateConfig adjugate;
  double spread = 0.10;          // max <= (1 + spread) * min
  double oracle_tolerance = 0.04;
};

/// |ADJ Df_j| totals along a sequence of gallery maps; passes when the sup is
/// bounded (max <= (1 + spread) min) and the last total matches its oracle.
VerificationReport weak_convergence_stability(const std::vector<GallerySpec>& specs,
                                              const StabilityConfig& config);

}  // namespace bvdeg
