#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bvdeg/field.hpp"

namespace bvdeg {

/// Closed-form test maps. Names: cantor1d, cantor_shear3d, identity3d, linear,
/// zpow, radial_stretch, shear2d.
struct GallerySpec {
  std::string name;
  int level = 6;               // cantor1d, cantor_shear3d
  std::vector<double> matrix;  // linear: row-major 2x2 or 3x3
  int k = 2;                   // zpow
  double p = 2.0;              // radial_stretch exponent
  double s = 0.5;              // shear2d slope
};

using PointFn = std::function<void(std::span<const double>, std::span<double>)>;
/// Row-major dim_out x dim_in derivative.
using DerivativeFn = std::function<std::array<double, 9>(std::span<const double>)>;

struct GalleryMap {
  GallerySpec spec;
  int dim_in = 0;
  int dim_out = 0;
  std::array<double, 3> lo{0.0, 0.0, 0.0};  // domain box
  std::array<double, 3> hi{1.0, 1.0, 1.0};
  PointFn eval;
  PointFn inverse;          // empty when no closed form is provided
  DerivativeFn derivative;  // a.e. derivative; empty when not provided
};

/// Validates `spec` and builds its evaluator. Throws RangeError on bad params.
GalleryMap make_gallery(const GallerySpec& spec);

/// Samples the map on `shape` nodes spanning its domain box.
SampledMap sample_gallery(const GalleryMap& map, std::span<const std::size_t> shape);
SampledMap sample_gallery(const GallerySpec& spec, std::span<const std::size_t> shape);

/// Closed-form expected values, computed without the numerical pipeline.
/// Quantities: tv (cantor1d); adj_total_variation, mu_total, inverse_tv_total,
/// pointwise_adj_total (3D maps); jacobian_mass_disk (planar maps, disk of
/// `radius` centred at the origin; zpow and radial_stretch on [-1,1]^2).
double oracle(const GallerySpec& spec, std::string_view quantity,
              std::optional<double> radius = std::nullopt);

/// Expected (ADJ Df)_{k,j} masses, indexed [k-1][j-1].
std::array<std::array<double, 3>, 3> oracle_adjugate_table(const GallerySpec& spec);

/// Expected per-axis slice-image areas.
std::array<double, 3> oracle_mu_per_axis(const GallerySpec& spec);

nlohmann::json to_json(const GallerySpec& spec);
GallerySpec gallery_spec_from_json(const nlohmann::json& j);

}  // namespace bvdeg
