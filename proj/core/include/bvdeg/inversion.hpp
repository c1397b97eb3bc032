#pragma once

#include <array>
#include <span>
#include <vector>

#include "bvdeg/field.hpp"

namespace bvdeg {

/// Inverse of a sampled 3D homeomorphism on a grid over its image bounding
/// box. Nodes outside the image are absent; `map` carries nearest-defined
/// values there so it stays a valid SampledMap.
struct InverseField {
  SampledMap map;
  std::vector<char> defined;
  double defined_fraction = 0.0;
  std::size_t unresolved_interior = 0;
};

/// For each image node, finds a domain cell whose trilinear image contains it
/// (bucketed by image bounding boxes) and solves the trilinear system by
/// damped Newton iteration. Throws InversionFailure when more than 1% of the
/// nodes lying between defined nodes along every axis stay unresolved.
InverseField invert_homeomorphism(const SampledMap& f, std::span<const std::size_t> image_shape);

struct InverseVariation {
  std::array<double, 3> per_coordinate{0.0, 0.0, 0.0};
  double total = 0.0;
  double coverage = 0.0;
};

/// Anisotropic variation of each inverse coordinate over grid edges whose
/// two ends are defined (dual-cell transverse weights). Throws RangeError
/// when fewer than `min_coverage` of the nodes are defined.
InverseVariation inverse_variation(const InverseField& inverse, double min_coverage = 0.95);

}  // namespace bvdeg
