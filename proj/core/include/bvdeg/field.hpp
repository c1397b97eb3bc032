#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "bvdeg/geometry.hpp"

namespace bvdeg {

/// Uniform tensor grid in dimension 1..3. Storage order is row-major with the
/// last axis fastest. Unused trailing axes have shape 1.
struct Grid {
  int dim = 0;
  std::array<std::size_t, 3> shape{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  static Grid make(std::span<const std::size_t> shape, std::span<const double> spacing,
                   std::span<const double> origin);
  /// `n` samples per axis covering [lo_i, hi_i].
  static Grid spanning(std::span<const std::size_t> shape, std::span<const double> lo,
                       std::span<const double> hi);

  std::size_t size() const { return shape[0] * shape[1] * shape[2]; }
  std::size_t index(std::size_t i0, std::size_t i1 = 0, std::size_t i2 = 0) const {
    return (i0 * shape[1] + i1) * shape[2] + i2;
  }
  std::array<std::size_t, 3> unravel(std::size_t flat) const {
    const std::size_t i2 = flat % shape[2];
    flat /= shape[2];
    return {flat / shape[1], flat % shape[1], i2};
  }
  double coord(int axis, std::size_t i) const {
    return origin[axis] + spacing[axis] * static_cast<double>(i);
  }
  double upper(int axis) const { return coord(axis, shape[axis] - 1); }
  double extent(int axis) const { return spacing[axis] * static_cast<double>(shape[axis] - 1); }
  /// Distance in storage between neighbours along `axis`.
  std::size_t stride(int axis) const {
    return axis == 0 ? shape[1] * shape[2] : axis == 1 ? shape[2] : 1;
  }
};

/// A map from a uniform grid in R^dim_in to R^dim_out, given by its samples.
/// Immutable; copies share the sample buffer.
class SampledMap {
 public:
  SampledMap(Grid grid, int dim_out, std::vector<double> values);

  /// Samples fn(x, y) at every grid node, where x has grid.dim entries and y
  /// has dim_out entries.
  template <class Fn>
  static SampledMap sample(const Grid& grid, int dim_out, Fn&& fn) {
    std::vector<double> values(grid.size() * static_cast<std::size_t>(dim_out));
    std::array<double, 3> x{};
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const auto idx = grid.unravel(n);
      for (int d = 0; d < grid.dim; ++d) x[d] = grid.coord(d, idx[d]);
      fn(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim)),
         std::span<double>(values.data() + n * static_cast<std::size_t>(dim_out),
                           static_cast<std::size_t>(dim_out)));
    }
    return SampledMap(grid, dim_out, std::move(values));
  }

  const Grid& grid() const noexcept { return grid_; }
  int dim_in() const noexcept { return grid_.dim; }
  int dim_out() const noexcept { return dim_out_; }
  std::span<const double> values() const noexcept { return *values_; }
  std::span<const double> at(std::size_t flat) const {
    return std::span<const double>(*values_).subspan(flat * static_cast<std::size_t>(dim_out_),
                                                     static_cast<std::size_t>(dim_out_));
  }
  double value(std::size_t flat, int component) const {
    return (*values_)[flat * static_cast<std::size_t>(dim_out_) + static_cast<std::size_t>(component)];
  }

  /// Multilinear interpolation; points outside the grid are clamped onto it.
  void interpolate(std::span<const double> x, std::span<double> out) const;

  /// Bilinear evaluation of components (c0, c1) of a planar map.
  Vec2 eval2(Vec2 p, int c0 = 0, int c1 = 1) const;

 private:
  Grid grid_;
  int dim_out_;
  std::shared_ptr<const std::vector<double>> values_;
};

/// A (possibly vector-valued) measure given by masses on the cells of a grid.
/// `grid.origin` is the centre of cell 0 and `grid.spacing` the centre-to-centre
/// distance; `grid.shape` counts cells.
class CellMeasure {
 public:
  CellMeasure(Grid grid, int components, std::vector<double> weights);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::span<const double> weights() const noexcept { return *weights_; }
  std::span<const double> at(std::size_t cell) const {
    return std::span<const double>(*weights_).subspan(cell * static_cast<std::size_t>(components_),
                                                      static_cast<std::size_t>(components_));
  }

 private:
  Grid grid_;
  int components_;
  std::shared_ptr<const std::vector<double>> weights_;
};

/// Sum over cells of the l2 norm of each cell's weight vector.
double total_variation(const CellMeasure& mu);

/// Forward-difference derivative measure of `f` along `axis` (0-based).
///
/// Cells are the edges between consecutive samples along `axis`; each edge
/// carries (f(i+1) - f(i)) times the transverse dual-cell measure of its line
/// (spacing product over the other axes, halved per axis at domain faces).
/// With this weighting the total variation of the measure equals the line
/// integral of one-dimensional variations, and summing over thresholds of the
/// relative perimeters reproduces it exactly.
CellMeasure directional_difference(const SampledMap& f, int axis);

/// Transverse dual-cell weight of sample index i along an axis with n samples.
inline double dual_weight(std::size_t i, std::size_t n, double h) {
  return (i == 0 || i + 1 == n) ? 0.5 * h : h;
}

/// f^t_k: restriction of a 3D map to the plane x_k = t (k is 1-based),
/// linear along axis k between the bracketing sample planes.
SampledMap restrict_slice(const SampledMap& f, int k, double t);

/// f^t_{k,j}: drops output coordinate j (1-based) of a 2D -> 3D slice, keeping
/// the remaining two in increasing order.
SampledMap coordinate_pair(const SampledMap& slice, int j);

enum class MollifierProfile { CubicBump };

struct MollifierSpec {
  double epsilon = 0.0;
  MollifierProfile profile = MollifierProfile::CubicBump;
};

struct MollifyResult {
  SampledMap map;
  /// True when epsilon is below the grid spacing and `map` is the input.
  bool unchanged = false;
};

/// Discrete convolution with the sampled radial kernel (1 - r^2)^3 of radius
/// epsilon, renormalised to unit mass. The output grid keeps only nodes whose
/// kernel support lies inside the input grid.
MollifyResult mollify(const SampledMap& f, const MollifierSpec& spec);

}  // namespace bvdeg
