#include "bvdeg/field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bvdeg/errors.hpp"

namespace bvdeg {

Grid Grid::make(std::span<const std::size_t> shape, std::span<const double> spacing,
                std::span<const double> origin) {
  if (shape.empty() || shape.size() > 3 || spacing.size() != shape.size() ||
      origin.size() != shape.size()) {
    throw RangeError("grid needs 1..3 axes with matching shape/spacing/origin");
  }
  Grid g;
  g.dim = static_cast<int>(shape.size());
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (shape[d] < 1) throw RangeError("grid shape entries must be positive");
    if (!(spacing[d] > 0.0) || !std::isfinite(spacing[d])) {
      throw RangeError("grid spacing must be positive and finite");
    }
    if (!std::isfinite(origin[d])) throw RangeError("grid origin must be finite");
    g.shape[d] = shape[d];
    g.spacing[d] = spacing[d];
    g.origin[d] = origin[d];
  }
  return g;
}

Grid Grid::spanning(std::span<const std::size_t> shape, std::span<const double> lo,
                    std::span<const double> hi) {
  std::array<double, 3> h{};
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (shape[d] < 2) throw RangeError("a spanning grid needs at least 2 samples per axis");
    h[d] = (hi[d] - lo[d]) / static_cast<double>(shape[d] - 1);
  }
  return make(shape, std::span<const double>(h.data(), shape.size()), lo);
}

SampledMap::SampledMap(Grid grid, int dim_out, std::vector<double> values)
    : grid_(grid), dim_out_(dim_out) {
  if (grid_.dim < 1 || grid_.dim > 3) throw RangeError("dim_in must be in 1..3");
  if (dim_out < 1 || dim_out > 3) throw RangeError("dim_out must be in 1..3");
  for (int d = 0; d < grid_.dim; ++d) {
    if (grid_.shape[d] < 2) throw RangeError("sampled maps need at least 2 samples per axis");
    if (!(grid_.spacing[d] > 0.0)) throw RangeError("spacing must be positive");
  }
  if (values.size() != grid_.size() * static_cast<std::size_t>(dim_out)) {
    throw RangeError("value count " + std::to_string(values.size()) + " does not match grid (" +
                     std::to_string(grid_.size() * static_cast<std::size_t>(dim_out)) + ")");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw RangeError("non-finite sample value at index " + std::to_string(i));
    }
  }
  values_ = std::make_shared<const std::vector<double>>(std::move(values));
}

void SampledMap::interpolate(std::span<const double> x, std::span<double> out) const {
  std::array<std::size_t, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int d = 0; d < grid_.dim; ++d) {
    const double top = static_cast<double>(grid_.shape[d] - 1);
    const double u = std::clamp((x[d] - grid_.origin[d]) / grid_.spacing[d], 0.0, top);
    auto i = static_cast<std::size_t>(u);
    if (i > grid_.shape[d] - 2) i = grid_.shape[d] - 2;
    base[d] = i;
    frac[d] = u - static_cast<double>(i);
  }
  for (int c = 0; c < dim_out_; ++c) out[c] = 0.0;
  const int corners = 1 << grid_.dim;
  for (int corner = 0; corner < corners; ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int d = 0; d < 3; ++d) {
      std::size_t i = base[d];
      if (d < grid_.dim) {
        const bool up = (corner >> d) & 1;
        w *= up ? frac[d] : 1.0 - frac[d];
        i += up ? 1 : 0;
      }
      flat = flat * grid_.shape[d] + i;
    }
    if (w == 0.0) continue;
    for (int c = 0; c < dim_out_; ++c) out[c] += w * value(flat, c);
  }
}

Vec2 SampledMap::eval2(Vec2 p, int c0, int c1) const {
  const double u = std::clamp((p.x - grid_.origin[0]) / grid_.spacing[0], 0.0,
                              static_cast<double>(grid_.shape[0] - 1));
  const double v = std::clamp((p.y - grid_.origin[1]) / grid_.spacing[1], 0.0,
                              static_cast<double>(grid_.shape[1] - 1));
  auto i = static_cast<std::size_t>(u);
  auto j = static_cast<std::size_t>(v);
  if (i > grid_.shape[0] - 2) i = grid_.shape[0] - 2;
  if (j > grid_.shape[1] - 2) j = grid_.shape[1] - 2;
  const double a = u - static_cast<double>(i);
  const double b = v - static_cast<double>(j);
  const std::size_t n1 = grid_.shape[1];
  const std::size_t f00 = i * n1 + j;
  const std::size_t f01 = f00 + 1;
  const std::size_t f10 = f00 + n1;
  const std::size_t f11 = f10 + 1;
  auto blend = [&](int c) {
    return (1.0 - a) * ((1.0 - b) * value(f00, c) + b * value(f01, c)) +
           a * ((1.0 - b) * value(f10, c) + b * value(f11, c));
  };
  return {blend(c0), blend(c1)};
}

CellMeasure::CellMeasure(Grid grid, int components, std::vector<double> weights)
    : grid_(grid), components_(components) {
  if (components < 1) throw RangeError("measure needs at least one component");
  if (weights.size() != grid_.size() * static_cast<std::size_t>(components)) {
    throw RangeError("weight count does not match cell grid");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i])) {
      throw RangeError("non-finite cell weight at index " + std::to_string(i));
    }
  }
  weights_ = std::make_shared<const std::vector<double>>(std::move(weights));
}

double total_variation(const CellMeasure& mu) {
  const auto w = mu.weights();
  const auto m = static_cast<std::size_t>(mu.components());
  double total = 0.0;
  if (m == 1) {
    for (double v : w) total += std::abs(v);
    return total;
  }
  for (std::size_t i = 0; i < w.size(); i += m) {
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c) s += w[i + c] * w[i + c];
    total += std::sqrt(s);
  }
  return total;
}

CellMeasure directional_difference(const SampledMap& f, int axis) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim) throw RangeError("axis out of range");
  Grid cells = g;
  cells.shape[axis] = g.shape[axis] - 1;
  cells.origin[axis] = g.origin[axis] + 0.5 * g.spacing[axis];

  const int m = f.dim_out();
  const std::size_t step = g.stride(axis);
  std::vector<double> weights(cells.size() * static_cast<std::size_t>(m));
  for (std::size_t n = 0; n < cells.size(); ++n) {
    const auto idx = cells.unravel(n);
    double transverse = 1.0;
    for (int d = 0; d < g.dim; ++d) {
      if (d != axis) transverse *= dual_weight(idx[d], g.shape[d], g.spacing[d]);
    }
    const std::size_t lower = g.index(idx[0], idx[1], idx[2]);
    for (int c = 0; c < m; ++c) {
      weights[n * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)] =
          (f.value(lower + step, c) - f.value(lower, c)) * transverse;
    }
  }
  return CellMeasure(cells, m, std::move(weights));
}

SampledMap restrict_slice(const SampledMap& f, int k, double t) {
  if (f.dim_in() != 3) throw RangeError("restrict_slice needs a map on a 3D grid");
  if (k < 1 || k > 3) throw RangeError("slice axis must be 1, 2 or 3");
  const Grid& g = f.grid();
  const int axis = k - 1;
  const double lo = g.origin[axis];
  const double hi = g.upper(axis);
  const double slack = 1e-12 * (hi - lo);
  if (!(t >= lo - slack && t <= hi + slack)) {
    throw RangeError("slice position " + std::to_string(t) + " outside [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]");
  }
  const double u = std::clamp((t - lo) / g.spacing[axis], 0.0,
                              static_cast<double>(g.shape[axis] - 1));
  auto plane = static_cast<std::size_t>(u);
  if (plane > g.shape[axis] - 2) plane = g.shape[axis] - 2;
  const double lambda = u - static_cast<double>(plane);

  std::array<int, 2> keep{};
  for (int d = 0, n = 0; d < 3; ++d) {
    if (d != axis) keep[n++] = d;
  }
  Grid out;
  out.dim = 2;
  for (int n = 0; n < 2; ++n) {
    out.shape[n] = g.shape[keep[n]];
    out.spacing[n] = g.spacing[keep[n]];
    out.origin[n] = g.origin[keep[n]];
  }
  const int m = f.dim_out();
  std::vector<double> values(out.size() * static_cast<std::size_t>(m));
  std::array<std::size_t, 3> idx{};
  for (std::size_t a = 0; a < out.shape[0]; ++a) {
    for (std::size_t b = 0; b < out.shape[1]; ++b) {
      idx[keep[0]] = a;
      idx[keep[1]] = b;
      idx[axis] = plane;
      const std::size_t p0 = g.index(idx[0], idx[1], idx[2]);
      const std::size_t p1 = p0 + g.stride(axis);
      const std::size_t o = (a * out.shape[1] + b) * static_cast<std::size_t>(m);
      for (int c = 0; c < m; ++c) {
        values[o + static_cast<std::size_t>(c)] =
            (1.0 - lambda) * f.value(p0, c) + lambda * f.value(p1, c);
      }
    }
  }
  return SampledMap(out, m, std::move(values));
}

SampledMap coordinate_pair(const SampledMap& slice, int j) {
  if (slice.dim_out() != 3) throw RangeError("coordinate_pair needs a map into R^3");
  if (j < 1 || j > 3) throw RangeError("dropped coordinate must be 1, 2 or 3");
  std::array<int, 2> keep{};
  for (int c = 0, n = 0; c < 3; ++c) {
    if (c != j - 1) keep[n++] = c;
  }
  const std::size_t count = slice.grid().size();
  std::vector<double> values(count * 2);
  for (std::size_t i = 0; i < count; ++i) {
    values[2 * i] = slice.value(i, keep[0]);
    values[2 * i + 1] = slice.value(i, keep[1]);
  }
  return SampledMap(slice.grid(), 2, std::move(values));
}

}  // namespace bvdeg
