#include "bvdeg/dyadic.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "bvdeg/errors.hpp"
#include "bvdeg/parallel.hpp"

namespace bvdeg {
namespace {

constexpr std::array<Vec2, 3> kJitter{{{0.137, 0.291}, {0.419, 0.073}, {0.251, 0.383}}};

std::ptrdiff_t floor_div(std::ptrdiff_t a, std::ptrdiff_t b) {
  std::ptrdiff_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct CellIntegral {
  DegreeIntegral value;
  bool empty = true;
};

// Degree integrals of every square of a layer.
std::vector<CellIntegral> integrate_layer(const PlanarMap& g, const DyadicLayer& layer,
                                          const JacobianOptions& options) {
  std::vector<CellIntegral> out(layer.cells.size());
  parallel_for(layer.cells.size(), [&](std::size_t n) {
    const auto& cell = layer.cells[n];
    if (cell.clipped.empty()) return;
    const auto region = PlanarRegion::polygon(cell.clipped, options.cell_boundary_resolution);
    try {
      out[n].value = degree_integral(g, region, options.raster);
    } catch (const DegenerateBoundary& e) {
      std::ostringstream msg;
      msg << "dyadic square (" << cell.i << ", " << cell.j << ") side " << layer.side << ": " << e.what();
      throw DegenerateBoundary(msg.str());
    }
    out[n].empty = false;
  });
  return out;
}

// Runs fn(grid) on the original anchor, then on up to three jittered ones
// while fn throws DegenerateBoundary.
template <class Fn>
auto with_jitter(const DyadicGrid& grid, int depth, Fn&& fn) {
  const double finest = grid.side(depth);
  for (std::size_t attempt = 0;; ++attempt) {
    DyadicGrid g = grid;
    if (attempt > 0) g.anchor = grid.anchor + finest * kJitter[attempt - 1];
    try {
      return fn(g);
    } catch (const DegenerateBoundary&) {
      if (attempt == kJitter.size()) throw;
    }
  }
}

}  // namespace

double DyadicGrid::side(int depth) const { return std::ldexp(base_size, -depth); }

DyadicGrid DyadicGrid::covering(const PlanarRegion& region) {
  const Box2 b = region.bounds();
  return {b.lo, std::max(b.width(), b.height())};
}

DyadicLayer dyadic_layer(const DyadicGrid& grid, const PlanarRegion& region, int depth) {
  if (depth < 0) throw RangeError("dyadic depth must be non-negative");
  if (!(grid.base_size > 0.0)) throw RangeError("dyadic base size must be positive");
  DyadicLayer layer;
  layer.side = grid.side(depth);
  const Box2 b = region.bounds();
  // Tiny slack so boundaries that land on grid lines do not add empty rows.
  const double slack = 1e-12 * layer.side;
  const auto i0 = static_cast<std::ptrdiff_t>(std::floor((b.lo.x - grid.anchor.x + slack) / layer.side));
  const auto i1 = static_cast<std::ptrdiff_t>(std::ceil((b.hi.x - grid.anchor.x - slack) / layer.side));
  const auto j0 = static_cast<std::ptrdiff_t>(std::floor((b.lo.y - grid.anchor.y + slack) / layer.side));
  const auto j1 = static_cast<std::ptrdiff_t>(std::ceil((b.hi.y - grid.anchor.y - slack) / layer.side));
  layer.i0 = i0;
  layer.j0 = j0;
  layer.nx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, i1 - i0));
  layer.ny = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, j1 - j0));
  layer.cells.resize(layer.nx * layer.ny);
  for (std::size_t a = 0; a < layer.nx; ++a) {
    for (std::size_t c = 0; c < layer.ny; ++c) {
      auto& cell = layer.cells[a * layer.ny + c];
      cell.i = i0 + static_cast<std::ptrdiff_t>(a);
      cell.j = j0 + static_cast<std::ptrdiff_t>(c);
      cell.box.lo = {grid.anchor.x + static_cast<double>(cell.i) * layer.side,
                     grid.anchor.y + static_cast<double>(cell.j) * layer.side};
      cell.box.hi = {cell.box.lo.x + layer.side, cell.box.lo.y + layer.side};
      cell.clipped = region.clip_box(cell.box);
    }
  }
  return layer;
}

CellMeasure jacobian_measure(const PlanarMap& g, const PlanarRegion& region, const DyadicGrid& grid,
                             int depth, const JacobianOptions& options) {
  return with_jitter(grid, depth, [&](const DyadicGrid& dg) {
    const auto layer = dyadic_layer(dg, region, depth);
    const auto integrals = integrate_layer(g, layer, options);
    std::vector<double> weights(integrals.size());
    for (std::size_t n = 0; n < integrals.size(); ++n) weights[n] = integrals[n].value.signed_value;
    Grid cells;
    cells.dim = 2;
    cells.shape = {layer.nx, layer.ny, 1};
    cells.spacing = {layer.side, layer.side, 1.0};
    cells.origin = {dg.anchor.x + (static_cast<double>(layer.i0) + 0.5) * layer.side,
                    dg.anchor.y + (static_cast<double>(layer.j0) + 0.5) * layer.side, 0.0};
    return CellMeasure(cells, 1, std::move(weights));
  });
}

AreaVariation area_variation(const PlanarMap& g, const PlanarRegion& region, const DyadicGrid& grid,
                             int max_depth, const JacobianOptions& options) {
  if (max_depth < 0) throw RangeError("dyadic depth must be non-negative");
  return with_jitter(grid, max_depth, [&](const DyadicGrid& dg) {
    AreaVariation av;
    av.grid_used = dg;
    std::vector<CellIntegral> finest;
    for (int d = 0; d <= max_depth; ++d) {
      const auto layer = dyadic_layer(dg, region, d);
      auto integrals = integrate_layer(g, layer, options);
      double v = 0.0;
      for (const auto& ci : integrals) v += ci.value.absolute;
      av.v.push_back(v);
      if (d == max_depth) {
        // Keyed by square index; std::map fixes the summation order.
        std::map<std::pair<std::ptrdiff_t, std::ptrdiff_t>, double> sums;
        for (std::size_t n = 0; n < integrals.size(); ++n) {
          if (!integrals[n].empty) sums[{layer.cells[n].i, layer.cells[n].j}] = integrals[n].value.signed_value;
        }
        // levels[e] holds signed sums of squares at depth e.
        std::vector<std::map<std::pair<std::ptrdiff_t, std::ptrdiff_t>, double>> levels(
            static_cast<std::size_t>(max_depth) + 1);
        levels[static_cast<std::size_t>(max_depth)] = std::move(sums);
        for (int e = max_depth - 1; e >= 0; --e) {
          auto& parent = levels[static_cast<std::size_t>(e)];
          for (const auto& [key, s] : levels[static_cast<std::size_t>(e) + 1]) {
            parent[{floor_div(key.first, 2), floor_div(key.second, 2)}] += s;
          }
        }
        // U_d as a tree sum: |S| at depth d, plain sums above it, summed in
        // the same child order at every depth.
        for (int target = 0; target <= max_depth; ++target) {
          std::vector<std::map<std::pair<std::ptrdiff_t, std::ptrdiff_t>, double>> acc(
              static_cast<std::size_t>(target) + 1);
          for (const auto& [key, s] : levels[static_cast<std::size_t>(target)]) {
            acc[static_cast<std::size_t>(target)][key] = std::abs(s);
          }
          for (int e = target - 1; e >= 0; --e) {
            for (const auto& [key, s] : acc[static_cast<std::size_t>(e) + 1]) {
              acc[static_cast<std::size_t>(e)][{floor_div(key.first, 2), floor_div(key.second, 2)}] += s;
            }
          }
          double u = 0.0;
          for (const auto& [key, s] : acc[0]) u += s;
          av.u.push_back(u);
        }
      }
    }
    av.sup_v = *std::max_element(av.v.begin(), av.v.end());
    av.sup_u = *std::max_element(av.u.begin(), av.u.end());
    return av;
  });
}

LebesgueAreaBounds lebesgue_area_bounds(const SampledMap& surface, const PlanarRegion& region,
                                        const DyadicGrid& grid, int depth, const JacobianOptions& options) {
  if (surface.dim_in() != 2 || surface.dim_out() != 3) {
    throw RangeError("Lebesgue area bounds need a map from a 2D grid into R^3");
  }
  LebesgueAreaBounds out;
  for (int j = 1; j <= 3; ++j) {
    const auto g = planar_map(coordinate_pair(surface, j));
    out.v[static_cast<std::size_t>(j) - 1] = area_variation(g, region, grid, depth, options).sup_v;
  }
  out.lower = std::max({out.v[0], out.v[1], out.v[2]});
  out.upper = out.v[0] + out.v[1] + out.v[2];
  return out;
}

}  // namespace bvdeg
