#include "bvdeg/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "bvdeg/errors.hpp"
#include "bvdeg/parallel.hpp"

namespace bvdeg {
namespace {

using V3 = std::array<double, 3>;

struct Trilinear {
  std::array<V3, 8> c;  // corner (a, b, e) at index a + 2b + 4e

  V3 eval(const V3& s) const {
    V3 out{0.0, 0.0, 0.0};
    for (int n = 0; n < 8; ++n) {
      const double w = ((n & 1) ? s[0] : 1.0 - s[0]) * ((n & 2) ? s[1] : 1.0 - s[1]) *
                       ((n & 4) ? s[2] : 1.0 - s[2]);
      for (int d = 0; d < 3; ++d) out[d] += w * c[n][d];
    }
    return out;
  }

  // Column d holds dF/ds_d.
  std::array<V3, 3> jacobian(const V3& s) const {
    std::array<V3, 3> jac{};
    for (int n = 0; n < 8; ++n) {
      const double f0 = (n & 1) ? s[0] : 1.0 - s[0];
      const double f1 = (n & 2) ? s[1] : 1.0 - s[1];
      const double f2 = (n & 4) ? s[2] : 1.0 - s[2];
      const double d0 = (n & 1) ? 1.0 : -1.0;
      const double d1 = (n & 2) ? 1.0 : -1.0;
      const double d2 = (n & 4) ? 1.0 : -1.0;
      for (int d = 0; d < 3; ++d) {
        jac[0][d] += d0 * f1 * f2 * c[n][d];
        jac[1][d] += f0 * d1 * f2 * c[n][d];
        jac[2][d] += f0 * f1 * d2 * c[n][d];
      }
    }
    return jac;
  }
};

double norm3(const V3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

bool solve3(const std::array<V3, 3>& cols, const V3& rhs, V3& out) {
  auto det = [](const V3& a, const V3& b, const V3& c) {
    return a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1]) +
           c[0] * (a[1] * b[2] - a[2] * b[1]);
  };
  const double d = det(cols[0], cols[1], cols[2]);
  if (d == 0.0 || !std::isfinite(d)) return false;
  out[0] = det(rhs, cols[1], cols[2]) / d;
  out[1] = det(cols[0], rhs, cols[2]) / d;
  out[2] = det(cols[0], cols[1], rhs) / d;
  return true;
}

// Damped Newton for F(s) = y; returns true with s when converged.
bool newton(const Trilinear& t, const V3& y, double tol, V3& s) {
  s = {0.5, 0.5, 0.5};
  V3 r = t.eval(s);
  for (int d = 0; d < 3; ++d) r[d] -= y[d];
  double res = norm3(r);
  for (int it = 0; it < 50 && res > tol; ++it) {
    V3 step;
    if (!solve3(t.jacobian(s), r, step)) return false;
    double lambda = 1.0;
    bool improved = false;
    for (int half = 0; half < 30; ++half, lambda *= 0.5) {
      V3 trial{s[0] - lambda * step[0], s[1] - lambda * step[1], s[2] - lambda * step[2]};
      V3 tr = t.eval(trial);
      for (int d = 0; d < 3; ++d) tr[d] -= y[d];
      const double tres = norm3(tr);
      if (tres < res) {
        s = trial;
        r = tr;
        res = tres;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return res <= tol;
}

}  // namespace

InverseField invert_homeomorphism(const SampledMap& f, std::span<const std::size_t> image_shape) {
  if (f.dim_in() != 3 || f.dim_out() != 3) throw RangeError("inversion needs a map from a 3D grid into R^3");
  if (image_shape.size() != 3) throw RangeError("image grid must have 3 axes");
  const Grid& g = f.grid();

  V3 lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t n = 0; n < g.size(); ++n)
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], f.value(n, d));
      hi[d] = std::max(hi[d], f.value(n, d));
    }
  for (int d = 0; d < 3; ++d) {
    if (!(hi[d] > lo[d])) throw InversionFailure("image of the samples is flat");
  }
  const Grid img = Grid::spanning(image_shape, lo, hi);
  const double diag = norm3({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  const double tol = 1e-11 * std::max(1.0, diag);
  const double box_slack = 1e-9 * diag;

  // Domain cells bucketed by their image bounding boxes.
  const std::array<std::size_t, 3> cshape{g.shape[0] - 1, g.shape[1] - 1, g.shape[2] - 1};
  const std::size_t ncells = cshape[0] * cshape[1] * cshape[2];
  const auto per_axis = static_cast<std::size_t>(
      std::clamp(std::cbrt(static_cast<double>(ncells)), 1.0, 128.0));
  std::array<double, 3> bsize{};
  for (int d = 0; d < 3; ++d) bsize[d] = (hi[d] - lo[d]) / static_cast<double>(per_axis);
  auto bucket_of = [&](int d, double v) {
    return static_cast<std::size_t>(
        std::clamp(std::floor((v - lo[d]) / bsize[d]), 0.0, static_cast<double>(per_axis - 1)));
  };
  auto cell_corners = [&](std::size_t cell) {
    const std::size_t c2 = cell % cshape[2];
    const std::size_t c1 = (cell / cshape[2]) % cshape[1];
    const std::size_t c0 = cell / (cshape[1] * cshape[2]);
    Trilinear t;
    for (int n = 0; n < 8; ++n) {
      const std::size_t flat = g.index(c0 + (n & 1), c1 + ((n >> 1) & 1), c2 + ((n >> 2) & 1));
      for (int d = 0; d < 3; ++d) t.c[n][d] = f.value(flat, d);
    }
    return t;
  };
  std::vector<std::array<V3, 2>> cell_box(ncells);
  for (std::size_t cell = 0; cell < ncells; ++cell) {
    const auto t = cell_corners(cell);
    V3 a = t.c[0], b = t.c[0];
    for (const auto& p : t.c)
      for (int d = 0; d < 3; ++d) {
        a[d] = std::min(a[d], p[d]);
        b[d] = std::max(b[d], p[d]);
      }
    for (int d = 0; d < 3; ++d) {
      a[d] -= box_slack;
      b[d] += box_slack;
    }
    cell_box[cell] = {a, b};
  }
  const std::size_t nb = per_axis * per_axis * per_axis;
  std::vector<std::size_t> offsets(nb + 1, 0);
  auto for_each_bucket = [&](std::size_t cell, auto&& fn) {
    const auto& [a, b] = cell_box[cell];
    for (std::size_t x = bucket_of(0, a[0]); x <= bucket_of(0, b[0]); ++x)
      for (std::size_t y = bucket_of(1, a[1]); y <= bucket_of(1, b[1]); ++y)
        for (std::size_t z = bucket_of(2, a[2]); z <= bucket_of(2, b[2]); ++z) fn((x * per_axis + y) * per_axis + z);
  };
  for (std::size_t cell = 0; cell < ncells; ++cell) for_each_bucket(cell, [&](std::size_t k) { ++offsets[k + 1]; });
  for (std::size_t k = 0; k < nb; ++k) offsets[k + 1] += offsets[k];
  std::vector<std::size_t> members(offsets[nb]);
  {
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t cell = 0; cell < ncells; ++cell) for_each_bucket(cell, [&](std::size_t k) { members[fill[k]++] = cell; });
  }

  const std::size_t nodes = img.size();
  std::vector<double> values(nodes * 3, 0.0);
  std::vector<char> defined(nodes, 0);
  parallel_for(img.shape[0], [&](std::size_t i0) {
    for (std::size_t i1 = 0; i1 < img.shape[1]; ++i1) {
      for (std::size_t i2 = 0; i2 < img.shape[2]; ++i2) {
        const std::size_t node = img.index(i0, i1, i2);
        const V3 y{img.coord(0, i0), img.coord(1, i1), img.coord(2, i2)};
        const std::size_t k = (bucket_of(0, y[0]) * per_axis + bucket_of(1, y[1])) * per_axis + bucket_of(2, y[2]);
        for (std::size_t m = offsets[k]; m < offsets[k + 1]; ++m) {
          const std::size_t cell = members[m];
          const auto& [a, b] = cell_box[cell];
          if (y[0] < a[0] || y[0] > b[0] || y[1] < a[1] || y[1] > b[1] || y[2] < a[2] || y[2] > b[2]) continue;
          V3 s;
          if (!newton(cell_corners(cell), y, tol, s)) continue;
          bool inside = true;
          for (int d = 0; d < 3; ++d) inside = inside && s[d] >= -1e-9 && s[d] <= 1.0 + 1e-9;
          if (!inside) continue;
          const std::size_t c2 = cell % cshape[2];
          const std::size_t c1 = (cell / cshape[2]) % cshape[1];
          const std::size_t c0 = cell / (cshape[1] * cshape[2]);
          const std::size_t c[3] = {c0, c1, c2};
          for (int d = 0; d < 3; ++d) {
            values[node * 3 + static_cast<std::size_t>(d)] =
                g.coord(d, c[d]) + std::clamp(s[d], 0.0, 1.0) * g.spacing[d];
          }
          defined[node] = 1;
          break;
        }
      }
    }
  });

  // Absent nodes with defined nodes on both sides along every axis.
  std::vector<char> between(nodes, 1);
  for (int axis = 0; axis < 3; ++axis) {
    Grid lines = img;
    lines.shape[axis] = 1;
    const std::size_t step = img.stride(axis);
    for (std::size_t l = 0; l < lines.size(); ++l) {
      const auto idx = lines.unravel(l);
      const std::size_t start = img.index(idx[0], idx[1], idx[2]);
      std::ptrdiff_t first = -1, last = -1;
      for (std::size_t i = 0; i < img.shape[axis]; ++i) {
        if (defined[start + i * step]) {
          if (first < 0) first = static_cast<std::ptrdiff_t>(i);
          last = static_cast<std::ptrdiff_t>(i);
        }
      }
      for (std::size_t i = 0; i < img.shape[axis]; ++i) {
        const auto si = static_cast<std::ptrdiff_t>(i);
        if (first < 0 || si < first || si > last) between[start + i * step] = 0;
      }
    }
  }
  std::size_t resolved = 0, unresolved = 0;
  for (std::size_t n = 0; n < nodes; ++n) {
    if (defined[n]) ++resolved;
    else if (between[n]) ++unresolved;
  }
  if (static_cast<double>(unresolved) > 0.01 * static_cast<double>(resolved + unresolved)) {
    std::ostringstream msg;
    msg << unresolved << " of " << resolved + unresolved << " image nodes inside the image stayed unresolved";
    throw InversionFailure(msg.str());
  }
  if (resolved == 0) throw InversionFailure("no image node could be inverted");

  // Nearest-defined fill (breadth-first over grid neighbours).
  std::deque<std::size_t> queue;
  std::vector<char> filled(defined);
  for (std::size_t n = 0; n < nodes; ++n)
    if (defined[n]) queue.push_back(n);
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const auto idx = img.unravel(cur);
    for (int axis = 0; axis < 3; ++axis) {
      for (int dir = -1; dir <= 1; dir += 2) {
        if (dir < 0 && idx[axis] == 0) continue;
        if (dir > 0 && idx[axis] + 1 >= img.shape[axis]) continue;
        const std::size_t nb2 = dir < 0 ? cur - img.stride(axis) : cur + img.stride(axis);
        if (filled[nb2]) continue;
        filled[nb2] = 1;
        for (int d = 0; d < 3; ++d) values[nb2 * 3 + static_cast<std::size_t>(d)] = values[cur * 3 + static_cast<std::size_t>(d)];
        queue.push_back(nb2);
      }
    }
  }

  InverseField out{SampledMap(img, 3, std::move(values)), std::move(defined), 0.0, unresolved};
  out.defined_fraction = static_cast<double>(resolved) / static_cast<double>(nodes);
  return out;
}

InverseVariation inverse_variation(const InverseField& inverse, double min_coverage) {
  const SampledMap& f = inverse.map;
  const Grid& g = f.grid();
  InverseVariation out;
  out.coverage = inverse.defined_fraction;
  if (out.coverage < min_coverage) {
    std::ostringstream msg;
    msg << "inverse is defined on " << 100.0 * out.coverage << "% of the image grid, below "
        << 100.0 * min_coverage << "%";
    throw RangeError(msg.str());
  }
  for (int c = 0; c < f.dim_out(); ++c) {
    double total = 0.0;
    for (int axis = 0; axis < g.dim; ++axis) {
      const std::size_t step = g.stride(axis);
      std::vector<double> per_slab(g.shape[0], 0.0);
      parallel_for(g.shape[0], [&](std::size_t i0) {
        double acc = 0.0;
        for (std::size_t i1 = 0; i1 < g.shape[1]; ++i1) {
          for (std::size_t i2 = 0; i2 < g.shape[2]; ++i2) {
            const std::array<std::size_t, 3> idx{i0, i1, i2};
            if (idx[axis] + 1 >= g.shape[axis]) continue;
            const std::size_t n = g.index(i0, i1, i2);
            if (!inverse.defined[n] || !inverse.defined[n + step]) continue;
            double w = 1.0;
            for (int d = 0; d < g.dim; ++d) {
              if (d != axis) w *= dual_weight(idx[d], g.shape[d], g.spacing[d]);
            }
            acc += std::abs(f.value(n + step, c) - f.value(n, c)) * w;
          }
        }
        per_slab[i0] = acc;
      });
      for (double v : per_slab) total += v;
    }
    out.per_coordinate[static_cast<std::size_t>(c)] = total;
    out.total += total;
  }
  return out;
}

}  // namespace bvdeg
