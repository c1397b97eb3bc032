#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "bvdeg/errors.hpp"
#include "bvdeg/variation.hpp"

namespace bvdeg {
namespace {

// Uniform bucket hash over points in R^dim.
class PointHash {
 public:
  PointHash(std::span<const double> pts, int dim, double cell) : pts_(pts), dim_(dim), cell_(cell) {
    const std::size_t n = pts.size() / static_cast<std::size_t>(dim);
    for (std::size_t i = 0; i < n; ++i) buckets_[key(coords(i))].push_back(i);
  }

  std::array<std::int64_t, 3> coords(std::size_t i) const {
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (int d = 0; d < dim_; ++d) {
      c[d] = static_cast<std::int64_t>(std::floor(pts_[i * static_cast<std::size_t>(dim_) + d] / cell_));
    }
    return c;
  }

  // Calls fn(j) for every point in buckets within `ring` cells of point i.
  template <class Fn>
  void visit(std::size_t i, std::int64_t ring, Fn&& fn) const {
    const auto c = coords(i);
    const std::int64_t r1 = dim_ > 1 ? ring : 0;
    const std::int64_t r2 = dim_ > 2 ? ring : 0;
    for (std::int64_t a = -ring; a <= ring; ++a)
      for (std::int64_t b = -r1; b <= r1; ++b)
        for (std::int64_t e = -r2; e <= r2; ++e) {
          auto it = buckets_.find(key({c[0] + a, c[1] + b, c[2] + e}));
          if (it == buckets_.end()) continue;
          for (std::size_t j : it->second) fn(j);
        }
  }

 private:
  static std::uint64_t key(std::array<std::int64_t, 3> c) {
    const auto mix = [](std::int64_t v) { return static_cast<std::uint64_t>(v) & 0x1FFFFFu; };
    return mix(c[0]) | (mix(c[1]) << 21) | (mix(c[2]) << 42);
  }

  std::span<const double> pts_;
  int dim_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

double dist2(std::span<const double> pts, int dim, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double v = pts[i * static_cast<std::size_t>(dim) + d] - pts[j * static_cast<std::size_t>(dim) + d];
    s += v * v;
  }
  return s;
}

double median_spacing(std::span<const double> pts, int dim, std::size_t n, double diag) {
  if (n < 2) return 0.0;
  const double cell = std::max(diag / std::pow(static_cast<double>(n), 1.0 / dim), 1e-300);
  PointHash hash(pts, dim, cell);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::int64_t ring = 1;; ++ring) {
      hash.visit(i, ring, [&](std::size_t j) {
        if (j != i) nearest[i] = std::min(nearest[i], dist2(pts, dim, i, j));
      });
      // Everything closer than `ring` cells has been visited.
      const double reach = static_cast<double>(ring) * cell;
      if (nearest[i] <= reach * reach || reach > 2.0 * diag) break;
    }
  }
  std::nth_element(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(n / 2), nearest.end());
  return std::sqrt(nearest[n / 2]);
}

}  // namespace

HausdorffEstimate hausdorff_content(std::span<const double> points, int dim, int k, double delta) {
  if (k != 1 && k != 2) throw RangeError("Hausdorff content supports k = 1 or 2");
  if (!(delta > 0.0)) throw RangeError("delta must be positive");
  if (dim < 1 || dim > 3) throw RangeError("points must have 1..3 coordinates");
  const auto ud = static_cast<std::size_t>(dim);
  const std::size_t n = points.size() / ud;
  if (n == 0 || points.size() % ud != 0) throw RangeError("point cloud must be nonempty");

  std::array<double, 3> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], points[i * ud + d]);
      hi[d] = std::max(hi[d], points[i * ud + d]);
    }
  double cloud_diag2 = 0.0;
  for (int d = 0; d < dim; ++d) cloud_diag2 += (hi[d] - lo[d]) * (hi[d] - lo[d]);

  // Charges are kept squared for k = 2 so exact inputs stay exact.
  auto charge = [&](double diag2_plus) {
    const double cap2 = std::min(cloud_diag2, delta * delta);
    const double c2 = std::min(diag2_plus, cap2);
    return k == 2 ? c2 : std::sqrt(c2);
  };

  HausdorffEstimate est;
  est.spacing = median_spacing(points, dim, n, std::sqrt(cloud_diag2));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (int d = 0; d < dim; ++d) {
      const double pa = points[a * ud + d], pb = points[b * ud + d];
      if (pa != pb) return pa < pb;
    }
    return a < b;
  });

  const double radius2 = 0.25 * delta * delta;
  PointHash hash(points, dim, 0.5 * delta);
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<char> done(n, 0);
    const std::size_t start = static_cast<std::size_t>(pass) * n / 3;
    double total = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t seed = order[(start + step) % n];
      if (done[seed]) continue;
      std::array<double, 3> clo{}, chi{};
      for (int d = 0; d < dim; ++d) clo[d] = chi[d] = points[seed * ud + d];
      hash.visit(seed, 1, [&](std::size_t j) {
        if (done[j] || dist2(points, dim, seed, j) > radius2) return;
        done[j] = 1;
        for (int d = 0; d < dim; ++d) {
          clo[d] = std::min(clo[d], points[j * ud + d]);
          chi[d] = std::max(chi[d], points[j * ud + d]);
        }
      });
      done[seed] = 1;
      double diag2 = 0.0;
      for (int d = 0; d < dim; ++d) diag2 += (chi[d] - clo[d]) * (chi[d] - clo[d]);
      const double inflated = std::sqrt(diag2) + est.spacing;
      total += charge(inflated * inflated);
    }
    est.passes[static_cast<std::size_t>(pass)] = total;
  }
  est.value = *std::min_element(est.passes.begin(), est.passes.end());
  if (cloud_diag2 <= delta * delta) {
    est.value = std::min(est.value, k == 2 ? cloud_diag2 : std::sqrt(cloud_diag2));
  }
  return est;
}

}  // namespace bvdeg
