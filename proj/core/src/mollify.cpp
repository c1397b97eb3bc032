#include <cmath>
#include <string>
#include <vector>

#include "bvdeg/errors.hpp"
#include "bvdeg/field.hpp"
#include "bvdeg/parallel.hpp"

namespace bvdeg {
namespace {

double profile_value(MollifierProfile profile, double r2) {
  switch (profile) {
    case MollifierProfile::CubicBump: {
      const double s = 1.0 - r2;
      return s * s * s;
    }
  }
  return 0.0;
}

struct KernelTap {
  std::ptrdiff_t offset;  // flat offset in the input grid
  double weight;
};

}  // namespace

MollifyResult mollify(const SampledMap& f, const MollifierSpec& spec) {
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon)) {
    throw RangeError("mollifier radius must be positive");
  }
  const Grid& g = f.grid();
  std::array<std::ptrdiff_t, 3> radius{0, 0, 0};
  bool any = false;
  for (int d = 0; d < g.dim; ++d) {
    radius[d] = static_cast<std::ptrdiff_t>(std::floor(spec.epsilon / g.spacing[d]));
    any = any || radius[d] > 0;
  }
  if (!any) return {f, true};

  Grid out = g;
  for (int d = 0; d < g.dim; ++d) {
    const auto r = static_cast<std::size_t>(radius[d]);
    if (g.shape[d] < 2 * r + 2) {
      throw RangeError("mollifier radius " + std::to_string(spec.epsilon) +
                       " leaves fewer than 2 samples along axis " + std::to_string(d));
    }
    out.shape[d] = g.shape[d] - 2 * r;
    out.origin[d] = g.coord(d, r);
  }

  std::vector<KernelTap> taps;
  double mass = 0.0;
  for (std::ptrdiff_t a = -radius[0]; a <= radius[0]; ++a) {
    for (std::ptrdiff_t b = -radius[1]; b <= radius[1]; ++b) {
      for (std::ptrdiff_t c = -radius[2]; c <= radius[2]; ++c) {
        const double u = static_cast<double>(a) * g.spacing[0] / spec.epsilon;
        const double v = g.dim > 1 ? static_cast<double>(b) * g.spacing[1] / spec.epsilon : 0.0;
        const double w = g.dim > 2 ? static_cast<double>(c) * g.spacing[2] / spec.epsilon : 0.0;
        const double r2 = u * u + v * v + w * w;
        if (r2 >= 1.0) continue;
        const double weight = profile_value(spec.profile, r2);
        const std::ptrdiff_t offset =
            (a * static_cast<std::ptrdiff_t>(g.shape[1]) + b) * static_cast<std::ptrdiff_t>(g.shape[2]) + c;
        taps.push_back({offset, weight});
        mass += weight;
      }
    }
  }
  for (auto& tap : taps) tap.weight /= mass;

  const int m = f.dim_out();
  const auto mm = static_cast<std::size_t>(m);
  std::vector<double> values(out.size() * mm);
  parallel_for(out.shape[0], [&](std::size_t i0) {
    for (std::size_t i1 = 0; i1 < out.shape[1]; ++i1) {
      for (std::size_t i2 = 0; i2 < out.shape[2]; ++i2) {
        const std::size_t centre = g.index(i0 + static_cast<std::size_t>(radius[0]),
                                           i1 + static_cast<std::size_t>(radius[1]),
                                           i2 + static_cast<std::size_t>(radius[2]));
        const std::size_t o = out.index(i0, i1, i2) * mm;
        for (int c = 0; c < m; ++c) {
          // Accumulating differences from the centre value keeps constants exact.
          const double base = f.value(centre, c);
          double acc = 0.0;
          for (const auto& tap : taps) {
            const auto src = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(centre) + tap.offset);
            acc += tap.weight * (f.value(src, c) - base);
          }
          values[o + static_cast<std::size_t>(c)] = base + acc;
        }
      }
    }
  });
  return {SampledMap(out, m, std::move(values)), false};
}

}  // namespace bvdeg
