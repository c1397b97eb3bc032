#include "bvdeg/gallery.hpp"

#include <cmath>
#include <numbers>

#include "bvdeg/cantor.hpp"
#include "bvdeg/errors.hpp"

namespace bvdeg {
namespace {

using Mat3 = std::array<double, 9>;

double det2(double a, double b, double c, double d) { return a * d - b * c; }

double det3(const Mat3& m) {
  return m[0] * det2(m[4], m[5], m[7], m[8]) - m[1] * det2(m[3], m[5], m[6], m[8]) +
         m[2] * det2(m[3], m[4], m[6], m[7]);
}

// |minor| of m with row r and column c removed.
double abs_minor(const Mat3& m, int r, int c) {
  int rows[2], cols[2];
  for (int i = 0, n = 0; i < 3; ++i)
    if (i != r) rows[n++] = i;
  for (int i = 0, n = 0; i < 3; ++i)
    if (i != c) cols[n++] = i;
  return std::abs(det2(m[rows[0] * 3 + cols[0]], m[rows[0] * 3 + cols[1]], m[rows[1] * 3 + cols[0]],
                       m[rows[1] * 3 + cols[1]]));
}

Mat3 inverse3(const Mat3& m) {
  const double d = det3(m);
  Mat3 inv{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      // adjugate is the transposed cofactor matrix
      const double sign = ((r + c) % 2 == 0) ? 1.0 : -1.0;
      int rows[2], cols[2];
      for (int i = 0, n = 0; i < 3; ++i)
        if (i != c) rows[n++] = i;
      for (int i = 0, n = 0; i < 3; ++i)
        if (i != r) cols[n++] = i;
      inv[r * 3 + c] = sign *
                       det2(m[rows[0] * 3 + cols[0]], m[rows[0] * 3 + cols[1]],
                            m[rows[1] * 3 + cols[0]], m[rows[1] * 3 + cols[1]]) /
                       d;
    }
  }
  return inv;
}

Mat3 matrix3(const GallerySpec& spec) {
  Mat3 m{};
  std::copy(spec.matrix.begin(), spec.matrix.end(), m.begin());
  return m;
}

bool is_3d(const GallerySpec& spec) {
  return spec.name == "cantor_shear3d" || spec.name == "identity3d" ||
         (spec.name == "linear" && spec.matrix.size() == 9);
}

Mat3 identity3() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

// Linear part used by the 3D oracles: for the Cantor shear, ADJ entries and
// slice areas coincide with those of diag(Var h, 1, 1) = diag(2, 1, 1), while
// the a.e. derivative is the identity.
Mat3 oracle_matrix(const GallerySpec& spec) {
  if (spec.name == "identity3d") return identity3();
  if (spec.name == "cantor_shear3d") return {2, 0, 0, 0, 1, 0, 0, 0, 1};
  return matrix3(spec);
}

void require_3d(const GallerySpec& spec, std::string_view quantity) {
  if (!is_3d(spec)) {
    throw RangeError("oracle " + std::string(quantity) + " is not defined for " + spec.name);
  }
}

}  // namespace

GalleryMap make_gallery(const GallerySpec& spec) {
  GalleryMap g;
  g.spec = spec;
  const auto& name = spec.name;

  if (name == "cantor1d" || name == "cantor_shear3d") {
    if (spec.level < 0) throw RangeError("Cantor level must be non-negative");
  }

  if (name == "cantor1d") {
    g.dim_in = g.dim_out = 1;
    const int L = spec.level;
    g.eval = [L](std::span<const double> x, std::span<double> y) { y[0] = cantor_value(L, x[0]); };
  } else if (name == "cantor_shear3d") {
    g.dim_in = g.dim_out = 3;
    const int L = spec.level;
    g.eval = [L](std::span<const double> x, std::span<double> y) {
      y[0] = cantor_shear(L, x[0]);
      y[1] = x[1];
      y[2] = x[2];
    };
    g.inverse = [L](std::span<const double> y, std::span<double> x) {
      x[0] = cantor_shear_inverse(L, y[0]);
      x[1] = y[1];
      x[2] = y[2];
    };
    // Limit map: h' = 1 off the Cantor set, which is Lebesgue-null.
    g.derivative = [](std::span<const double>) { return identity3(); };
  } else if (name == "identity3d") {
    g.dim_in = g.dim_out = 3;
    g.eval = [](std::span<const double> x, std::span<double> y) {
      for (int i = 0; i < 3; ++i) y[i] = x[i];
    };
    g.inverse = g.eval;
    g.derivative = [](std::span<const double>) { return identity3(); };
  } else if (name == "linear") {
    if (spec.matrix.size() == 4) {
      const auto& a = spec.matrix;
      const double d = det2(a[0], a[1], a[2], a[3]);
      if (d == 0.0) throw RangeError("linear map must be nonsingular");
      g.dim_in = g.dim_out = 2;
      g.eval = [a](std::span<const double> x, std::span<double> y) {
        y[0] = a[0] * x[0] + a[1] * x[1];
        y[1] = a[2] * x[0] + a[3] * x[1];
      };
      g.inverse = [a, d](std::span<const double> y, std::span<double> x) {
        x[0] = (a[3] * y[0] - a[1] * y[1]) / d;
        x[1] = (-a[2] * y[0] + a[0] * y[1]) / d;
      };
      g.derivative = [a](std::span<const double>) { return Mat3{a[0], a[1], a[2], a[3], 0, 0, 0, 0, 0}; };
    } else if (spec.matrix.size() == 9) {
      const Mat3 a = matrix3(spec);
      if (det3(a) == 0.0) throw RangeError("linear map must be nonsingular");
      const Mat3 inv = inverse3(a);
      g.dim_in = g.dim_out = 3;
      g.eval = [a](std::span<const double> x, std::span<double> y) {
        for (int r = 0; r < 3; ++r) y[r] = a[r * 3] * x[0] + a[r * 3 + 1] * x[1] + a[r * 3 + 2] * x[2];
      };
      g.inverse = [inv](std::span<const double> y, std::span<double> x) {
        for (int r = 0; r < 3; ++r)
          x[r] = inv[r * 3] * y[0] + inv[r * 3 + 1] * y[1] + inv[r * 3 + 2] * y[2];
      };
      g.derivative = [a](std::span<const double>) { return a; };
    } else {
      throw RangeError("linear map needs 4 or 9 matrix entries");
    }
  } else if (name == "zpow") {
    if (spec.k == 0) throw RangeError("zpow needs k != 0");
    g.dim_in = g.dim_out = 2;
    g.lo = {-1.0, -1.0, 0.0};
    const int k = spec.k;
    g.eval = [k](std::span<const double> x, std::span<double> y) {
      const double r = std::hypot(x[0], x[1]);
      if (r == 0.0) {
        y[0] = y[1] = 0.0;
        return;
      }
      const double theta = static_cast<double>(k) * std::atan2(x[1], x[0]);
      y[0] = r * std::cos(theta);
      y[1] = r * std::sin(theta);
    };
  } else if (name == "radial_stretch") {
    if (!(spec.p > 0.0)) throw RangeError("radial_stretch needs p > 0");
    g.dim_in = g.dim_out = 2;
    g.lo = {-1.0, -1.0, 0.0};
    const double p = spec.p;
    g.eval = [p](std::span<const double> x, std::span<double> y) {
      const double r = std::hypot(x[0], x[1]);
      const double scale = r == 0.0 ? 0.0 : std::pow(r, p - 1.0);
      y[0] = scale * x[0];
      y[1] = scale * x[1];
    };
    g.inverse = [p](std::span<const double> y, std::span<double> x) {
      const double r = std::hypot(y[0], y[1]);
      const double scale = r == 0.0 ? 0.0 : std::pow(r, 1.0 / p - 1.0);
      x[0] = scale * y[0];
      x[1] = scale * y[1];
    };
  } else if (name == "shear2d") {
    g.dim_in = g.dim_out = 2;
    const double s = spec.s;
    g.eval = [s](std::span<const double> x, std::span<double> y) {
      y[0] = x[0] + s * x[1];
      y[1] = x[1];
    };
    g.inverse = [s](std::span<const double> y, std::span<double> x) {
      x[0] = y[0] - s * y[1];
      x[1] = y[1];
    };
    g.derivative = [s](std::span<const double>) { return Mat3{1, s, 0, 1, 0, 0, 0, 0, 0}; };
  } else {
    throw RangeError("unknown gallery map '" + name + "'");
  }
  for (int d = g.dim_in; d < 3; ++d) g.lo[d] = g.hi[d] = 0.0;
  return g;
}

SampledMap sample_gallery(const GalleryMap& map, std::span<const std::size_t> shape) {
  if (static_cast<int>(shape.size()) != map.dim_in) {
    throw RangeError("shape rank does not match the map's input dimension");
  }
  const Grid grid = Grid::spanning(shape, std::span<const double>(map.lo.data(), shape.size()),
                                   std::span<const double>(map.hi.data(), shape.size()));
  return SampledMap::sample(grid, map.dim_out, map.eval);
}

SampledMap sample_gallery(const GallerySpec& spec, std::span<const std::size_t> shape) {
  return sample_gallery(make_gallery(spec), shape);
}

std::array<std::array<double, 3>, 3> oracle_adjugate_table(const GallerySpec& spec) {
  require_3d(spec, "adjugate table");
  make_gallery(spec);
  const Mat3 a = oracle_matrix(spec);
  // Slice x_k = t of the unit cube, output j dropped: the planar Jacobian is
  // the minor of A without row j and column k, constant over the unit slice.
  std::array<std::array<double, 3>, 3> table{};
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) table[k][j] = abs_minor(a, j, k);
  return table;
}

std::array<double, 3> oracle_mu_per_axis(const GallerySpec& spec) {
  require_3d(spec, "mu");
  make_gallery(spec);
  const Mat3 a = oracle_matrix(spec);
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    // Area of the parallelogram spanned by the two remaining columns.
    int cols[2];
    for (int i = 0, n = 0; i < 3; ++i)
      if (i != k) cols[n++] = i;
    const double u[3] = {a[cols[0]], a[3 + cols[0]], a[6 + cols[0]]};
    const double v[3] = {a[cols[1]], a[3 + cols[1]], a[6 + cols[1]]};
    const double cx = u[1] * v[2] - u[2] * v[1];
    const double cy = u[2] * v[0] - u[0] * v[2];
    const double cz = u[0] * v[1] - u[1] * v[0];
    out[k] = std::sqrt(cx * cx + cy * cy + cz * cz);
  }
  return out;
}

double oracle(const GallerySpec& spec, std::string_view quantity, std::optional<double> radius) {
  make_gallery(spec);
  if (quantity == "tv" && spec.name == "cantor1d") return 1.0;

  if (quantity == "adj_total_variation" || quantity == "inverse_tv_total") {
    // For linear maps the inverse TV over the image equals |det A| * sum|A^-1|,
    // which is again the sum of |minors|.
    require_3d(spec, quantity);
    double total = 0.0;
    for (const auto& row : oracle_adjugate_table(spec))
      for (double v : row) total += v;
    return total;
  }
  if (quantity == "mu_total") {
    const auto mu = oracle_mu_per_axis(spec);
    return mu[0] + mu[1] + mu[2];
  }
  if (quantity == "pointwise_adj_total") {
    require_3d(spec, quantity);
    const Mat3 a = spec.name == "cantor_shear3d" ? identity3() : oracle_matrix(spec);
    double total = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) total += abs_minor(a, r, c);
    return total;
  }
  if (quantity == "jacobian_mass_disk") {
    if (!radius || !(*radius > 0.0)) throw RangeError("jacobian_mass_disk needs a positive radius");
    const double r = *radius;
    const double disk = std::numbers::pi * r * r;
    if (spec.name == "zpow") return static_cast<double>(spec.k) * disk;
    if (spec.name == "radial_stretch") return std::numbers::pi * std::pow(r, 2.0 * spec.p);
    if (spec.name == "shear2d") return disk;
    if (spec.name == "linear" && spec.matrix.size() == 4) {
      const auto& a = spec.matrix;
      return det2(a[0], a[1], a[2], a[3]) * disk;
    }
  }
  throw RangeError("no oracle for (" + spec.name + ", " + std::string(quantity) + ")");
}

nlohmann::json to_json(const GallerySpec& spec) {
  nlohmann::json j = {{"name", spec.name}};
  if (spec.name == "cantor1d" || spec.name == "cantor_shear3d") j["level"] = spec.level;
  if (spec.name == "linear") j["matrix"] = spec.matrix;
  if (spec.name == "zpow") j["k"] = spec.k;
  if (spec.name == "radial_stretch") j["p"] = spec.p;
  if (spec.name == "shear2d") j["s"] = spec.s;
  return j;
}

GallerySpec gallery_spec_from_json(const nlohmann::json& j) {
  GallerySpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.level = j.value("level", spec.level);
  spec.matrix = j.value("matrix", spec.matrix);
  spec.k = j.value("k", spec.k);
  spec.p = j.value("p", spec.p);
  spec.s = j.value("s", spec.s);
  return spec;
}

}  // namespace bvdeg
