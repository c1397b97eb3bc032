#include "bvdeg/cantor.hpp"

#include <algorithm>

#include "bvdeg/errors.hpp"

namespace bvdeg {
namespace {

void check_level(int level) {
  if (level < 0) throw RangeError("Cantor level must be non-negative");
}

}  // namespace

double cantor_value(int level, double x) {
  check_level(level);
  x = std::clamp(x, 0.0, 1.0);
  double result = 0.0;
  double weight = 1.0;
  for (int i = 0; i < level; ++i) {
    if (x <= 1.0 / 3.0) {
      x *= 3.0;
    } else if (x >= 2.0 / 3.0) {
      result += 0.5 * weight;
      x = 3.0 * x - 2.0;
    } else {
      return result + 0.5 * weight;
    }
    weight *= 0.5;
  }
  return result + weight * x;
}

double cantor_shear(int level, double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x + cantor_value(level, x);
}

double cantor_shear_inverse(int level, double y) {
  check_level(level);
  y = std::clamp(y, 0.0, 2.0);
  double a = 0.0, b = 1.0, ca = 0.0, cb = 1.0;
  for (int d = 0; d < level; ++d) {
    const double third = (b - a) / 3.0;
    const double cm = 0.5 * (ca + cb);
    const double a1 = a + third;
    const double a2 = b - third;
    if (y <= a1 + cm) {
      b = a1;
      cb = cm;
    } else if (y < a2 + cm) {
      return y - cm;
    } else {
      a = a2;
      ca = cm;
    }
  }
  // h is linear on [a, b] with slope 1 + (cb - ca) / (b - a).
  const double slope = 1.0 + (cb - ca) / (b - a);
  return std::clamp(a + (y - (a + ca)) / slope, a, b);
}

}  // namespace bvdeg
