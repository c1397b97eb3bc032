#pragma once

namespace bvdeg {

/// Level-`level` piecewise-linear approximant c_L of the Cantor ternary
/// function on [0, 1]: constant on the middle thirds removed in the first
/// `level` generations, linear on the 2^L remaining intervals. Arguments
/// outside [0, 1] are clamped.
double cantor_value(int level, double x);

/// h(x) = x + c_L(x), a homeomorphism of [0, 1] onto [0, 2].
double cantor_shear(int level, double x);

/// Inverse of cantor_shear, exact up to rounding (descends the ternary tree).
double cantor_shear_inverse(int level, double y);

}  // namespace bvdeg
