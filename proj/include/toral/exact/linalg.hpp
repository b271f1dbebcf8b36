#pragma once

#include <optional>
#include <vector>

#include "toral/exact/matrix.hpp"
#include "toral/exact/poly.hpp"

namespace toral {

/// det(tI - m) by Faddeev-LeVerrier; every division is exact over Z.
IntPoly char_poly(const IntMatrix& m);

/// Exact determinant by fraction-free Bareiss elimination.
Integer det_exact(const IntMatrix& m);

/// Rank over Q.
std::size_t rank(const RatMatrix& a);

/// One solution x of a*x = b over Q, if any.
std::optional<std::vector<Rational>> solve_rational(const RatMatrix& a, const std::vector<Rational>& b);

/// Inverse over Q; throws on singular input.
RatMatrix inverse(const RatMatrix& a);

/// Basis of the rational null space {x : a*x = 0}.
std::vector<std::vector<Rational>> nullspace(const RatMatrix& a);

/// Scales a rational vector to a primitive integer vector with the same direction.
IntVector primitive_integer_vector(const std::vector<Rational>& v);

}  // namespace toral
