#pragma once

#include "harea/geometry.hpp"

#include <cmath>
#include <string>

namespace harea::closed_form {

inline BoundaryExpr zero() {
  return {"zero", [](const Vec2&) { return 0.0; }};
}

inline BoundaryExpr constant(double c) {
  return {"constant(" + std::to_string(c) + ")", [c](const Vec2&) { return c; }};
}

/// <a, z> + b
inline BoundaryExpr affine(const Vec2& a, double b) {
  return {"affine", [a, b](const Vec2& z) { return a.dot(z) + b; }};
}

/// x (y - x^2 + 1): the trace of es1_solution on the parabolic domain.
inline BoundaryExpr es1_datum() {
  return {"es1", [](const Vec2& z) { return z.x() * (z.y() - z.x() * z.x() + 1.0); }};
}

/// 2xy for y > 0, 0 otherwise.
inline double es1_solution(const Vec2& z) { return z.y() > 0.0 ? 2.0 * z.x() * z.y() : 0.0; }

/// -2xy + y|y|
inline double es2_solution(const Vec2& z) { return -2.0 * z.x() * z.y() + z.y() * std::abs(z.y()); }

inline BoundaryExpr es2_datum() { return {"es2", [](const Vec2& z) { return es2_solution(z); }}; }

/// Exact horizontal gradient of es1_solution away from y = 0: (0, 4x) above, X* below.
inline Vec2 es1_horizontal(const Vec2& z) {
  return z.y() > 0.0 ? Vec2(0.0, 4.0 * z.x()) : Vec2(-2.0 * z.y(), 2.0 * z.x());
}

/// Exact horizontal gradient of es2_solution: (-4y, 2|y|).
inline Vec2 es2_horizontal(const Vec2& z) { return {-4.0 * z.y(), 2.0 * std::abs(z.y())}; }

}  // namespace harea::closed_form
