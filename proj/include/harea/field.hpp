#pragma once

#include "harea/geometry.hpp"

#include <Eigen/Core>

#include <cmath>
#include <utility>

namespace harea {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

/// Real value per interior cell.
template <typename Scalar = double>
class ScalarField {
 public:
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  ScalarField() = default;
  explicit ScalarField(GridPtr grid) : grid_(std::move(grid)), values_(Values::Zero(grid_->size())) {}
  ScalarField(GridPtr grid, Values values) : grid_(std::move(grid)), values_(std::move(values)) {}

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  Values& values() noexcept { return values_; }
  const Values& values() const noexcept { return values_; }
  Scalar& operator[](int k) { return values_(k); }
  Scalar operator[](int k) const { return values_(k); }
  int size() const noexcept { return static_cast<int>(values_.size()); }

 private:
  GridPtr grid_;
  Values values_;
};

/// 2-vector per interior cell, stored as an N x 2 matrix.
template <typename Scalar = double>
class VectorField {
 public:
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

  VectorField() = default;
  explicit VectorField(GridPtr grid) : grid_(std::move(grid)), values_(Values::Zero(grid_->size(), 2)) {}
  VectorField(GridPtr grid, Values values) : grid_(std::move(grid)), values_(std::move(values)) {}

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  Values& values() noexcept { return values_; }
  const Values& values() const noexcept { return values_; }
  Vector2<Scalar> operator[](int k) const { return values_.row(k).transpose(); }
  int size() const noexcept { return static_cast<int>(values_.rows()); }

 private:
  GridPtr grid_;
  Values values_;
};

/// (x, y) -> (-y, x).
template <typename Derived>
Vector2<typename Derived::Scalar> star(const Eigen::MatrixBase<Derived>& z) {
  return {-z(1), z(0)};
}

/// Sample a closed-form function at cell centres.
template <typename Scalar = double, typename F>
ScalarField<Scalar> sample_field(const GridPtr& grid, F&& f) {
  ScalarField<Scalar> u(grid);
  for (int k = 0; k < grid->size(); ++k) u[k] = static_cast<Scalar>(f(grid->center(k)));
  return u;
}

/// X*(z) = 2 z* at every cell centre.
template <typename Scalar = double>
VectorField<Scalar> xstar_field(const GridPtr& grid) {
  VectorField<Scalar> p(grid);
  const auto& c = grid->centers();
  p.values().col(0) = (-2.0 * c.col(1)).template cast<Scalar>();
  p.values().col(1) = (2.0 * c.col(0)).template cast<Scalar>();
  return p;
}

/// X* restricted to the active gradient components. Each component of the horizontal
/// gradient lives on an interior face (east face for x, north face for y); where that face
/// is a boundary face both the difference quotient and the X* component are dropped.
template <typename Scalar = double>
VectorField<Scalar> active_xstar_field(const GridPtr& grid) {
  VectorField<Scalar> p = xstar_field<Scalar>(grid);
  for (int k = 0; k < grid->size(); ++k)
    for (int a = 0; a < 2; ++a)
      if (!grid->stencil(k, a).active()) p.values()(k, a) = Scalar(0);
  return p;
}

/// Forward differences; zero across exterior faces (boundary attachment is carried by the
/// penalty term).
template <typename Scalar>
VectorField<Scalar> gradient(const ScalarField<Scalar>& u) {
  const Grid& g = u.grid();
  const Scalar inv_h = Scalar(1) / static_cast<Scalar>(g.h());
  VectorField<Scalar> p(u.grid_ptr());
  auto& pv = p.values();
  const auto& uv = u.values();
  for (int k = 0; k < g.size(); ++k) {
    for (int a = 0; a < 2; ++a) {
      const Stencil& st = g.stencil(k, a);
      pv(k, a) = st.active() ? (uv(st.plus) - uv(st.minus)) * inv_h : Scalar(0);
    }
  }
  return p;
}

/// Negative adjoint of gradient under unweighted cell inner products.
template <typename Scalar>
ScalarField<Scalar> divergence(const VectorField<Scalar>& p) {
  const Grid& g = p.grid();
  const Scalar inv_h = Scalar(1) / static_cast<Scalar>(g.h());
  ScalarField<Scalar> d(p.grid_ptr());
  auto& dv = d.values();
  const auto& pv = p.values();
  for (int k = 0; k < g.size(); ++k) {
    for (int a = 0; a < 2; ++a) {
      const Stencil& st = g.stencil(k, a);
      if (!st.active()) continue;
      const Scalar w = pv(k, a) * inv_h;
      dv(st.minus) += w;
      dv(st.plus) -= w;
    }
  }
  return d;
}

/// Fixed-order inner products.
template <typename Scalar>
Scalar inner(const ScalarField<Scalar>& u, const ScalarField<Scalar>& v) {
  Scalar s(0);
  for (int k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s;
}

template <typename Scalar>
Scalar inner(const VectorField<Scalar>& p, const VectorField<Scalar>& q) {
  Scalar s(0);
  for (int k = 0; k < p.size(); ++k) s += p.values()(k, 0) * q.values()(k, 0) + p.values()(k, 1) * q.values()(k, 1);
  return s;
}

/// Pointwise (max, min).
template <typename Scalar>
std::pair<ScalarField<Scalar>, ScalarField<Scalar>> vee_wedge(const ScalarField<Scalar>& u,
                                                             const ScalarField<Scalar>& v) {
  return {ScalarField<Scalar>(u.grid_ptr(), u.values().cwiseMax(v.values())),
          ScalarField<Scalar>(u.grid_ptr(), u.values().cwiseMin(v.values()))};
}

/// max over cells of the Euclidean norm of the difference vector; a lower estimate of Lip(u).
template <typename Scalar>
Scalar lipschitz_estimate(const ScalarField<Scalar>& u) {
  const VectorField<Scalar> g = gradient(u);
  Scalar m(0);
  for (int k = 0; k < g.size(); ++k) m = std::max<Scalar>(m, g.values().row(k).norm());
  return m;
}

template <typename Scalar>
Scalar max_abs(const ScalarField<Scalar>& u) {
  return u.size() == 0 ? Scalar(0) : u.values().cwiseAbs().maxCoeff();
}

}  // namespace harea
