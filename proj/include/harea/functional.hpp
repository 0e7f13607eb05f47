#pragma once

#include "harea/error.hpp"
#include "harea/field.hpp"
#include "harea/geometry.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace harea {

/// Per-cell norm of the horizontal gradient: Euclidean, or l1 (exactly submodular).
enum class EnergyMode { isotropic, anisotropic };

inline std::string to_string(EnergyMode m) { return m == EnergyMode::isotropic ? "isotropic" : "anisotropic"; }

struct EnergyBreakdown {
  double interior = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  EnergyMode mode = EnergyMode::isotropic;
};

template <typename Scalar>
Scalar cell_norm(Scalar vx, Scalar vy, EnergyMode mode) {
  using std::abs;
  using std::sqrt;
  return mode == EnergyMode::isotropic ? sqrt(vx * vx + vy * vy) : abs(vx) + abs(vy);
}

/// Discrete horizontal gradient grad u + X*.
template <typename Scalar>
VectorField<Scalar> horizontal_gradient(const ScalarField<Scalar>& u) {
  VectorField<Scalar> v = gradient(u);
  v.values() += active_xstar_field<Scalar>(u.grid_ptr()).values();
  return v;
}

/// sum_c h^2 |(grad u)_c + X*_c|
template <typename Scalar>
Scalar area_energy(const ScalarField<Scalar>& u, EnergyMode mode = EnergyMode::isotropic) {
  const VectorField<Scalar> v = horizontal_gradient(u);
  const Scalar h = static_cast<Scalar>(u.grid().h());
  Scalar s(0);
  for (int k = 0; k < v.size(); ++k) s += cell_norm(v.values()(k, 0), v.values()(k, 1), mode);
  return h * h * s;
}

/// sum_f h |u_owner(f) - phi_f|
template <typename Scalar>
Scalar boundary_penalty(const ScalarField<Scalar>& u, const BoundaryDatum& phi) {
  const auto& faces = u.grid().faces();
  if (phi.values.size() != static_cast<Eigen::Index>(faces.size()))
    throw InvalidInput("datum does not match the grid's boundary faces");
  using std::abs;
  Scalar s(0);
  for (std::size_t f = 0; f < faces.size(); ++f)
    s += static_cast<Scalar>(faces[f].measure) *
         abs(u[faces[f].owner] - static_cast<Scalar>(phi.values(static_cast<Eigen::Index>(f))));
  return s;
}

template <typename Scalar>
EnergyBreakdown penalized_energy(const ScalarField<Scalar>& u, const BoundaryDatum& phi,
                                 EnergyMode mode = EnergyMode::isotropic) {
  EnergyBreakdown e;
  e.mode = mode;
  e.interior = static_cast<double>(area_energy(u, mode));
  e.penalty = static_cast<double>(boundary_penalty(u, phi));
  e.total = e.interior + e.penalty;
  return e;
}

/// divergence of v / max(|v|, eps_reg) for a given horizontal field v.
template <typename Scalar>
ScalarField<Scalar> unit_field_divergence(const VectorField<Scalar>& v, double eps_reg) {
  VectorField<Scalar> n(v.grid_ptr());
  using std::max;
  for (int k = 0; k < v.size(); ++k) {
    const Scalar len = max<Scalar>(v.values().row(k).norm(), static_cast<Scalar>(eps_reg));
    n.values().row(k) = v.values().row(k) / len;
  }
  return divergence(n);
}

/// Residual of the Euler equation div((grad u + X*) / |grad u + X*|) = 0.
template <typename Scalar>
ScalarField<Scalar> euler_residual(const ScalarField<Scalar>& u, double eps_reg = 1e-12) {
  if (!(eps_reg > 0.0)) throw InvalidInput("eps_reg must be positive");
  return unit_field_divergence(horizontal_gradient(u), eps_reg);
}

/// Cells where the Euler residual is a pure difference of neighbouring unit vectors:
/// all four neighbours are interior.
inline std::vector<bool> residual_core(const Grid& g) {
  std::vector<bool> core(static_cast<std::size_t>(g.size()));
  for (int k = 0; k < g.size(); ++k) core[static_cast<std::size_t>(k)] = !g.is_boundary_cell(k);
  return core;
}

/// Default characteristic-band tolerance: 10 h max|X*|.
inline double default_char_tolerance(const Grid& g) {
  double m = 0.0;
  for (int k = 0; k < g.size(); ++k) m = std::max(m, 2.0 * g.center(k).norm());
  return 10.0 * g.h() * m;
}

/// Cells with |(grad u)_c + X*_c| <= eps_char.
template <typename Scalar>
std::vector<bool> char_set(const ScalarField<Scalar>& u, double eps_char) {
  if (!(eps_char > 0.0)) throw InvalidInput("eps_char must be positive");
  const VectorField<Scalar> v = horizontal_gradient(u);
  std::vector<bool> out(static_cast<std::size_t>(v.size()));
  for (int k = 0; k < v.size(); ++k)
    out[static_cast<std::size_t>(k)] = static_cast<double>(v.values().row(k).norm()) <= eps_char;
  return out;
}

/// Calibration lower bound: penalized energy minus sum_c h^2 <(grad u)_c + X*_c, V_c>.
/// Non-negative for every admissible V (|V_c| <= 1).
template <typename Scalar>
double certificate_gap(const ScalarField<Scalar>& u, const VectorField<Scalar>& V, const BoundaryDatum& phi,
                       EnergyMode mode = EnergyMode::isotropic) {
  for (int k = 0; k < V.size(); ++k) {
    const double n = static_cast<double>(mode == EnergyMode::isotropic ? V.values().row(k).norm()
                                                                        : V.values().row(k).cwiseAbs().maxCoeff());
    if (n > 1.0 + 1e-12) throw InadmissibleCertificate("inadmissible certificate: |V| = " + std::to_string(n) +
                                                       " at cell " + std::to_string(k));
  }
  const VectorField<Scalar> v = horizontal_gradient(u);
  const double h = u.grid().h();
  double pairing = 0.0;
  for (int k = 0; k < v.size(); ++k)
    pairing += static_cast<double>(v.values()(k, 0) * V.values()(k, 0) + v.values()(k, 1) * V.values()(k, 1));
  return penalized_energy(u, phi, mode).total - h * h * pairing;
}

/// X* / max(|X*|, eps): the calibrating field of the zero datum on a centred disk.
template <typename Scalar = double>
VectorField<Scalar> calibration_field(const GridPtr& grid, double eps = 1e-300) {
  VectorField<Scalar> V = active_xstar_field<Scalar>(grid);
  for (int k = 0; k < V.size(); ++k) {
    const Scalar n = std::max<Scalar>(V.values().row(k).norm(), static_cast<Scalar>(eps));
    V.values().row(k) /= n;
  }
  return V;
}

}  // namespace harea
