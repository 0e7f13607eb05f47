#pragma once

#include "harea/field.hpp"
#include "harea/functional.hpp"
#include "harea/geometry.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace harea {

/// penalized: boundary attachment through the trace penalty; constrained: boundary-owner
/// cells pinned to their face-data mean.
enum class BoundaryMode { penalized, constrained };

inline std::string to_string(BoundaryMode m) { return m == BoundaryMode::penalized ? "penalized" : "constrained"; }

struct SolverConfig {
  BoundaryMode mode = BoundaryMode::penalized;
  EnergyMode energy_mode = EnergyMode::isotropic;
  int max_iters = 20000;
  /// Relative energy change over one stagnation window.
  double tol = 1e-7;
  int window = 50;
  /// Step sizes; when unset they are derived from h (see default_steps).
  std::optional<double> step_sigma;
  std::optional<double> step_tau;
  double theta = 1.0;
  std::uint64_t seed = 0;
};

/// Squared operator-norm bound of the forward-difference gradient: 8 / h^2.
double gradient_norm_bound(double h);

/// Default (sigma, tau): sigma tau ||grad||^2 = 0.98 and tau / sigma = 1 / h^4, which
/// balances a dual variable living in the h^2-ball against an O(1) primal variable.
std::pair<double, double> default_steps(double h);

/// Throws InvalidInput when the configuration violates its invariants on this grid.
void validate(const SolverConfig& cfg, double h);

struct SolveReport {
  ScalarField<double> u;
  EnergyBreakdown energy;
  int iterations = 0;
  bool converged = false;
  double stagnation = 0.0;
  VectorField<double> dual;
  double initial_energy = 0.0;
};

/// Projection of q_c + sigma X*_c onto the radius-h^2 ball (Euclidean, or the box in
/// anisotropic mode); the proximal map of sigma F* for F(w) = sum_c h^2 |w_c + X*_c|.
VectorField<double> prox_dual(const VectorField<double>& q, double sigma, EnergyMode mode = EnergyMode::isotropic);

/// Proximal map of tau * (trace penalty) in penalized mode, or projection onto the pinned
/// boundary values in constrained mode. Interior cells are left unchanged.
ScalarField<double> prox_primal(const ScalarField<double>& v, double tau, const BoundaryDatum& phi,
                                BoundaryMode mode);

/// argmin_u 1/2 (u - v)^2 + weight * sum_k |u - data_k|.
double prox_abs_sum(double v, double weight, std::vector<double> data);

/// Face-measure weighted mean of the datum over the faces of each cell (0 off the boundary).
Eigen::VectorXd owner_means(const Grid& g, const BoundaryDatum& phi);

/// Minimize the penalized (or constrained) discrete area functional by primal-dual splitting.
SolveReport solve(const GridPtr& grid, const BoundaryDatum& phi, const SolverConfig& cfg);

/// Default absolute tolerance for the property checks: 10 h (1 + ||phi||_inf).
double solver_tol_abs(double h, const BoundaryDatum& phi);

enum class ErrorNorm { sup, relative_l1 };

struct RefineRow {
  double h = 0.0;
  double error = 0.0;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct RefineTable {
  std::vector<RefineRow> rows;
  bool monotone = false;
};

/// Solve at each h and measure the error against a closed-form reference.
RefineTable refine_study(const DomainSpec& domain, const BoundaryExpr& datum,
                         const std::function<double(const Vec2&)>& reference, const std::vector<double>& hs,
                         const SolverConfig& cfg, ErrorNorm norm);

/// Error of u against the reference sampled at cell centres.
double field_error(const ScalarField<double>& u, const std::function<double(const Vec2&)>& reference,
                   ErrorNorm norm);

}  // namespace harea
