#pragma once

#include "harea/field.hpp"
#include "harea/geometry.hpp"

#include <utility>
#include <vector>

namespace harea {

struct BoundarySample {
  Vec2 z;
  double value = 0.0;
};

enum class SupportSide { lower, upper };

struct BscCertificate {
  Vec2 point = Vec2::Zero();
  Vec2 lower_slope = Vec2::Zero();
  Vec2 upper_slope = Vec2::Zero();
  bool feasible = false;
  /// Largest violation of w- <= phi <= w+ over the samples.
  double slack = 0.0;
};

struct BscReport {
  double Q_min = 0.0;
  std::vector<BscCertificate> per_point;
  double K = 0.0;
  double eps_feas = 0.0;
  /// Index of the sample attaining Q_min.
  int witness = -1;
};

/// One sample per boundary face. The face midpoint is moved to the nearest point of the
/// boundary curve and the expression is evaluated there: raw staircase midpoints
/// contain collinear runs on which a curved-boundary datum is not affine.
std::vector<BoundarySample> bsc_samples(const Grid& grid, const DomainSpec& domain, const BoundaryExpr& expr);

/// Samples from a per-face datum at the face midpoints (raw data, no analytic boundary).
std::vector<BoundarySample> bsc_samples(const Grid& grid, const BoundaryDatum& phi);

/// Default feasibility tolerance: 1e-6 (1 + datum range).
double default_eps_feas(const std::vector<BoundarySample>& samples);

/// Smallest-norm slope a with +-(phi(z0) + <a, z_k - z0> - phi_k) <= eps for all k, or
/// false when no slope of norm <= cap exists.
bool min_norm_support(const std::vector<BoundarySample>& samples, int index, SupportSide side, double eps,
                      Vec2& slope, double cap = 1e6);

/// Certificate for one side at one point. Feasible iff a support slope of norm <= Q
/// exists. The slope of the other side is left at zero.
BscCertificate support_feasibility(const std::vector<BoundarySample>& samples, int index, double Q,
                                   SupportSide side, double eps = -1.0);

/// Max over samples of the violation of a support plane at sample `index`.
double support_violation(const std::vector<BoundarySample>& samples, int index, const Vec2& slope,
                         SupportSide side);

/// Minimal certified Q over all samples. K uses the largest |z| over the samples.
BscReport minimal_Q(const std::vector<BoundarySample>& samples, double cap = 1e6);

/// As above, with K = Q_min + 4 max over interior cell centres of |z|.
BscReport minimal_Q(const std::vector<BoundarySample>& samples, const Grid& grid, double cap = 1e6);

/// f = max of lower supports, g = min of upper supports, at cell centres.
std::pair<ScalarField<double>, ScalarField<double>> barriers(const std::vector<BoundarySample>& samples,
                                                             const BscReport& report, const GridPtr& grid);

}  // namespace harea
