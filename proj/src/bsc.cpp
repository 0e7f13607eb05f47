#include "harea/bsc.hpp"

#include "harea/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace harea {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a(0) * b(1) - a(1) * b(0); }

/// Half-plane {x : cross(dir, x - p) >= 0}, i.e. to the left of the directed line.
struct HalfPlane {
  Vec2 p;
  Vec2 dir;
  double angle;
  bool out(const Vec2& x) const { return cross(dir, x - p) < -1e-12 * (1.0 + x.norm()); }
};

/// {a : <n, a> <= c} with |n| = 1.
HalfPlane make_halfplane(const Vec2& n, double c) {
  const Vec2 dir(-n(1), n(0));
  return {c * n, dir, std::atan2(dir(1), dir(0))};
}

Vec2 intersect(const HalfPlane& s, const HalfPlane& t) {
  const double alpha = cross(t.p - s.p, t.dir) / cross(s.dir, t.dir);
  return s.p + alpha * s.dir;
}

/// Vertices (counterclockwise) of a bounded intersection of half-planes; empty when the
/// intersection is empty. Sort-and-sweep with a deque.
std::vector<Vec2> intersect_halfplanes(std::vector<HalfPlane> hs) {
  std::sort(hs.begin(), hs.end(), [](const HalfPlane& a, const HalfPlane& b) { return a.angle < b.angle; });
  std::deque<HalfPlane> dq;
  for (const HalfPlane& h : hs) {
    while (dq.size() > 1 && h.out(intersect(dq[dq.size() - 1], dq[dq.size() - 2]))) dq.pop_back();
    while (dq.size() > 1 && h.out(intersect(dq[0], dq[1]))) dq.pop_front();
    if (!dq.empty() && std::abs(cross(h.dir, dq.back().dir)) < 1e-14) {
      if (h.dir.dot(dq.back().dir) < 0.0) return {};
      if (h.out(dq.back().p)) {
        dq.pop_back();
      } else {
        continue;
      }
    }
    dq.push_back(h);
  }
  while (dq.size() > 2 && dq[0].out(intersect(dq[dq.size() - 1], dq[dq.size() - 2]))) dq.pop_back();
  while (dq.size() > 2 && dq[dq.size() - 1].out(intersect(dq[0], dq[1]))) dq.pop_front();
  if (dq.size() < 3) return {};
  std::vector<Vec2> v(dq.size());
  for (std::size_t i = 0; i + 1 < dq.size(); ++i) v[i] = intersect(dq[i], dq[i + 1]);
  v.back() = intersect(dq.back(), dq.front());
  return v;
}

Vec2 min_norm_point(const std::vector<Vec2>& poly) {
  bool inside = true;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    if (cross(b - a, -a) < 0.0) {
      inside = false;
      break;
    }
  }
  if (inside) return Vec2::Zero();
  Vec2 best = poly.front();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const double len2 = (b - a).squaredNorm();
    const double t = len2 > 0.0 ? std::clamp(-a.dot(b - a) / len2, 0.0, 1.0) : 0.0;
    const Vec2 q = a + t * (b - a);
    if (q.squaredNorm() < best.squaredNorm()) best = q;
  }
  return best;
}

void check_samples(const std::vector<BoundarySample>& samples) {
  if (samples.size() < 3) throw UnderdeterminedBoundary("underdetermined boundary: fewer than 3 samples");
}

double sign_of(SupportSide side) { return side == SupportSide::lower ? 1.0 : -1.0; }

}  // namespace

std::vector<BoundarySample> bsc_samples(const Grid& grid, const DomainSpec& domain, const BoundaryExpr& expr) {
  std::vector<BoundarySample> out;
  out.reserve(grid.faces().size());
  for (std::size_t f = 0; f < grid.faces().size(); ++f) {
    const Vec2 z = domain.project_to_boundary(grid.faces()[f].midpoint);
    const double v = expr.eval(z);
    if (!std::isfinite(v))
      throw InvalidInput("non-finite boundary value at face " + std::to_string(f) + " (" + std::to_string(z(0)) +
                         ", " + std::to_string(z(1)) + ")");
    out.push_back({z, v});
  }
  return out;
}

std::vector<BoundarySample> bsc_samples(const Grid& grid, const BoundaryDatum& phi) {
  if (phi.values.size() != static_cast<Eigen::Index>(grid.faces().size()))
    throw InvalidInput("datum does not match the grid's boundary faces");
  std::vector<BoundarySample> out;
  out.reserve(grid.faces().size());
  for (std::size_t f = 0; f < grid.faces().size(); ++f)
    out.push_back({grid.faces()[f].midpoint, phi.values(static_cast<Eigen::Index>(f))});
  return out;
}

double default_eps_feas(const std::vector<BoundarySample>& samples) {
  if (samples.empty()) return 1e-6;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : samples) {
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
  }
  return 1e-6 * (1.0 + (hi - lo));
}

double support_violation(const std::vector<BoundarySample>& samples, int index, const Vec2& slope,
                         SupportSide side) {
  const BoundarySample& s0 = samples[static_cast<std::size_t>(index)];
  const double s = sign_of(side);
  double worst = 0.0;
  for (const auto& sk : samples) worst = std::max(worst, s * (s0.value + slope.dot(sk.z - s0.z) - sk.value));
  return worst;
}

bool min_norm_support(const std::vector<BoundarySample>& samples, int index, SupportSide side, double eps,
                      Vec2& slope, double cap) {
  check_samples(samples);
  if (index < 0 || index >= static_cast<int>(samples.size())) throw InvalidInput("sample index out of range");
  const BoundarySample& s0 = samples[static_cast<std::size_t>(index)];
  const double s = sign_of(side);
  double scale = 0.0;
  for (const auto& sk : samples) scale = std::max(scale, (sk.z - s0.z).norm());

  std::vector<HalfPlane> hs;
  hs.reserve(samples.size() + 4);
  hs.push_back(make_halfplane(Vec2(1, 0), cap));
  hs.push_back(make_halfplane(Vec2(-1, 0), cap));
  hs.push_back(make_halfplane(Vec2(0, 1), cap));
  hs.push_back(make_halfplane(Vec2(0, -1), cap));
  // Search with half the tolerance so the returned slope meets the full one despite
  // rounding in the vertex computation.
  const double e = 0.5 * eps;
  for (const auto& sk : samples) {
    // s (<a, d> - r) <= e
    const Vec2 d = sk.z - s0.z;
    const double r = sk.value - s0.value;
    const double len = d.norm();
    if (len <= 1e-14 * (1.0 + scale)) {
      if (-s * r > e) return false;
      continue;
    }
    hs.push_back(make_halfplane(s * d / len, (s * r + e) / len));
  }
  const std::vector<Vec2> poly = intersect_halfplanes(std::move(hs));
  if (poly.empty()) return false;
  slope = min_norm_point(poly);
  return slope.norm() <= cap;
}

BscCertificate support_feasibility(const std::vector<BoundarySample>& samples, int index, double Q,
                                   SupportSide side, double eps) {
  if (!(Q >= 0.0)) throw InvalidInput("Q must be non-negative");
  check_samples(samples);
  if (index < 0 || index >= static_cast<int>(samples.size())) throw InvalidInput("sample index out of range");
  if (eps < 0.0) eps = default_eps_feas(samples);
  BscCertificate c;
  c.point = samples[static_cast<std::size_t>(index)].z;
  Vec2 a = Vec2::Zero();
  const bool exists = min_norm_support(samples, index, side, eps, a);
  c.feasible = exists && a.norm() <= Q * (1.0 + 1e-12);
  // When infeasible, report the radial projection onto the Q-ball and its violation.
  if (exists && a.norm() > Q) a *= Q / a.norm();
  (side == SupportSide::lower ? c.lower_slope : c.upper_slope) = a;
  c.slack = exists ? support_violation(samples, index, a, side) : std::numeric_limits<double>::infinity();
  if (c.feasible) c.feasible = c.slack <= eps * (1.0 + 1e-9);
  return c;
}

BscReport minimal_Q(const std::vector<BoundarySample>& samples, double cap) {
  check_samples(samples);
  BscReport rep;
  rep.eps_feas = default_eps_feas(samples);
  rep.per_point.reserve(samples.size());
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    BscCertificate c;
    c.point = samples[static_cast<std::size_t>(i)].z;
    for (SupportSide side : {SupportSide::lower, SupportSide::upper}) {
      Vec2 a = Vec2::Zero();
      if (!min_norm_support(samples, i, side, rep.eps_feas, a, cap)) {
        const bool upper = side == SupportSide::upper;
        throw BscViolated("BSC violated: no " + std::string(upper ? "upper" : "lower") +
                              " support with slope below " + std::to_string(cap) + " at sample " +
                              std::to_string(i) + " (" + std::to_string(c.point(0)) + ", " +
                              std::to_string(c.point(1)) + ")",
                          i, upper);
      }
      (side == SupportSide::lower ? c.lower_slope : c.upper_slope) = a;
      c.slack = std::max(c.slack, support_violation(samples, i, a, side));
    }
    c.feasible = true;
    const double q = std::max(c.lower_slope.norm(), c.upper_slope.norm());
    if (q > rep.Q_min || rep.witness < 0) {
      rep.Q_min = std::max(rep.Q_min, q);
      rep.witness = i;
    }
    rep.per_point.push_back(c);
  }
  double zmax = 0.0;
  for (const auto& s : samples) zmax = std::max(zmax, s.z.norm());
  rep.K = rep.Q_min + 4.0 * zmax;
  return rep;
}

BscReport minimal_Q(const std::vector<BoundarySample>& samples, const Grid& grid, double cap) {
  BscReport rep = minimal_Q(samples, cap);
  double zmax = 0.0;
  for (int k = 0; k < grid.size(); ++k) zmax = std::max(zmax, grid.center(k).norm());
  rep.K = rep.Q_min + 4.0 * zmax;
  return rep;
}

std::pair<ScalarField<double>, ScalarField<double>> barriers(const std::vector<BoundarySample>& samples,
                                                             const BscReport& report, const GridPtr& grid) {
  if (report.per_point.size() != samples.size()) throw InvalidInput("report does not match the samples");
  const int n = grid->size();
  ScalarField<double> f(grid, Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity()));
  ScalarField<double> g(grid, Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity()));
  for (std::size_t p = 0; p < samples.size(); ++p) {
    const BscCertificate& c = report.per_point[p];
    const BoundarySample& s = samples[p];
    for (int k = 0; k < n; ++k) {
      const Vec2 dz = grid->center(k) - s.z;
      f[k] = std::max(f[k], s.value + c.lower_slope.dot(dz));
      g[k] = std::min(g[k], s.value + c.upper_slope.dot(dz));
    }
  }
  return {f, g};
}

}  // namespace harea
