#include "harea/harness.hpp"

#include "harea/bsc.hpp"
#include "harea/closed_forms.hpp"
#include "harea/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace harea {

namespace {

constexpr std::array<const char*, 15> kCheckNames{
    "affine_unique",      "comparison",     "contraction",    "shift_equivariance", "translation_covariance",
    "submodularity_aniso", "vee_wedge_iso", "lavrentiev",     "barrier_sandwich",   "lipschitz_bound",
    "euler_residual_es1", "example_es1",    "example_es2",    "restriction",        "calibration_disk",
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Metric upper(double value, double threshold) { return {value, threshold, true}; }
Metric lower(double value, double threshold) { return {value, threshold, false}; }
Metric info(double value) { return {value, std::nullopt, true}; }

struct Solved {
  GridPtr grid;
  BoundaryDatum phi;
  SolveReport rep;
};

Solved solve_on(const DomainSpec& d, double h, const BoundaryExpr& e, const SolverConfig& cfg) {
  GridPtr g = rasterize(d, h);
  BoundaryDatum phi = sample_datum(*g, e);
  SolveReport r = solve(g, phi, cfg);
  return {g, std::move(phi), std::move(r)};
}

DomainSpec unit_disk() { return DomainSpec::disk(Vec2::Zero(), 1.0); }
DomainSpec unit_square() { return DomainSpec::rectangle(Vec2(-1, -1), Vec2(1, 1)); }

/// Smooth random datum: b + <a, z> + c sin(<w, z> + t).
struct SmoothDatum {
  double b;
  Vec2 a;
  double c;
  Vec2 w;
  double t;
  double operator()(const Vec2& z) const { return b + a.dot(z) + c * std::sin(w.dot(z) + t); }
};

SmoothDatum random_smooth(std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  return {0.5 * U(rng), Vec2(amp * U(rng), amp * U(rng)), 0.5 * U(rng), Vec2(3.0 * U(rng), 3.0 * U(rng)),
          std::numbers::pi * U(rng)};
}

/// An ordered pair phi <= psi of smooth data.
struct DatumPair {
  BoundaryExpr phi;
  BoundaryExpr psi;
};

DatumPair random_ordered_pair(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const SmoothDatum base = random_smooth(rng, 2.0);
  const SmoothDatum bump = random_smooth(rng, 1.0);
  const double d0 = 0.05 + 0.45 * U(rng);
  const double d1 = 0.3 * U(rng);
  BoundaryExpr phi{"smooth", base};
  BoundaryExpr psi{"smooth+", [base, bump, d0, d1](const Vec2& z) {
                     return base(z) + d0 + d1 * (1.0 + std::cos(bump.w.dot(z) + bump.t));
                   }};
  return {phi, psi};
}

/// BSC certificate of the datum on the faces of the grid; throws BscViolated.
BscReport certify(const Grid& g, const DomainSpec& d, const BoundaryExpr& e) {
  return minimal_Q(bsc_samples(g, d, e), g);
}

double sup_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

void echo_solver(const SolverConfig& cfg, double h, TestReport& r) {
  const auto [ds, dt] = default_steps(h);
  r.config["mode"] = to_string(cfg.mode);
  r.config["energy"] = to_string(cfg.energy_mode);
  r.config["max_iters"] = std::to_string(cfg.max_iters);
  r.config["tol"] = fmt(cfg.tol);
  r.config["window"] = std::to_string(cfg.window);
  r.config["sigma"] = fmt(cfg.step_sigma.value_or(ds));
  r.config["tau"] = fmt(cfg.step_tau.value_or(dt));
  r.config["theta"] = fmt(cfg.theta);
  r.config["seed"] = std::to_string(cfg.seed);
  r.config["h"] = fmt(h);
}

// ---------------------------------------------------------------------------------------

void check_affine_unique(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 32.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "disk(0,1)";
  r.config["datum"] = "affine((1,-2),0.5)";
  const BoundaryExpr L = closed_form::affine(Vec2(1, -2), 0.5);
  const RefineTable t = refine_study(unit_disk(), L, L.eval, {2 * h, h, h / 2}, o.solver, ErrorNorm::sup);
  const GridPtr g = rasterize(unit_disk(), h);
  const double linf = sample_datum(*g, L).values.cwiseAbs().maxCoeff();
  // Error judged at h; the extra finer level only feeds the monotonicity check.
  r.metrics["sup_err"] = upper(t.rows[1].error, 0.05 * (1.0 + linf));
  r.metrics["refine_monotone"] = lower(t.monotone ? 1.0 : 0.0, 1.0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) r.metrics["sup_err_h" + std::to_string(i)] = info(t.rows[i].error);
  r.metrics["converged"] = info(t.rows[1].converged ? 1.0 : 0.0);
}

void check_calibration_disk(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 32.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "disk(0,1)";
  r.config["datum"] = "zero";
  const Solved s = solve_on(unit_disk(), h, closed_form::zero(), o.solver);
  const double exact = 4.0 * std::numbers::pi / 3.0;
  r.metrics["energy_rel_err"] = upper(std::abs(s.rep.energy.total - exact) / exact, 0.02);
  r.metrics["energy"] = info(s.rep.energy.total);
  const VectorField<double> V = calibration_field(s.grid);
  std::mt19937_64 rng(o.solver.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = certificate_gap(s.rep.u, V, s.phi);
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField<double> u(s.grid);
    for (int k = 0; k < u.size(); ++k) u[k] = U(rng);
    worst = std::min(worst, certificate_gap(u, V, s.phi));
  }
  r.metrics["min_certificate_gap"] = lower(worst, -1e-9);
}

struct BandStats {
  double precision = 0.0;
  double recall = 0.0;
  int char_cells = 0;
};

/// precision: share of Char cells inside `band`; recall: share of `core` cells in Char.
/// Both over cells off the mask edge.
BandStats band_stats(const ScalarField<double>& u, const std::function<bool(const Vec2&)>& band,
                     const std::function<bool(const Vec2&)>& core) {
  const Grid& g = u.grid();
  const std::vector<bool> ch = char_set(u, default_char_tolerance(g));
  int in_band = 0;
  int n_char = 0;
  int n_core = 0;
  int core_hit = 0;
  for (int k = 0; k < g.size(); ++k) {
    const Vec2 z = g.center(k);
    const bool c = ch[static_cast<std::size_t>(k)];
    // Mask-edge cells drop their inactive components, so they are not counted.
    if (g.is_boundary_cell(k)) continue;
    if (c) {
      ++n_char;
      if (band(z)) ++in_band;
    }
    if (core(z)) {
      ++n_core;
      if (c) ++core_hit;
    }
  }
  return {n_char ? static_cast<double>(in_band) / n_char : 0.0, n_core ? static_cast<double>(core_hit) / n_core : 0.0,
          n_char};
}

/// Largest |residual| of the exact piecewise-constant unit field over core cells in `keep`.
double exact_field_residual(const GridPtr& g, Vec2 (*field)(const Vec2&),
                            const std::function<bool(const Vec2&)>& keep) {
  VectorField<double> v(g);
  for (int k = 0; k < g->size(); ++k) v.values().row(k) = field(g->center(k)).transpose();
  const ScalarField<double> res = unit_field_divergence(v, 1e-12);
  const std::vector<bool> core = residual_core(*g);
  double m = 0.0;
  for (int k = 0; k < g->size(); ++k)
    if (core[static_cast<std::size_t>(k)] && keep(g->center(k))) m = std::max(m, std::abs(res[k]));
  return m;
}

double solver_residual_median(const ScalarField<double>& u, const std::function<bool(const Vec2&)>& keep) {
  const ScalarField<double> res = euler_residual(u);
  const std::vector<bool> core = residual_core(u.grid());
  std::vector<double> vals;
  for (int k = 0; k < u.size(); ++k)
    if (core[static_cast<std::size_t>(k)] && keep(u.grid().center(k))) vals.push_back(std::abs(res[k]));
  if (vals.empty()) return 0.0;
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(vals.size() / 2), vals.end());
  return vals[vals.size() / 2];
}

void check_example_es1(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 64.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "parabolic";
  r.config["datum"] = "es1";
  const DomainSpec d = DomainSpec::parabolic();
  const RefineTable t = refine_study(d, closed_form::es1_datum(), closed_form::es1_solution, {4 * h, 2 * h, h},
                                     o.solver, ErrorNorm::relative_l1);
  r.metrics["rel_l1_err"] = upper(t.rows.back().error, 0.05);
  r.metrics["refine_monotone"] = lower(t.monotone ? 1.0 : 0.0, 1.0);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    r.metrics["rel_l1_err_h" + std::to_string(i)] = info(t.rows[i].error);

  const Solved s = solve_on(d, h, closed_form::es1_datum(), o.solver);
  const double eps = default_char_tolerance(*s.grid);
  const BandStats b = band_stats(
      s.rep.u,
      // Exact set: {|4x| <= eps, y > 0} and {|2z| <= eps, y < 0}, dilated by 2h.
      [&](const Vec2& z) {
        return (std::abs(z.x()) <= eps / 4.0 + 2.0 * h && z.y() >= -2.0 * h) || z.norm() <= eps / 2.0 + 2.0 * h;
      },
      [&](const Vec2& z) { return std::abs(z.x()) <= eps / 8.0 && z.y() >= 4.0 * h; });
  r.metrics["char_precision"] = lower(b.precision, 0.95);
  r.metrics["char_recall"] = lower(b.recall, 0.9);
  r.metrics["char_cells"] = info(b.char_cells);
  r.metrics["char_eps"] = info(eps);
}

void check_example_es2(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 64.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "square[-1,1]^2";
  r.config["datum"] = "es2";
  const Solved s = solve_on(unit_square(), h, closed_form::es2_datum(), o.solver);
  r.metrics["rel_l1_err"] = upper(field_error(s.rep.u, closed_form::es2_solution, ErrorNorm::relative_l1), 0.05);
  const double eps = default_char_tolerance(*s.grid);
  const double w = eps / (2.0 * std::sqrt(5.0));
  const BandStats b =
      band_stats(s.rep.u, [&](const Vec2& z) { return std::abs(z.y()) <= w + 2.0 * h; },
                 [&](const Vec2& z) { return std::abs(z.y()) <= w / 2.0 && std::abs(z.x()) <= 1.0 - 4.0 * h; });
  r.metrics["char_precision"] = lower(b.precision, 0.95);
  r.metrics["char_recall"] = lower(b.recall, 0.9);
  r.metrics["char_cells"] = info(b.char_cells);
  auto off_band = [&](const Vec2& z) { return std::abs(z.y()) > 2.0 * h; };
  r.metrics["exact_field_residual"] = upper(exact_field_residual(s.grid, closed_form::es2_horizontal, off_band), 1e-6);
  r.metrics["solver_residual_median"] = info(solver_residual_median(s.rep.u, off_band));
  r.metrics["converged"] = info(s.rep.converged ? 1.0 : 0.0);
}

void check_euler_residual_es1(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 64.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "parabolic";
  r.config["datum"] = "es1";
  const Solved s = solve_on(DomainSpec::parabolic(), h, closed_form::es1_datum(), o.solver);
  // Above y = 0 the unit field is (0, sign x); below it is z*/|z|, which is not constant.
  auto upper_region = [&](const Vec2& z) { return z.y() > 2.0 * h && std::abs(z.x()) > 2.0 * h; };
  auto lower_region = [&](const Vec2& z) { return z.y() < -2.0 * h && z.norm() > 2.0 * h; };
  r.metrics["exact_field_residual"] =
      upper(exact_field_residual(s.grid, closed_form::es1_horizontal, upper_region), 1e-6);
  r.metrics["exact_field_residual_lower"] =
      info(exact_field_residual(s.grid, closed_form::es1_horizontal, lower_region));
  r.metrics["solver_residual_median"] = info(solver_residual_median(s.rep.u, upper_region));
}

void check_lavrentiev(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 64.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "parabolic";
  r.config["datum"] = "es1";
  SolverConfig pen = o.solver;
  pen.mode = BoundaryMode::penalized;
  SolverConfig con = o.solver;
  con.mode = BoundaryMode::constrained;
  const Solved a = solve_on(DomainSpec::parabolic(), h, closed_form::es1_datum(), pen);
  const SolveReport b = solve(a.grid, a.phi, con);
  const double ep = a.rep.energy.total;
  const double ec = penalized_energy(b.u, a.phi, o.solver.energy_mode).total;
  r.metrics["rel_gap"] = upper(std::abs(ep - ec) / std::max(ep, 1.0), 0.02);
  r.metrics["energy_penalized"] = info(ep);
  r.metrics["energy_constrained"] = info(ec);
}

struct BarrierSetup {
  Solved s;
  std::vector<BoundarySample> samples;
  BscReport bsc;
};

BarrierSetup es1_with_certificate(const CheckOptions& o, double h) {
  const DomainSpec d = DomainSpec::parabolic();
  Solved s = solve_on(d, h, closed_form::es1_datum(), o.solver);
  std::vector<BoundarySample> samples = bsc_samples(*s.grid, d, closed_form::es1_datum());
  BscReport rep = minimal_Q(samples, *s.grid);
  return {std::move(s), std::move(samples), std::move(rep)};
}

void check_barrier_sandwich(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 64.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "parabolic";
  r.config["datum"] = "es1";
  const BarrierSetup b = es1_with_certificate(o, h);
  const auto [f, g] = barriers(b.samples, b.bsc, b.s.grid);
  const double tol = solver_tol_abs(h, b.s.phi);
  const auto& u = b.s.rep.u;
  int bad = 0;
  for (int k = 0; k < u.size(); ++k)
    if (u[k] < f[k] - tol || u[k] > g[k] + tol) ++bad;
  double trace = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < u.size(); ++k) {
    const Vec2 c = b.s.grid->center(k);
    for (const auto& sm : b.samples) trace = std::max(trace, std::abs(u[k] - sm.value) - b.bsc.Q_min * (c - sm.z).norm());
  }
  r.metrics["sandwich_violations"] = upper(bad, 0.0);
  r.metrics["boundary_lipschitz_excess"] = upper(trace, tol);
  r.metrics["Q_min"] = info(b.bsc.Q_min);
  r.metrics["barrier_gap_min"] = info((g.values() - f.values()).minCoeff());
}

void check_lipschitz_bound(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 64.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "parabolic";
  r.config["datum"] = "es1";
  const BarrierSetup b = es1_with_certificate(o, h);
  const double tol = solver_tol_abs(h, b.s.phi);
  r.metrics["lipschitz_estimate"] = upper(lipschitz_estimate(b.s.rep.u), b.bsc.K + tol);
  r.metrics["Q_min"] = info(b.bsc.Q_min);
  r.metrics["K"] = info(b.bsc.K);
}

void check_comparison(const CheckOptions& o, TestReport& r, bool contraction) {
  const double h = o.h.value_or(1.0 / 32.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "disk(0,1)";
  r.config["datum"] = "20 random smooth ordered pairs";
  const DomainSpec d = unit_disk();
  const GridPtr g = rasterize(d, h);
  std::mt19937_64 rng(o.solver.seed + (contraction ? 1000 : 0));
  double worst = -std::numeric_limits<double>::infinity();
  double q_max = 0.0;
  int certified = 0;
  constexpr int kPairs = 20;
  for (int p = 0; p < kPairs; ++p) {
    const DatumPair pair = random_ordered_pair(rng);
    q_max = std::max({q_max, certify(*g, d, pair.phi).Q_min, certify(*g, d, pair.psi).Q_min});
    ++certified;
    const BoundaryDatum phi = sample_datum(*g, pair.phi);
    const BoundaryDatum psi = sample_datum(*g, pair.psi);
    const SolveReport a = solve(g, phi, o.solver);
    const SolveReport b = solve(g, psi, o.solver);
    if (contraction) {
      const double tol = std::max(solver_tol_abs(h, phi), solver_tol_abs(h, psi));
      const double lhs = sup_diff(a.u.values(), b.u.values());
      worst = std::max(worst, lhs / (sup_diff(phi.values, psi.values) + 2.0 * tol));
    } else {
      const double tol = solver_tol_abs(h, phi);
      worst = std::max(worst, (a.u.values() - b.u.values()).maxCoeff() / tol);
    }
  }
  r.metrics["certified_pairs"] = lower(certified, kPairs);
  r.metrics["max_Q_min"] = info(q_max);
  r.metrics[contraction ? "contraction_ratio" : "excess_over_tol"] = upper(worst, 1.0);
}

void check_shift_equivariance(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 32.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "parabolic";
  r.config["datum"] = "es1 + alpha, alpha in {-1, 0.3}";
  const Solved s = solve_on(DomainSpec::parabolic(), h, closed_form::es1_datum(), o.solver);
  const double tol = solver_tol_abs(h, s.phi);
  double worst = 0.0;
  for (double alpha : {-1.0, 0.3}) {
    BoundaryDatum shifted = s.phi;
    shifted.values.array() += alpha;
    const SolveReport b = solve(s.grid, shifted, o.solver);
    worst = std::max(worst, sup_diff(b.u.values(), s.rep.u.values().array() + alpha));
  }
  r.metrics["max_shift_err"] = upper(worst, tol);
}

void check_translation_covariance(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 32.0);
  echo_solver(o.solver, h, r);
  const Vec2 tau(3.0 * h, -2.0 * h);
  const double xi = 0.25;
  r.config["domain"] = "parabolic";
  r.config["datum"] = "es1";
  r.config["tau"] = fmt(tau.x()) + "," + fmt(tau.y());
  r.config["xi"] = fmt(xi);
  const DomainSpec d = DomainSpec::parabolic();
  const Solved s = solve_on(d, h, closed_form::es1_datum(), o.solver);
  const GridPtr gt = rasterize(d.translated(tau), h);
  const Vec2 ts = star(tau);
  auto lift = [&](const Vec2& z) { return 2.0 * ts.dot(z) + xi; };

  Eigen::VectorXd vals(static_cast<Eigen::Index>(gt->faces().size()));
  for (std::size_t f = 0; f < gt->faces().size(); ++f) {
    const BoundaryFace& face = gt->faces()[f];
    vals(static_cast<Eigen::Index>(f)) =
        closed_form::es1_datum().eval(face.midpoint + tau) + lift(gt->center(face.owner));
  }
  const BoundaryDatum phit = datum_from_samples(*gt, vals, "es1 translated");

  // Transport u to the translated grid.
  ScalarField<double> tu(gt);
  int unmatched = 0;
  for (int k = 0; k < gt->size(); ++k) {
    const Vec2 c = gt->center(k);
    const int src = s.grid->locate(c + tau);
    if (src < 0) {
      ++unmatched;
      continue;
    }
    tu[k] = s.rep.u[src] + lift(c);
  }
  const double e0 = s.rep.energy.total;
  const double e1 = penalized_energy(tu, phit, o.solver.energy_mode).total;
  const SolveReport st = solve(gt, phit, o.solver);
  const double tol = solver_tol_abs(h, s.phi);
  r.metrics["cell_count_mismatch"] = upper(std::abs(gt->size() - s.grid->size()) + unmatched, 0.0);
  r.metrics["energy_identity_rel"] = upper(std::abs(e1 - e0) / std::max(std::abs(e0), 1.0), 1e-8);
  r.metrics["solution_diff"] = upper(sup_diff(st.u.values(), tu.values()), 2.0 * tol);
  r.metrics["solved_energy_rel"] =
      info(std::abs(st.energy.total - e0) / std::max(std::abs(e0), 1.0));
}

/// A(phi1 v phi2)(u1 v u2) + A(phi1 ^ phi2)(u1 ^ u2) - A(phi1)(u1) - A(phi2)(u2).
double lattice_excess(const ScalarField<double>& u1, const ScalarField<double>& u2, const BoundaryDatum& p1,
                      const BoundaryDatum& p2, EnergyMode mode) {
  const auto [uv, uw] = vee_wedge(u1, u2);
  BoundaryDatum pv{p1.values.cwiseMax(p2.values), "vee"};
  BoundaryDatum pw{p1.values.cwiseMin(p2.values), "wedge"};
  const double lhs = penalized_energy(uv, pv, mode).total + penalized_energy(uw, pw, mode).total;
  const double rhs = penalized_energy(u1, p1, mode).total + penalized_energy(u2, p2, mode).total;
  return lhs - rhs;
}

void check_submodularity_aniso(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 16.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "square[-1,1]^2";
  r.config["datum"] = "200 random field/datum pairs";
  const GridPtr g = rasterize(unit_square(), h);
  std::mt19937_64 rng(o.solver.seed + 7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  auto random_field = [&] {
    ScalarField<double> u(g);
    for (int k = 0; k < u.size(); ++k) u[k] = U(rng);
    return u;
  };
  auto random_datum = [&] {
    BoundaryDatum p{Eigen::VectorXd(static_cast<Eigen::Index>(g->faces().size())), "random"};
    for (Eigen::Index f = 0; f < p.values.size(); ++f) p.values(f) = U(rng);
    return p;
  };
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 200; ++t) {
    const ScalarField<double> u1 = random_field();
    const ScalarField<double> u2 = random_field();
    const BoundaryDatum p1 = random_datum();
    const BoundaryDatum p2 = random_datum();
    worst = std::max(worst, lattice_excess(u1, u2, p1, p2, EnergyMode::anisotropic));
  }
  r.metrics["max_violation"] = upper(worst, 1e-10);
}

double smooth_pair_excess(double h, std::uint64_t seed, int pairs) {
  const GridPtr g = rasterize(unit_square(), h);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const SmoothDatum a = random_smooth(rng, 2.0);
    const SmoothDatum b = random_smooth(rng, 2.0);
    const ScalarField<double> u1 = sample_field(g, a);
    const ScalarField<double> u2 = sample_field(g, b);
    const BoundaryDatum p1 = sample_datum(*g, {"a", a});
    const BoundaryDatum p2 = sample_datum(*g, {"b", b});
    worst = std::max(worst, lattice_excess(u1, u2, p1, p2, EnergyMode::isotropic));
  }
  return worst;
}

void check_vee_wedge_iso(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 32.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "square[-1,1]^2";
  r.config["datum"] = "50 random smooth pairs";
  constexpr double kC = 1.0;
  const double coarse = smooth_pair_excess(2.0 * h, o.solver.seed + 11, 50);
  const double fine = smooth_pair_excess(h, o.solver.seed + 11, 50);
  r.metrics["violation_over_h"] = upper(fine / h, kC);
  r.metrics["violation_over_h_coarse"] = info(coarse / (2.0 * h));
}

void check_restriction(const CheckOptions& o, TestReport& r) {
  const double h = o.h.value_or(1.0 / 32.0);
  echo_solver(o.solver, h, r);
  r.config["domain"] = "square[-1,1]^2, sub-rectangle [-0.5,0.5]^2";
  r.config["datum"] = "es2";
  const Solved s = solve_on(unit_square(), h, closed_form::es2_datum(), o.solver);
  const GridPtr sub =
      restrict_grid(*s.grid, [](const Vec2& z) { return std::abs(z.x()) < 0.5 && std::abs(z.y()) < 0.5; });
  Eigen::VectorXd vals(static_cast<Eigen::Index>(sub->faces().size()));
  ScalarField<double> ref(sub);
  for (int k = 0; k < sub->size(); ++k) ref[k] = s.rep.u[s.grid->locate(sub->center(k))];
  for (std::size_t f = 0; f < sub->faces().size(); ++f) {
    const BoundaryFace& face = sub->faces()[f];
    const int in = s.grid->locate(sub->center(face.owner));
    const int out = s.grid->neighbor(in, face.side);
    if (out < 0) throw InvalidInput("sub-rectangle touches the outer boundary");
    vals(static_cast<Eigen::Index>(f)) = 0.5 * (s.rep.u[in] + s.rep.u[out]);
  }
  const BoundaryDatum phi = datum_from_samples(*sub, vals, "restricted solution");
  const SolveReport rs = solve(sub, phi, o.solver);
  r.metrics["restriction_diff"] = upper(sup_diff(rs.u.values(), ref.values()), 2.0 * solver_tol_abs(h, phi));
}

}  // namespace

bool Metric::ok() const {
  if (!threshold) return true;
  return upper ? value <= *threshold : value >= *threshold;
}

std::string to_string(CheckId id) { return kCheckNames[static_cast<std::size_t>(id)]; }

CheckId parse_check_id(const std::string& name) {
  for (std::size_t i = 0; i < kCheckNames.size(); ++i)
    if (name == kCheckNames[i]) return static_cast<CheckId>(i);
  throw ConfigError("unknown check id: " + name);
}

TestReport run_check(CheckId id, const CheckOptions& opts) {
  TestReport r;
  r.id = id;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case CheckId::affine_unique: check_affine_unique(opts, r); break;
      case CheckId::comparison: check_comparison(opts, r, false); break;
      case CheckId::contraction: check_comparison(opts, r, true); break;
      case CheckId::shift_equivariance: check_shift_equivariance(opts, r); break;
      case CheckId::translation_covariance: check_translation_covariance(opts, r); break;
      case CheckId::submodularity_aniso: check_submodularity_aniso(opts, r); break;
      case CheckId::vee_wedge_iso: check_vee_wedge_iso(opts, r); break;
      case CheckId::lavrentiev: check_lavrentiev(opts, r); break;
      case CheckId::barrier_sandwich: check_barrier_sandwich(opts, r); break;
      case CheckId::lipschitz_bound: check_lipschitz_bound(opts, r); break;
      case CheckId::euler_residual_es1: check_euler_residual_es1(opts, r); break;
      case CheckId::example_es1: check_example_es1(opts, r); break;
      case CheckId::example_es2: check_example_es2(opts, r); break;
      case CheckId::restriction: check_restriction(opts, r); break;
      case CheckId::calibration_disk: check_calibration_disk(opts, r); break;
    }
    r.passed = std::all_of(r.metrics.begin(), r.metrics.end(), [](const auto& m) { return m.second.ok(); });
  } catch (const std::exception& e) {
    r.passed = false;
    r.reason = e.what();
  }
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SuiteResult run_suite(const std::vector<CheckId>& filter, const CheckOptions& opts) {
  SuiteResult out;
  for (CheckId id : kAllChecks) {
    if (std::find(filter.begin(), filter.end(), id) == filter.end()) continue;
    out.reports.push_back(run_check(id, opts));
    ++out.total;
    if (out.reports.back().passed) ++out.passed;
  }
  return out;
}

}  // namespace harea
