#include "harea/closed_forms.hpp"
#include "harea/error.hpp"
#include "harea/solver.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace harea;

TEST_CASE("multi-face prox matches a dense scan") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    const int m = 1 + t % 3;
    std::vector<double> d;
    for (int i = 0; i < m; ++i) d.push_back(U(rng));
    const double v = U(rng);
    const double w = 0.5 * (U(rng) + 2.0);
    CHECK(prox_abs_sum(v, w, d) == doctest::Approx(oracle::prox_by_scan(v, w, d)).epsilon(1e-4));
  }
  // Single datum: soft shrink towards it.
  CHECK(prox_abs_sum(1.0, 0.25, {0.0}) == doctest::Approx(0.75));
  CHECK(prox_abs_sum(0.1, 0.25, {0.0}) == 0.0);
}

TEST_CASE("dual prox lands in the h^2 ball") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double h = 1.0 / 8.0;
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), h);
  VectorField<double> q(g);
  for (int k = 0; k < q.size(); ++k) q.values().row(k) << U(rng), U(rng);
  const VectorField<double> p = prox_dual(q, 0.3);
  const VectorField<double> pa = prox_dual(q, 0.3, EnergyMode::anisotropic);
  const VectorField<double> xs = active_xstar_field(g);
  for (int k = 0; k < q.size(); ++k) {
    CHECK(p.values().row(k).norm() <= h * h * (1 + 1e-12));
    CHECK(pa.values().row(k).cwiseAbs().maxCoeff() <= h * h * (1 + 1e-12));
    const Eigen::RowVector2d raw = q.values().row(k) + 0.3 * xs.values().row(k);
    if (raw.norm() <= h * h) CHECK((p.values().row(k) - raw).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("step defaults satisfy the stability bound") {
  for (double h : {0.5, 1.0 / 16.0, 1.0 / 128.0}) {
    const auto [s, t] = default_steps(h);
    CHECK(s * t * gradient_norm_bound(h) == doctest::Approx(0.98));
    CHECK_NOTHROW(validate(SolverConfig{}, h));
  }
  SolverConfig bad;
  bad.step_sigma = 1.0;
  bad.step_tau = 1.0;
  CHECK_THROWS_AS(validate(bad, 0.1), InvalidInput);
  SolverConfig zero;
  zero.max_iters = 0;
  CHECK_THROWS_AS(validate(zero, 0.1), InvalidInput);
}

TEST_CASE("affine data are recovered and the energy never rises above the start") {
  const BoundaryExpr L = closed_form::affine(Vec2(1, -2), 0.5);
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 1.0 / 16.0);
  const BoundaryDatum phi = sample_datum(*g, L);
  const SolveReport r = solve(g, phi, SolverConfig{});
  CHECK(r.converged);
  CHECK(r.energy.total <= r.initial_energy);
  CHECK(field_error(r.u, L.eval, ErrorNorm::sup) <= 0.05 * (1.0 + phi.values.cwiseAbs().maxCoeff()));
}

TEST_CASE("constrained mode pins boundary cells to their face mean") {
  const GridPtr g = rasterize(DomainSpec::parabolic(), 1.0 / 16.0);
  const BoundaryDatum phi = sample_datum(*g, closed_form::es1_datum());
  SolverConfig cfg;
  cfg.mode = BoundaryMode::constrained;
  const SolveReport r = solve(g, phi, cfg);
  const Eigen::VectorXd m = owner_means(*g, phi);
  for (int k = 0; k < g->size(); ++k) {
    if (!g->is_boundary_cell(k)) continue;
    double s = 0.0;
    for (int f : g->faces_of(k)) s += phi.values(f);
    CHECK(r.u[k] == doctest::Approx(s / static_cast<double>(g->faces_of(k).size())));
    CHECK(r.u[k] == m(k));
  }
}

TEST_CASE("identical inputs give bit-identical solves") {
  const GridPtr g = rasterize(DomainSpec::parabolic(), 1.0 / 16.0);
  const BoundaryDatum phi = sample_datum(*g, closed_form::es1_datum());
  const SolveReport a = solve(g, phi, SolverConfig{});
  const SolveReport b = solve(g, phi, SolverConfig{});
  CHECK(a.iterations == b.iterations);
  CHECK(a.energy.total == b.energy.total);
  CHECK((a.u.values().array() == b.u.values().array()).all());
}

TEST_CASE("vertical shifts commute with the solver") {
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 1.0 / 16.0);
  const BoundaryDatum phi = sample_datum(*g, closed_form::affine(Vec2(0.5, 1.0), 0.0));
  const SolveReport a = solve(g, phi, SolverConfig{});
  for (double alpha : {-1.0, 0.3}) {
    BoundaryDatum s = phi;
    s.values.array() += alpha;
    const SolveReport b = solve(g, s, SolverConfig{});
    CHECK((b.u.values().array() - a.u.values().array() - alpha).abs().maxCoeff() <= solver_tol_abs(g->h(), phi));
  }
}

TEST_CASE("non-finite energy is reported as divergence with its iteration") {
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 0.25);
  BoundaryDatum phi = sample_datum(*g, closed_form::constant(1e308));
  SolverConfig cfg;
  cfg.window = 10;
  try {
    solve(g, phi, cfg);
    FAIL("expected divergence");
  } catch (const Divergence& e) {
    CHECK(e.iteration() == 10);
    CHECK(std::string(e.what()).find("10") != std::string::npos);
  }
}

TEST_CASE("mismatched datum is rejected") {
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 0.25);
  CHECK_THROWS_AS(solve(g, BoundaryDatum{Eigen::VectorXd::Zero(1), "x"}, SolverConfig{}), InvalidInput);
}

TEST_CASE("refinement table for affine data is monotone") {
  const BoundaryExpr L = closed_form::affine(Vec2(1, -2), 0.5);
  const RefineTable t = refine_study(DomainSpec::disk(Vec2::Zero(), 1.0), L, L.eval, {0.125, 0.0625, 0.03125},
                                     SolverConfig{}, ErrorNorm::sup);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.monotone);
  CHECK(solver_tol_abs(0.1, BoundaryDatum{Eigen::VectorXd::Constant(3, -2.0), ""}) == doctest::Approx(3.0));
}
