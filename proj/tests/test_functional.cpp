#include "harea/closed_forms.hpp"
#include "harea/error.hpp"
#include "harea/functional.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace harea;

TEST_CASE("energy of a field on a two-cell grid by hand") {
  // Cells at (0.25, 0.25) and (0.75, 0.25) of the rectangle [0,1]x[0,0.5], h = 0.5.
  const GridPtr g = rasterize(DomainSpec::rectangle(Vec2(0, 0), Vec2(1, 0.5)), 0.5);
  REQUIRE(g->size() == 2);
  ScalarField<double> u(g);
  const int a = g->locate(Vec2(0.25, 0.25));
  const int b = g->locate(Vec2(0.75, 0.25));
  u[a] = 1.0;
  u[b] = 2.0;
  // Only the east component of cell a is active: (2 - 1) / 0.5 + X*_x(a) = 2 - 0.5.
  const double e_iso = 0.25 * 1.5;
  CHECK(area_energy(u) == doctest::Approx(e_iso));
  CHECK(area_energy(u, EnergyMode::anisotropic) == doctest::Approx(e_iso));
  // Six boundary faces of length 0.5; a owns three with datum 0, b three with datum 0.
  const BoundaryDatum phi = sample_datum(*g, closed_form::zero());
  CHECK(boundary_penalty(u, phi) == doctest::Approx(0.5 * (3 * 1.0 + 3 * 2.0)));
  const EnergyBreakdown e = penalized_energy(u, phi);
  CHECK(e.total == doctest::Approx(e.interior + e.penalty));
}

TEST_CASE("anisotropic energy dominates isotropic energy") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 1.0 / 16.0);
  for (int t = 0; t < 10; ++t) {
    ScalarField<double> u(g);
    for (int k = 0; k < u.size(); ++k) u[k] = U(rng);
    const double iso = area_energy(u);
    const double an = area_energy(u, EnergyMode::anisotropic);
    CHECK(an >= iso);
    CHECK(an <= std::sqrt(2.0) * iso + 1e-12);
  }
}

TEST_CASE("penalty vanishes on the datum's trace") {
  const GridPtr g = rasterize(DomainSpec::rectangle(Vec2(0, 0), Vec2(1, 1)), 0.25);
  const ScalarField<double> u(g, Eigen::VectorXd::Constant(g->size(), 0.7));
  CHECK(boundary_penalty(u, sample_datum(*g, closed_form::constant(0.7))) == 0.0);
  CHECK_THROWS_AS(boundary_penalty(u, BoundaryDatum{Eigen::VectorXd::Zero(2), "x"}), InvalidInput);
}

TEST_CASE("translation by a lattice vector preserves the energy exactly") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double h = 1.0 / 16.0;
  const DomainSpec d = DomainSpec::disk(Vec2::Zero(), 1.0);
  const GridPtr g = rasterize(d, h);
  const Vec2 tau(5 * h, -2 * h);
  const double xi = -0.3;
  const GridPtr gt = rasterize(d.translated(tau), h);
  REQUIRE(gt->size() == g->size());
  for (int t = 0; t < 10; ++t) {
    ScalarField<double> u(g);
    for (int k = 0; k < u.size(); ++k) u[k] = U(rng);
    BoundaryDatum phi{Eigen::VectorXd(static_cast<Eigen::Index>(g->faces().size())), "random"};
    for (Eigen::Index f = 0; f < phi.values.size(); ++f) phi.values(f) = U(rng);

    // u~(z) = u(z + tau) + 2 <tau*, z> + xi and the matching datum.
    const Vec2 ts(-tau.y(), tau.x());
    ScalarField<double> ut(gt);
    for (int k = 0; k < gt->size(); ++k) ut[k] = u[g->locate(gt->center(k) + tau)] + 2.0 * ts.dot(gt->center(k)) + xi;
    BoundaryDatum phit{Eigen::VectorXd(static_cast<Eigen::Index>(gt->faces().size())), "moved"};
    for (std::size_t f = 0; f < gt->faces().size(); ++f) {
      const auto& face = gt->faces()[f];
      const int src = g->locate(gt->center(face.owner) + tau);
      int match = -1;
      for (int of : g->faces_of(src))
        if (g->faces()[static_cast<std::size_t>(of)].side == face.side) match = of;
      REQUIRE(match >= 0);
      phit.values(static_cast<Eigen::Index>(f)) = phi.values(match) + 2.0 * ts.dot(gt->center(face.owner)) + xi;
    }
    const double e0 = penalized_energy(u, phi).total;
    const double e1 = penalized_energy(ut, phit).total;
    CHECK(std::abs(e1 - e0) <= 1e-10 * e0);
  }
}

TEST_CASE("Euler residual of the upper es1 branch vanishes off the characteristic line") {
  // 2xy is bilinear, so forward differences are exact: grad + X* = (0, 4x).
  const double h = 1.0 / 32.0;
  const GridPtr g = rasterize(DomainSpec::rectangle(Vec2(-1, 0), Vec2(1, 1)), h);
  const ScalarField<double> u = sample_field(g, [](const Vec2& z) { return 2.0 * z.x() * z.y(); });
  const ScalarField<double> r = euler_residual(u);
  const auto core = residual_core(*g);
  int checked = 0;
  for (int k = 0; k < g->size(); ++k) {
    if (!core[static_cast<std::size_t>(k)] || std::abs(g->center(k).x()) < 2 * h) continue;
    CHECK(std::abs(r[k]) <= 1e-9);
    ++checked;
  }
  CHECK(checked > 1000);
  CHECK_THROWS_AS(euler_residual(u, 0.0), InvalidInput);
}

TEST_CASE("characteristic set of the upper es1 branch is the y axis") {
  const double h = 1.0 / 32.0;
  const GridPtr g = rasterize(DomainSpec::rectangle(Vec2(-1, 0), Vec2(1, 1)), h);
  const ScalarField<double> u = sample_field(g, [](const Vec2& z) { return 2.0 * z.x() * z.y(); });
  const double eps = 0.2;
  const auto ch = char_set(u, eps);
  for (int k = 0; k < g->size(); ++k) {
    if (g->is_boundary_cell(k)) continue;
    CHECK(ch[static_cast<std::size_t>(k)] == (std::abs(4.0 * g->center(k).x()) <= eps));
  }
  CHECK_THROWS_AS(char_set(u, -1.0), InvalidInput);
}

TEST_CASE("certificate gap") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 1.0 / 16.0);
  const BoundaryDatum phi = sample_datum(*g, closed_form::zero());
  ScalarField<double> u(g);
  for (int k = 0; k < u.size(); ++k) u[k] = U(rng);
  CHECK(certificate_gap(u, VectorField<double>(g), phi) == doctest::Approx(penalized_energy(u, phi).total));
  const VectorField<double> V = calibration_field(g);
  for (int t = 0; t < 20; ++t) {
    for (int k = 0; k < u.size(); ++k) u[k] = U(rng);
    CHECK(certificate_gap(u, V, phi) >= -1e-9);
  }
  // The zero field is calibrated: the gap is exactly the penalty term (zero).
  CHECK(std::abs(certificate_gap(ScalarField<double>(g), V, phi)) <= 1e-12);
  VectorField<double> big(g);
  big.values().row(0) << 1.5, 0.0;
  CHECK_THROWS_AS(certificate_gap(u, big, phi), InadmissibleCertificate);
  // The l-infinity ball is admissible in anisotropic mode.
  VectorField<double> box(g);
  box.values().setConstant(1.0);
  CHECK_NOTHROW(certificate_gap(u, box, phi, EnergyMode::anisotropic));
  CHECK(certificate_gap(u, box, phi, EnergyMode::anisotropic) >= -1e-9);
}

TEST_CASE("disk calibration energy approaches the quadrature value") {
  // sum h^2 |X*| at the centres versus the radial integral 4 pi / 3.
  double prev = 1.0;
  for (double h : {1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0}) {
    const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), h);
    double s = 0.0;
    for (int k = 0; k < g->size(); ++k) s += h * h * 2.0 * g->center(k).norm();
    const double err = std::abs(s - 4.0 * M_PI / 3.0) / (4.0 * M_PI / 3.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.01);
}
