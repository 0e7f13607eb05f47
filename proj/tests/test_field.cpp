#include "harea/field.hpp"
#include "harea/functional.hpp"

#include <doctest.h>

#include <random>

using namespace harea;

namespace {

ScalarField<double> random_scalar(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  ScalarField<double> u(g);
  for (int k = 0; k < u.size(); ++k) u[k] = U(rng);
  return u;
}

VectorField<double> random_vector(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  VectorField<double> p(g);
  for (int k = 0; k < p.size(); ++k) p.values().row(k) << U(rng), U(rng);
  return p;
}

}  // namespace

TEST_CASE("star rotates by a quarter turn") {
  CHECK(star(Vec2(1, 0)) == Vec2(0, 1));
  CHECK(star(Vec2(0, 1)) == Vec2(-1, 0));
  const Vec2 z(0.3, -1.7);
  CHECK(star(star(z)) == -z);
  CHECK(star(z).dot(z) == 0.0);
}

TEST_CASE("divergence is the negative adjoint of the gradient") {
  std::mt19937_64 rng(3);
  for (const auto& d : {DomainSpec::rectangle(Vec2(-1, -1), Vec2(1, 1)), DomainSpec::disk(Vec2::Zero(), 1.0),
                        DomainSpec::parabolic()}) {
    const GridPtr g = rasterize(d, 1.0 / 16.0);
    for (int t = 0; t < 20; ++t) {
      const ScalarField<double> u = random_scalar(g, rng);
      const VectorField<double> p = random_vector(g, rng);
      const double a = inner(gradient(u), p);
      const double b = inner(u, divergence(p));
      CHECK(std::abs(a + b) <= 1e-12 * std::max(std::abs(a), 1.0));
    }
  }
}

TEST_CASE("gradient of an affine function is exact on active components") {
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 1.0 / 8.0);
  const ScalarField<double> u = sample_field(g, [](const Vec2& z) { return 3.0 * z.x() - 0.5 * z.y() + 1.0; });
  const VectorField<double> du = gradient(u);
  for (int k = 0; k < g->size(); ++k) {
    CHECK(du.values()(k, 0) == doctest::Approx(g->stencil(k, 0).active() ? 3.0 : 0.0));
    CHECK(du.values()(k, 1) == doctest::Approx(g->stencil(k, 1).active() ? -0.5 : 0.0));
  }
}

TEST_CASE("X* field") {
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 0.25);
  const VectorField<double> x = xstar_field(g);
  const VectorField<double> a = active_xstar_field(g);
  for (int k = 0; k < g->size(); ++k) {
    const Vec2 c = g->center(k);
    CHECK(x[k] == 2.0 * star(c));
    for (int ax = 0; ax < 2; ++ax) CHECK(a.values()(k, ax) == (g->stencil(k, ax).active() ? x.values()(k, ax) : 0.0));
  }
}

TEST_CASE("vee and wedge") {
  std::mt19937_64 rng(5);
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 0.25);
  const auto u = random_scalar(g, rng);
  const auto v = random_scalar(g, rng);
  const auto [hi, lo] = vee_wedge(u, v);
  for (int k = 0; k < g->size(); ++k) {
    CHECK(hi[k] == std::max(u[k], v[k]));
    CHECK(lo[k] == std::min(u[k], v[k]));
    CHECK(hi[k] + lo[k] == u[k] + v[k]);
  }
}

TEST_CASE("Lipschitz estimate and sup norm") {
  const GridPtr g = rasterize(DomainSpec::rectangle(Vec2(0, 0), Vec2(1, 1)), 0.125);
  const ScalarField<double> u = sample_field(g, [](const Vec2& z) { return 3.0 * z.x() + 4.0 * z.y(); });
  CHECK(lipschitz_estimate(u) == doctest::Approx(5.0));
  CHECK(max_abs(u) == doctest::Approx(3.0 * 0.9375 + 4.0 * 0.9375));
}

TEST_CASE("long double instantiation") {
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 0.25);
  ScalarField<long double> u(g);
  for (int k = 0; k < u.size(); ++k) u[k] = static_cast<long double>(g->center(k).x());
  const auto e = area_energy(u);
  CHECK(static_cast<double>(e) > 0.0);
}
