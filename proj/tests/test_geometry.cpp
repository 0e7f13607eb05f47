#include "harea/error.hpp"
#include "harea/geometry.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace harea;

TEST_CASE("disk raster matches a direct lattice count") {
  // At h = 0.5 the centres (+-0.25, +-0.25), (+-0.75, +-0.25), (+-0.25, +-0.75) are inside.
  CHECK(rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 0.5)->size() == 12);
  CHECK(oracle::disk_cells(0, 0, 1, 0.5) == 12);
  for (double h : {0.25, 0.1, 1.0 / 32.0})
    CHECK(rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), h)->size() == oracle::disk_cells(0, 0, 1, h));
  CHECK(rasterize(DomainSpec::disk(Vec2(0.3, -0.2), 0.7), 0.05)->size() == oracle::disk_cells(0.3, -0.2, 0.7, 0.05));
}

TEST_CASE("square faces: count, normals, measure") {
  const GridPtr g = rasterize(DomainSpec::rectangle(Vec2(0, 0), Vec2(1, 1)), 0.25);
  CHECK(g->size() == 16);
  REQUIRE(g->faces().size() == 16);
  double perimeter = 0.0;
  for (const auto& f : g->faces()) {
    perimeter += f.measure;
    const Vec2 c = g->center(f.owner);
    // The midpoint sits half a cell from the owner centre along the outward normal.
    CHECK((f.midpoint - (c + 0.125 * f.normal)).norm() == doctest::Approx(0.0));
    CHECK(f.normal.norm() == doctest::Approx(1.0));
  }
  CHECK(perimeter == doctest::Approx(4.0));
  // Corner cell owns two faces.
  CHECK(g->faces_of(g->locate(Vec2(0.1, 0.1))).size() == 2);
  CHECK(g->faces_of(g->locate(Vec2(0.4, 0.4))).empty());
}

TEST_CASE("faces are ordered by owner then side") {
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 0.125);
  for (std::size_t f = 1; f < g->faces().size(); ++f) {
    const auto& a = g->faces()[f - 1];
    const auto& b = g->faces()[f];
    CHECK((a.owner < b.owner || (a.owner == b.owner && static_cast<int>(a.side) < static_cast<int>(b.side))));
  }
}

TEST_CASE("a boundary face separates an interior cell from an exterior one") {
  const GridPtr g = rasterize(DomainSpec::parabolic(), 1.0 / 16.0);
  for (const auto& f : g->faces()) {
    CHECK(g->neighbor(f.owner, f.side) == -1);
    CHECK(g->locate(f.midpoint + 0.25 * g->h() * f.normal) == -1);
    CHECK(g->locate(f.midpoint - 0.25 * g->h() * f.normal) == f.owner);
  }
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(DomainSpec::polygon({Vec2(0, 0), Vec2(1, 0)}), InvalidInput);
  CHECK_THROWS_AS(DomainSpec::polygon({Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)}), InvalidInput);  // clockwise
  CHECK_THROWS_AS(DomainSpec::polygon({Vec2(0, 0), Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)}), InvalidInput);
  const DomainSpec tri = DomainSpec::polygon({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
  CHECK(tri.contains(Vec2(0.2, 0.2)));
  CHECK_FALSE(tri.contains(Vec2(0.6, 0.6)));
}

TEST_CASE("unresolved and invalid rasters") {
  CHECK_THROWS_AS(rasterize(DomainSpec::disk(Vec2::Zero(), 0.01), 1.0), DomainUnresolved);
  CHECK_THROWS_AS(rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 0.0), InvalidInput);
  CHECK_THROWS_AS(rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), -0.1), InvalidInput);
}

TEST_CASE("sampling rejects non-finite values and names the face") {
  const GridPtr g = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 0.25);
  const BoundaryExpr bad{"bad", [](const Vec2& z) { return z.x() > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0; }};
  try {
    sample_datum(*g, bad);
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("face") != std::string::npos);
  }
  CHECK_THROWS_AS(datum_from_samples(*g, Eigen::VectorXd::Zero(3), "short"), InvalidInput);
}

TEST_CASE("translated domains keep the lattice") {
  const DomainSpec d = DomainSpec::parabolic();
  const double h = 1.0 / 16.0;
  const Vec2 tau(2 * h, -3 * h);
  const GridPtr a = rasterize(d, h);
  const GridPtr b = rasterize(d.translated(tau), h);
  REQUIRE(a->size() == b->size());
  for (int k = 0; k < b->size(); ++k) CHECK(a->locate(b->center(k) + tau) >= 0);
  const DomainSpec disk = DomainSpec::disk(Vec2(1, 2), 0.5).translated(Vec2(1, 1));
  CHECK(disk.contains(Vec2(0, 1)));
  CHECK_FALSE(disk.contains(Vec2(1, 2)));
}

TEST_CASE("boundary projection") {
  const DomainSpec disk = DomainSpec::disk(Vec2(1, 0), 2.0);
  CHECK((disk.project_to_boundary(Vec2(2, 0)) - Vec2(3, 0)).norm() == doctest::Approx(0.0));
  const DomainSpec sq = DomainSpec::rectangle(Vec2(0, 0), Vec2(1, 1));
  CHECK((sq.project_to_boundary(Vec2(0.3, 0.1)) - Vec2(0.3, 0.0)).norm() == doctest::Approx(0.0));

  // Parabolic: compare against a dense parameter scan.
  const DomainSpec p = DomainSpec::parabolic();
  const auto& a = std::get<Analytic>(p.kind());
  for (const Vec2& z : {Vec2(0.1, 0.9), Vec2(0.9, 0.05), Vec2(-0.5, -0.6), Vec2(0.0, -0.97)}) {
    const Vec2 q = p.project_to_boundary(z);
    CHECK(std::abs(a.level(q)) < 1e-9);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200000; ++i) best = std::min(best, (a.boundary(i / 200000.0) - z).norm());
    CHECK((q - z).norm() <= best + 1e-9);
  }
}

TEST_CASE("restricted grid is a sub-raster") {
  const GridPtr g = rasterize(DomainSpec::rectangle(Vec2(-1, -1), Vec2(1, 1)), 0.125);
  const GridPtr s = restrict_grid(*g, [](const Vec2& z) { return std::abs(z.x()) < 0.5 && std::abs(z.y()) < 0.5; });
  CHECK(s->size() == 64);
  CHECK(s->faces().size() == 32);
  for (int k = 0; k < s->size(); ++k) CHECK(g->locate(s->center(k)) >= 0);
}
