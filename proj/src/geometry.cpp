#include "harea/geometry.hpp"

#include "harea/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace harea {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  if (cross(b - a, p - a) != 0.0) return false;
  return p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
         p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  return (d1 == 0 && on_segment(c, a, b)) || (d2 == 0 && on_segment(d, a, b)) ||
         (d3 == 0 && on_segment(a, c, d)) || (d4 == 0 && on_segment(b, c, d));
}

// Even-odd rule; points on an edge are exterior.
bool polygon_contains(const Polygon& poly, const Vec2& z) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (on_segment(z, v[j], v[i])) return false;
    if ((v[i].y() > z.y()) != (v[j].y() > z.y())) {
      const double x_cross = v[j].x() + (z.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (z.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

void validate_polygon(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) throw InvalidInput("polygon needs at least 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].allFinite()) throw InvalidInput("polygon vertex is not finite");
    area2 += cross(v[i], v[(i + 1) % n]);
  }
  if (!(area2 > 0.0)) throw InvalidInput("polygon must be counterclockwise with positive area");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        throw InvalidInput("polygon is not simple");
    }
  }
}

Vec2 side_normal(Side s) {
  switch (s) {
    case Side::east: return {1.0, 0.0};
    case Side::west: return {-1.0, 0.0};
    case Side::north: return {0.0, 1.0};
    case Side::south: return {0.0, -1.0};
  }
  return {0.0, 0.0};
}

constexpr std::array<std::array<int, 2>, 4> kOffsets{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

}  // namespace

DomainSpec DomainSpec::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("disk radius must be positive");
  if (!center.allFinite()) throw InvalidInput("disk center is not finite");
  return DomainSpec(Disk{center, radius});
}

DomainSpec DomainSpec::polygon(std::vector<Vec2> vertices) {
  Polygon poly{std::move(vertices)};
  validate_polygon(poly);
  return DomainSpec(std::move(poly));
}

DomainSpec DomainSpec::rectangle(const Vec2& lo, const Vec2& hi) {
  return polygon({lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}});
}

DomainSpec DomainSpec::parabolic() {
  Analytic a;
  a.name = "parabolic";
  a.level = [](const Vec2& z) {
    const double x2 = z.x() * z.x();
    return std::max(x2 - 1.0 - z.y(), z.y() - (1.0 - x2));
  };
  // t in [0, 1/2): upper arc left to right; t in [1/2, 1): lower arc right to left.
  a.boundary = [](double t) -> Vec2 {
    t -= std::floor(t);
    if (t < 0.5) {
      const double x = -1.0 + 4.0 * t;
      return {x, 1.0 - x * x};
    }
    const double x = 1.0 - 4.0 * (t - 0.5);
    return {x, x * x - 1.0};
  };
  a.bbox = Box{{-1.0, -1.0}, {1.0, 1.0}};
  for (int k = 0; k < 64; ++k) {
    const Vec2 p = a.boundary(k / 64.0);
    if (std::abs(a.level(p)) > 1e-12) throw InvalidInput("parabolic parametrization off the boundary");
  }
  return DomainSpec(std::move(a));
}

bool DomainSpec::contains(const Vec2& z) const {
  return std::visit(
      [&](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return (z - d.center).squaredNorm() < d.radius * d.radius;
        } else if constexpr (std::is_same_v<T, Polygon>) {
          return polygon_contains(d, z);
        } else {
          return d.level(z) < 0.0;
        }
      },
      kind_);
}

Box DomainSpec::bbox() const {
  return std::visit(
      [](const auto& d) -> Box {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Disk>) {
          const Vec2 r = Vec2::Constant(d.radius);
          return {d.center - r, d.center + r};
        } else if constexpr (std::is_same_v<T, Polygon>) {
          Box b{d.vertices.front(), d.vertices.front()};
          for (const auto& v : d.vertices) {
            b.lo = b.lo.cwiseMin(v);
            b.hi = b.hi.cwiseMax(v);
          }
          return b;
        } else {
          return d.bbox;
        }
      },
      kind_);
}

DomainSpec DomainSpec::translated(const Vec2& tau) const {
  return std::visit(
      [&](const auto& d) -> DomainSpec {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return DomainSpec(Disk{d.center - tau, d.radius});
        } else if constexpr (std::is_same_v<T, Polygon>) {
          Polygon p = d;
          for (auto& v : p.vertices) v -= tau;
          return DomainSpec(std::move(p));
        } else {
          Analytic a;
          a.name = d.name + "-translated";
          a.level = [level = d.level, tau](const Vec2& z) { return level(z + tau); };
          a.boundary = [boundary = d.boundary, tau](double t) { return Vec2(boundary(t) - tau); };
          a.bbox = Box{d.bbox.lo - tau, d.bbox.hi - tau};
          return DomainSpec(std::move(a));
        }
      },
      kind_);
}

Vec2 DomainSpec::project_to_boundary(const Vec2& z) const {
  return std::visit(
      [&](const auto& d) -> Vec2 {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Disk>) {
          const Vec2 r = z - d.center;
          const double n = r.norm();
          return n > 0.0 ? Vec2(d.center + d.radius * r / n) : Vec2(d.center + Vec2(d.radius, 0.0));
        } else if constexpr (std::is_same_v<T, Polygon>) {
          const auto& v = d.vertices;
          Vec2 best = v.front();
          double best_d = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < v.size(); ++i) {
            const Vec2& a = v[i];
            const Vec2& b = v[(i + 1) % v.size()];
            const double t = std::clamp((z - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
            const Vec2 q = a + t * (b - a);
            if (const double dd = (q - z).squaredNorm(); dd < best_d) {
              best_d = dd;
              best = q;
            }
          }
          return best;
        } else {
          // Coarse scan of the parametrization, then golden-section refinement.
          constexpr int kScan = 4096;
          auto dist = [&](double t) { return (d.boundary(t) - z).squaredNorm(); };
          int kbest = 0;
          double dbest = dist(0.0);
          for (int k = 1; k < kScan; ++k) {
            if (const double dk = dist(static_cast<double>(k) / kScan); dk < dbest) {
              dbest = dk;
              kbest = k;
            }
          }
          double lo = static_cast<double>(kbest - 1) / kScan;
          double hi = static_cast<double>(kbest + 1) / kScan;
          const double g = 0.5 * (std::sqrt(5.0) - 1.0);
          double x1 = hi - g * (hi - lo);
          double x2 = lo + g * (hi - lo);
          double f1 = dist(x1);
          double f2 = dist(x2);
          for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
              hi = x2;
              x2 = x1;
              f2 = f1;
              x1 = hi - g * (hi - lo);
              f1 = dist(x1);
            } else {
              lo = x1;
              x1 = x2;
              f1 = f2;
              x2 = lo + g * (hi - lo);
              f2 = dist(x2);
            }
          }
          const double t = 0.5 * (lo + hi);
          return dist(t) < dbest ? d.boundary(t) : d.boundary(static_cast<double>(kbest) / kScan);
        }
      },
      kind_);
}

std::string DomainSpec::name() const {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Disk>) return "disk";
        else if constexpr (std::is_same_v<T, Polygon>) return "polygon";
        else return d.name;
      },
      kind_);
}

Grid::Grid(double h, const Vec2& origin, int nx, int ny, std::vector<bool> mask)
    : h_(h), origin_(origin), nx_(nx), ny_(ny), mask_(std::move(mask)) {
  if (!(h > 0.0)) throw InvalidInput("grid spacing must be positive");
  if (nx <= 0 || ny <= 0 || mask_.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw InvalidInput("grid mask does not match its dimensions");

  compact_.assign(mask_.size(), -1);
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      const std::size_t r = static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
      if (mask_[r]) {
        compact_[r] = static_cast<int>(cells_.size());
        cells_.push_back({i, j});
      }
    }
  }
  if (cells_.empty()) throw DomainUnresolved("domain unresolved: no interior cell at h = " + std::to_string(h));

  const int n = size();
  centers_.resize(n, 2);
  for (int k = 0; k < n; ++k) {
    const auto [i, j] = cells_[static_cast<std::size_t>(k)];
    centers_(k, 0) = origin_.x() + (i + 0.5) * h_;
    centers_(k, 1) = origin_.y() + (j + 0.5) * h_;
  }

  faces_of_.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    for (Side s : kSides) {
      if (neighbor(k, s) >= 0) continue;
      BoundaryFace f;
      f.owner = k;
      f.side = s;
      f.normal = side_normal(s);
      f.midpoint = center(k) + 0.5 * h_ * f.normal;
      f.measure = h_;
      faces_of_[static_cast<std::size_t>(k)].push_back(static_cast<int>(faces_.size()));
      faces_.push_back(f);
    }
  }

  // Forward differences; a component is inactive when its forward neighbour is exterior.
  stencils_.resize(static_cast<std::size_t>(2 * n));
  for (int k = 0; k < n; ++k) {
    for (int axis = 0; axis < 2; ++axis) {
      const int nb = neighbor(k, axis == 0 ? Side::east : Side::north);
      if (nb >= 0) stencils_[static_cast<std::size_t>(2 * k + axis)] = {nb, k};
    }
  }
}

bool Grid::interior(int i, int j) const { return index(i, j) >= 0; }

int Grid::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  return compact_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i)];
}

Vec2 Grid::center(int k) const { return centers_.row(k).transpose(); }

int Grid::locate(const Vec2& z) const {
  const Vec2 r = (z - origin_) / h_;
  return index(static_cast<int>(std::floor(r.x())), static_cast<int>(std::floor(r.y())));
}

int Grid::neighbor(int k, Side side) const {
  const auto [i, j] = cells_[static_cast<std::size_t>(k)];
  const auto& off = kOffsets[static_cast<std::size_t>(side)];
  return index(i + off[0], j + off[1]);
}

GridPtr rasterize(const DomainSpec& domain, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("grid spacing must be positive");
  const Box b = domain.bbox();
  if (!b.lo.allFinite() || !b.hi.allFinite()) throw InvalidInput("domain must be bounded");
  const long i0 = static_cast<long>(std::floor(b.lo.x() / h)) - 1;
  const long j0 = static_cast<long>(std::floor(b.lo.y() / h)) - 1;
  const long i1 = static_cast<long>(std::ceil(b.hi.x() / h)) + 1;
  const long j1 = static_cast<long>(std::ceil(b.hi.y() / h)) + 1;
  const long nx = i1 - i0;
  const long ny = j1 - j0;
  if (nx * ny > 64L * 1024L * 1024L) throw InvalidInput("grid too large");
  const Vec2 origin(static_cast<double>(i0) * h, static_cast<double>(j0) * h);

  std::vector<bool> mask(static_cast<std::size_t>(nx * ny), false);
  for (long j = 0; j < ny; ++j) {
    for (long i = 0; i < nx; ++i) {
      const Vec2 c(origin.x() + (static_cast<double>(i) + 0.5) * h, origin.y() + (static_cast<double>(j) + 0.5) * h);
      mask[static_cast<std::size_t>(j * nx + i)] = domain.contains(c);
    }
  }
  return std::make_shared<const Grid>(h, origin, static_cast<int>(nx), static_cast<int>(ny), std::move(mask));
}

GridPtr restrict_grid(const Grid& grid, const std::function<bool(const Vec2&)>& keep) {
  std::vector<bool> mask(static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(grid.ny()), false);
  for (int k = 0; k < grid.size(); ++k) {
    const auto [i, j] = grid.cell(k);
    mask[static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.nx()) + static_cast<std::size_t>(i)] =
        keep(grid.center(k));
  }
  return std::make_shared<const Grid>(grid.h(), grid.origin(), grid.nx(), grid.ny(), std::move(mask));
}

const std::vector<BoundaryFace>& boundary_faces(const Grid& grid) { return grid.faces(); }

BoundaryDatum sample_datum(const Grid& grid, const BoundaryExpr& expr) {
  const auto& faces = grid.faces();
  Eigen::VectorXd values(static_cast<Eigen::Index>(faces.size()));
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const double v = expr.eval(faces[f].midpoint);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "datum '" << expr.name << "' is not finite at face " << f << " (midpoint " << faces[f].midpoint.x()
         << ", " << faces[f].midpoint.y() << ")";
      throw InvalidInput(os.str());
    }
    values(static_cast<Eigen::Index>(f)) = v;
  }
  return {std::move(values), expr.name};
}

BoundaryDatum datum_from_samples(const Grid& grid, Eigen::VectorXd values, std::string provenance) {
  if (values.size() != static_cast<Eigen::Index>(grid.faces().size()))
    throw InvalidInput("datum has " + std::to_string(values.size()) + " samples for " +
                       std::to_string(grid.faces().size()) + " boundary faces");
  for (Eigen::Index f = 0; f < values.size(); ++f)
    if (!std::isfinite(values(f))) throw InvalidInput("datum sample at face " + std::to_string(f) + " is not finite");
  return {std::move(values), std::move(provenance)};
}

}  // namespace harea
