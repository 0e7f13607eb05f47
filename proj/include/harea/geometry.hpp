#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace harea {

using Vec2 = Eigen::Vector2d;

struct Box {
  Vec2 lo;
  Vec2 hi;
};

struct Disk {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
};

/// Simple closed polygon, vertices counterclockwise, last vertex not repeated.
struct Polygon {
  std::vector<Vec2> vertices;
};

/// Domain given by a level function (< 0 inside) and a boundary parametrization on [0, 1).
struct Analytic {
  std::string name;
  std::function<double(const Vec2&)> level;
  std::function<Vec2(double)> boundary;
  Box bbox;
};

class DomainSpec {
 public:
  using Kind = std::variant<Disk, Polygon, Analytic>;

  static DomainSpec disk(const Vec2& center, double radius);
  static DomainSpec polygon(std::vector<Vec2> vertices);
  static DomainSpec rectangle(const Vec2& lo, const Vec2& hi);
  /// {x^2 - 1 < y < 1 - x^2}
  static DomainSpec parabolic();

  bool contains(const Vec2& z) const;
  Box bbox() const;
  /// The set {z : z + tau in this domain}.
  DomainSpec translated(const Vec2& tau) const;
  /// Nearest point of the boundary curve.
  Vec2 project_to_boundary(const Vec2& z) const;
  std::string name() const;
  const Kind& kind() const noexcept { return kind_; }

 private:
  explicit DomainSpec(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// Outward normal directions of the four cell faces, in stencil order.
enum class Side : int { east = 0, west = 1, north = 2, south = 3 };

inline constexpr std::array<Side, 4> kSides{Side::east, Side::west, Side::north, Side::south};

struct BoundaryFace {
  int owner = -1;  ///< compact interior cell index
  Side side = Side::east;
  Vec2 normal;
  Vec2 midpoint;
  double measure = 0.0;
};

/// Difference stencil of one gradient component at one cell: (u[plus] - u[minus]) / h.
/// Inactive when the forward neighbour along that axis is exterior.
struct Stencil {
  int plus = -1;
  int minus = -1;
  bool active() const noexcept { return plus >= 0; }
};

/// Cell-centred raster of a domain on the lattice {(i + 1/2) h} anchored at the origin.
///
/// Interior cells are numbered compactly in row-major order (y outer, x inner).
/// Grids built with the same h share cell centres, so grids of translated or nested
/// domains line up exactly whenever offsets are multiples of h.
class Grid {
 public:
  Grid(double h, const Vec2& origin, int nx, int ny, std::vector<bool> mask);

  double h() const noexcept { return h_; }
  const Vec2& origin() const noexcept { return origin_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int size() const noexcept { return static_cast<int>(cells_.size()); }

  bool interior(int i, int j) const;
  /// Compact index of raster cell (i, j), or -1 when exterior or off the raster.
  int index(int i, int j) const;
  std::array<int, 2> cell(int k) const { return cells_[static_cast<std::size_t>(k)]; }
  Vec2 center(int k) const;
  /// Compact index of the cell containing z, or -1.
  int locate(const Vec2& z) const;
  const Eigen::Matrix<double, Eigen::Dynamic, 2>& centers() const noexcept { return centers_; }
  /// Compact index of the neighbour across the given side, or -1.
  int neighbor(int k, Side side) const;

  const std::vector<BoundaryFace>& faces() const noexcept { return faces_; }
  /// Faces owned by cell k (indices into faces()).
  const std::vector<int>& faces_of(int k) const { return faces_of_[static_cast<std::size_t>(k)]; }
  bool is_boundary_cell(int k) const { return !faces_of(k).empty(); }

  /// Stencil of gradient component `axis` (0 = x, 1 = y) at cell k.
  const Stencil& stencil(int k, int axis) const {
    return stencils_[static_cast<std::size_t>(2 * k + axis)];
  }

  /// Cells whose centres lie in the given domain (used to carve sub-grids).
  std::vector<bool> raster_mask() const { return mask_; }

 private:
  double h_;
  Vec2 origin_;
  int nx_;
  int ny_;
  std::vector<bool> mask_;
  std::vector<int> compact_;
  std::vector<std::array<int, 2>> cells_;
  Eigen::Matrix<double, Eigen::Dynamic, 2> centers_;
  std::vector<BoundaryFace> faces_;
  std::vector<std::vector<int>> faces_of_;
  std::vector<Stencil> stencils_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Rasterize the domain at spacing h. Throws DomainUnresolved on an empty interior.
GridPtr rasterize(const DomainSpec& domain, double h);

/// Sub-grid of `grid` keeping only interior cells for which keep(center) holds.
GridPtr restrict_grid(const Grid& grid, const std::function<bool(const Vec2&)>& keep);

const std::vector<BoundaryFace>& boundary_faces(const Grid& grid);

/// Named closed-form expression z -> R.
struct BoundaryExpr {
  std::string name;
  std::function<double(const Vec2&)> eval;
};

struct BoundaryDatum {
  Eigen::VectorXd values;  ///< one value per boundary face
  std::string provenance;
};

/// values[f] = expr(midpoint(f)); throws InvalidInput naming the face on a non-finite value.
BoundaryDatum sample_datum(const Grid& grid, const BoundaryExpr& expr);

/// Datum from raw per-face samples.
BoundaryDatum datum_from_samples(const Grid& grid, Eigen::VectorXd values, std::string provenance);

}  // namespace harea
