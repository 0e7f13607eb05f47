#pragma once

#include "harea/bsc.hpp"
#include "harea/harness.hpp"
#include "harea/solver.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace harea {

/// Closed-form datum or a per-face samples file.
struct DatumSpec {
  std::string type = "zero";  ///< zero | affine | es1 | es2 | samples
  Vec2 a = Vec2::Zero();
  double b = 0.0;
  std::string path;
};

struct RunConfig {
  DomainSpec domain = DomainSpec::disk(Vec2::Zero(), 1.0);
  nlohmann::json domain_json;
  double h = 1.0 / 32.0;
  DatumSpec datum;
  SolverConfig solver;
  std::string output = "out";
};

/// Parse a JSON run configuration. Relative sample paths are resolved against base_dir.
/// Unknown keys, malformed JSON (reported with line and column) and invalid values
/// throw ConfigError.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);

/// The closed-form expression of the datum, or nullopt for a samples file.
std::optional<BoundaryExpr> datum_expr(const DatumSpec& d);
/// Exact solution for the closed-form data that have one on the configured domain.
std::optional<std::function<double(const Vec2&)>> reference_solution(const DatumSpec& d);
BoundaryDatum make_datum(const RunConfig& cfg, const Grid& grid);
/// BSC samples: projected onto the boundary for closed forms, face midpoints otherwise.
std::vector<BoundarySample> make_bsc_samples(const RunConfig& cfg, const Grid& grid);

/// CSV with header "x,y,value", one row per cell (or face), 17 significant digits.
std::string field_csv(const Eigen::Matrix<double, Eigen::Dynamic, 2>& points, const Eigen::VectorXd& values);
void write_field(const ScalarField<double>& u, const std::string& path);
/// Throws ConfigError on a missing header, malformed row, or grid mismatch.
ScalarField<double> read_field(const std::string& path, const GridPtr& grid);
/// Per-face samples in the same format, rows matching the face midpoints.
BoundaryDatum read_face_samples(const std::string& path, const Grid& grid);

/// Plain (P2) grayscale image of the raster; exterior cells are black.
std::string field_pgm(const ScalarField<double>& u);
std::string mask_pgm(const Grid& grid, const std::vector<bool>& mask);

std::string certificates_csv(const BscReport& rep);

nlohmann::json to_json(const EnergyBreakdown& e);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const BscReport& r);
nlohmann::json to_json(const RefineTable& t);
nlohmann::json to_json(const TestReport& r);
nlohmann::json to_json(const SuiteResult& s);

/// Write to a temporary sibling, then rename over the target.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace harea
