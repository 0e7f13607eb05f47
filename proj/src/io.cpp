#include "harea/io.hpp"

#include "harea/closed_forms.hpp"
#include "harea/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace harea {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

Vec2 get_vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(where + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  if (!j.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

DomainSpec parse_domain(const json& j) {
  const std::string type = get_string(j, "type", "domain");
  try {
    if (type == "disk") {
      reject_unknown(j, {"type", "center", "radius"}, "domain");
      const Vec2 c = j.contains("center") ? get_vec2(j.at("center"), "domain.center") : Vec2::Zero();
      return DomainSpec::disk(c, j.contains("radius") ? get_number(j, "radius", "domain") : 1.0);
    }
    if (type == "rectangle") {
      reject_unknown(j, {"type", "lo", "hi"}, "domain");
      if (!j.contains("lo") || !j.contains("hi")) throw ConfigError("domain: rectangle needs 'lo' and 'hi'");
      return DomainSpec::rectangle(get_vec2(j.at("lo"), "domain.lo"), get_vec2(j.at("hi"), "domain.hi"));
    }
    if (type == "polygon") {
      reject_unknown(j, {"type", "vertices"}, "domain");
      if (!j.contains("vertices") || !j.at("vertices").is_array())
        throw ConfigError("domain: polygon needs a 'vertices' array");
      std::vector<Vec2> v;
      for (const auto& p : j.at("vertices")) v.push_back(get_vec2(p, "domain.vertices"));
      return DomainSpec::polygon(std::move(v));
    }
    if (type == "parabolic") {
      reject_unknown(j, {"type"}, "domain");
      return DomainSpec::parabolic();
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  throw ConfigError("domain: unknown type '" + type + "'");
}

DatumSpec parse_datum(const json& j, const std::string& base_dir) {
  DatumSpec d;
  d.type = get_string(j, "type", "datum");
  if (d.type == "zero" || d.type == "es1" || d.type == "es2") {
    reject_unknown(j, {"type"}, "datum");
  } else if (d.type == "affine") {
    reject_unknown(j, {"type", "a", "b"}, "datum");
    if (!j.contains("a")) throw ConfigError("datum: affine needs 'a'");
    d.a = get_vec2(j.at("a"), "datum.a");
    d.b = j.contains("b") ? get_number(j, "b", "datum") : 0.0;
  } else if (d.type == "samples") {
    reject_unknown(j, {"type", "path"}, "datum");
    const std::filesystem::path p = get_string(j, "path", "datum");
    d.path = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
  } else {
    throw ConfigError("datum: unknown type '" + d.type + "'");
  }
  return d;
}

SolverConfig parse_solver(const json& j) {
  reject_unknown(j, {"mode", "energy", "max_iters", "tol", "window", "sigma", "tau", "theta", "seed"}, "solver");
  SolverConfig c;
  if (j.contains("mode")) {
    const std::string m = get_string(j, "mode", "solver");
    if (m == "penalized") c.mode = BoundaryMode::penalized;
    else if (m == "constrained") c.mode = BoundaryMode::constrained;
    else throw ConfigError("solver.mode: expected penalized or constrained");
  }
  if (j.contains("energy")) {
    const std::string m = get_string(j, "energy", "solver");
    if (m == "iso" || m == "isotropic") c.energy_mode = EnergyMode::isotropic;
    else if (m == "aniso" || m == "anisotropic") c.energy_mode = EnergyMode::anisotropic;
    else throw ConfigError("solver.energy: expected iso or aniso");
  }
  auto integer = [&](const char* key) {
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string("solver.") + key + ": expected an integer");
    return j.at(key).get<long long>();
  };
  if (j.contains("max_iters")) c.max_iters = static_cast<int>(integer("max_iters"));
  if (j.contains("window")) c.window = static_cast<int>(integer("window"));
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(integer("seed"));
  if (j.contains("tol")) c.tol = get_number(j, "tol", "solver");
  if (j.contains("theta")) c.theta = get_number(j, "theta", "solver");
  if (j.contains("sigma")) c.step_sigma = get_number(j, "sigma", "solver");
  if (j.contains("tau")) c.step_tau = get_number(j, "tau", "solver");
  return c;
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvRows {
  std::vector<std::array<double, 3>> rows;
};

CsvRows read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file, expected header x,y,value");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,value") throw ConfigError(path + ": missing header x,y,value");
  CsvRows out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 3> r{};
    const char* p = line.c_str();
    for (int c = 0; c < 3; ++c) {
      char* end = nullptr;
      r[static_cast<std::size_t>(c)] = std::strtod(p, &end);
      if (end == p || (c < 2 && *end != ',') || (c == 2 && *end != '\0'))
        throw ConfigError(path + ": malformed row at line " + std::to_string(lineno));
      p = end + (c < 2 ? 1 : 0);
    }
    out.rows.push_back(r);
  }
  return out;
}

void match_points(const CsvRows& csv, const Eigen::Matrix<double, Eigen::Dynamic, 2>& pts, double h,
                  const std::string& path, const char* what) {
  if (static_cast<Eigen::Index>(csv.rows.size()) != pts.rows())
    throw ConfigError(path + ": grid mismatch: " + std::to_string(csv.rows.size()) + " rows for " +
                      std::to_string(pts.rows()) + " " + what);
  const double tol = 1e-9 * h;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (std::abs(csv.rows[i][0] - pts(k, 0)) > tol || std::abs(csv.rows[i][1] - pts(k, 1)) > tol)
      throw ConfigError(path + ": grid mismatch at row " + std::to_string(i + 2) + ": (" + num(csv.rows[i][0]) + ", " +
                        num(csv.rows[i][1]) + ") is not " + what + " point (" + num(pts(k, 0)) + ", " +
                        num(pts(k, 1)) + ")");
  }
}

Eigen::Matrix<double, Eigen::Dynamic, 2> face_midpoints(const Grid& g) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> m(static_cast<Eigen::Index>(g.faces().size()), 2);
  for (std::size_t f = 0; f < g.faces().size(); ++f) m.row(static_cast<Eigen::Index>(f)) = g.faces()[f].midpoint;
  return m;
}

json metric_json(const Metric& m) {
  json j{{"value", m.value}};
  if (m.threshold) {
    j["threshold"] = *m.threshold;
    j["bound"] = m.upper ? "upper" : "lower";
    j["ok"] = m.ok();
  }
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  reject_unknown(j, {"domain", "h", "datum", "solver", "output"}, "config");
  RunConfig c;
  if (j.contains("domain")) {
    c.domain = parse_domain(j.at("domain"));
    c.domain_json = j.at("domain");
  } else {
    c.domain_json = {{"type", "disk"}, {"center", {0.0, 0.0}}, {"radius", 1.0}};
  }
  if (j.contains("h")) c.h = get_number(j, "h", "config");
  if (!(c.h > 0.0) || !std::isfinite(c.h)) throw ConfigError("config.h: must be positive");
  if (j.contains("datum")) c.datum = parse_datum(j.at("datum"), base_dir);
  if (j.contains("solver")) c.solver = parse_solver(j.at("solver"));
  if (j.contains("output")) c.output = get_string(j, "output", "config");
  try {
    validate(c.solver, c.h);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path);
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(read_file(path), dir.empty() ? "." : dir);
}

json to_json(const RunConfig& c) {
  json d{{"type", c.datum.type}};
  if (c.datum.type == "affine") {
    d["a"] = {c.datum.a.x(), c.datum.a.y()};
    d["b"] = c.datum.b;
  }
  if (c.datum.type == "samples") d["path"] = c.datum.path;
  const auto [ds, dt] = default_steps(c.h);
  json s{{"mode", to_string(c.solver.mode)},
         {"energy", c.solver.energy_mode == EnergyMode::isotropic ? "iso" : "aniso"},
         {"max_iters", c.solver.max_iters},
         {"tol", c.solver.tol},
         {"window", c.solver.window},
         {"sigma", c.solver.step_sigma.value_or(ds)},
         {"tau", c.solver.step_tau.value_or(dt)},
         {"theta", c.solver.theta},
         {"seed", c.solver.seed}};
  return {{"domain", c.domain_json}, {"h", c.h}, {"datum", d}, {"solver", s}, {"output", c.output}};
}

std::optional<BoundaryExpr> datum_expr(const DatumSpec& d) {
  if (d.type == "zero") return closed_form::zero();
  if (d.type == "affine") return closed_form::affine(d.a, d.b);
  if (d.type == "es1") return closed_form::es1_datum();
  if (d.type == "es2") return closed_form::es2_datum();
  return std::nullopt;
}

std::optional<std::function<double(const Vec2&)>> reference_solution(const DatumSpec& d) {
  if (d.type == "zero") return [](const Vec2&) { return 0.0; };
  if (d.type == "affine") return closed_form::affine(d.a, d.b).eval;
  if (d.type == "es1") return closed_form::es1_solution;
  if (d.type == "es2") return closed_form::es2_solution;
  return std::nullopt;
}

BoundaryDatum make_datum(const RunConfig& cfg, const Grid& grid) {
  if (auto e = datum_expr(cfg.datum)) return sample_datum(grid, *e);
  return read_face_samples(cfg.datum.path, grid);
}

std::vector<BoundarySample> make_bsc_samples(const RunConfig& cfg, const Grid& grid) {
  if (auto e = datum_expr(cfg.datum)) return bsc_samples(grid, cfg.domain, *e);
  return bsc_samples(grid, read_face_samples(cfg.datum.path, grid));
}

std::string field_csv(const Eigen::Matrix<double, Eigen::Dynamic, 2>& points, const Eigen::VectorXd& values) {
  std::string s = "x,y,value\n";
  for (Eigen::Index k = 0; k < values.size(); ++k) s += num(points(k, 0)) + "," + num(points(k, 1)) + "," + num(values(k)) + "\n";
  return s;
}

void write_field(const ScalarField<double>& u, const std::string& path) {
  write_atomic(path, field_csv(u.grid().centers(), u.values()));
}

ScalarField<double> read_field(const std::string& path, const GridPtr& grid) {
  const CsvRows csv = read_csv(path);
  match_points(csv, grid->centers(), grid->h(), path, "cell");
  ScalarField<double> u(grid);
  for (int k = 0; k < u.size(); ++k) u[k] = csv.rows[static_cast<std::size_t>(k)][2];
  return u;
}

BoundaryDatum read_face_samples(const std::string& path, const Grid& grid) {
  const CsvRows csv = read_csv(path);
  match_points(csv, face_midpoints(grid), grid.h(), path, "face");
  Eigen::VectorXd v(static_cast<Eigen::Index>(csv.rows.size()));
  for (std::size_t i = 0; i < csv.rows.size(); ++i) v(static_cast<Eigen::Index>(i)) = csv.rows[i][2];
  try {
    return datum_from_samples(grid, std::move(v), path);
  } catch (const InvalidInput& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string field_pgm(const ScalarField<double>& u) {
  const Grid& g = u.grid();
  double lo = u.size() ? u.values().minCoeff() : 0.0;
  double hi = u.size() ? u.values().maxCoeff() : 0.0;
  if (!(hi > lo)) hi = lo + 1.0;
  std::ostringstream os;
  os << "P2\n" << g.nx() << " " << g.ny() << "\n255\n";
  for (int j = g.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx(); ++i) {
      const int k = g.index(i, j);
      const int v = k < 0 ? 0 : 1 + static_cast<int>(std::lround(254.0 * (u[k] - lo) / (hi - lo)));
      os << v << (i + 1 < g.nx() ? " " : "\n");
    }
  }
  return os.str();
}

std::string mask_pgm(const Grid& g, const std::vector<bool>& mask) {
  ScalarField<double> u(std::make_shared<const Grid>(g));
  for (int k = 0; k < u.size(); ++k) u[k] = mask[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
  return field_pgm(u);
}

std::string certificates_csv(const BscReport& rep) {
  std::string s = "z0x,z0y,lower_ax,lower_ay,upper_ax,upper_ay,slack\n";
  for (const auto& c : rep.per_point)
    s += num(c.point.x()) + "," + num(c.point.y()) + "," + num(c.lower_slope.x()) + "," + num(c.lower_slope.y()) + "," +
         num(c.upper_slope.x()) + "," + num(c.upper_slope.y()) + "," + num(c.slack) + "\n";
  return s;
}

json to_json(const EnergyBreakdown& e) {
  return {{"interior", e.interior}, {"penalty", e.penalty}, {"total", e.total}, {"mode", to_string(e.mode)}};
}

json to_json(const SolveReport& r) {
  return {{"energy", to_json(r.energy)}, {"initial_energy", r.initial_energy}, {"iterations", r.iterations},
          {"converged", r.converged},    {"stagnation", r.stagnation},         {"cells", r.u.size()}};
}

json to_json(const BscReport& r) {
  return {{"Q_min", r.Q_min},
          {"K", r.K},
          {"eps_feas", r.eps_feas},
          {"points", r.per_point.size()},
          {"witness", r.witness},
          {"witness_point", r.witness >= 0 ? json{r.per_point[static_cast<std::size_t>(r.witness)].point.x(),
                                                  r.per_point[static_cast<std::size_t>(r.witness)].point.y()}
                                           : json(nullptr)}};
}

json to_json(const RefineTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"h", r.h}, {"error", r.error}, {"energy", r.energy}, {"iterations", r.iterations},
                    {"converged", r.converged}});
  return {{"rows", rows}, {"monotone", t.monotone}};
}

json to_json(const TestReport& r) {
  json m = json::object();
  for (const auto& [k, v] : r.metrics) m[k] = metric_json(v);
  json j{{"id", to_string(r.id)}, {"passed", r.passed}, {"metrics", m}, {"config", r.config}, {"runtime", r.runtime}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

json to_json(const SuiteResult& s) {
  json reports = json::array();
  for (const auto& r : s.reports) reports.push_back(to_json(r));
  return {{"reports", reports}, {"passed", s.passed}, {"total", s.total}};
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace harea
