#include "harea/solver.hpp"

#include "harea/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace harea {

double gradient_norm_bound(double h) { return 8.0 / (h * h); }

std::pair<double, double> default_steps(double h) {
  const double L = std::sqrt(gradient_norm_bound(h));
  const double  unit = std::sqrt(0.98) / L;
  return {unit * h * h, unit / (h * h)};
}

void validate(const SolverConfig& cfg, double h) {
  if (cfg.max_iters <= 0) throw InvalidInput("max_iters must be positive");
  if (!(cfg.tol > 0.0)) throw InvalidInput("tol must be positive");
  if (cfg.window <= 0) throw InvalidInput("window must be positive");
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) throw InvalidInput("theta must lie in [0, 1]");
  const auto [ds, dt] = default_steps(h);
  const double sigma = cfg.step_sigma.value_or(ds);
  const double tau = cfg.step_tau.value_or(dt);
  if (!(sigma > 0.0) || !(tau > 0.0)) throw InvalidInput("step sizes must be positive");
  if (sigma * tau * gradient_norm_bound(h) > 1.0 + 1e-12)
    throw InvalidInput("step sizes violate sigma * tau * ||grad||^2 <= 1");
}

namespace {

void project_dual(Eigen::Matrix<double, Eigen::Dynamic, 2>& p, double radius, EnergyMode mode) {
  if (mode == EnergyMode::isotropic) {
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
      const double n = p.row(k).norm();
      if (n > radius) p.row(k) *= radius / n;
    }
  } else {
    p = p.cwiseMax(-radius).cwiseMin(radius);
  }
}

struct BoundaryCell {
  int cell;
  std::vector<double> data;
  double weight;  // sum of face measures
  double mean;
};

std::vector<BoundaryCell> boundary_cells(const Grid& g, const BoundaryDatum& phi) {
  std::vector<BoundaryCell> out;
  const auto& faces = g.faces();
  for (int k = 0; k < g.size(); ++k) {
    const auto& fs = g.faces_of(k);
    if (fs.empty()) continue;
    BoundaryCell b{k, {}, 0.0, 0.0};
    for (int f : fs) {
      const double v = phi.values(f);
      b.data.push_back(v);
      b.weight += faces[static_cast<std::size_t>(f)].measure;
      b.mean += faces[static_cast<std::size_t>(f)].measure * v;
    }
    b.mean /= b.weight;
    out.push_back(std::move(b));
  }
  return out;
}

void check_datum(const Grid& g, const BoundaryDatum& phi) {
  if (phi.values.size() != static_cast<Eigen::Index>(g.faces().size()))
    throw InvalidInput("datum does not match the grid's boundary faces");
}

}  // namespace

VectorField<double> prox_dual(const VectorField<double>& q, double sigma, EnergyMode mode) {
  const double h = q.grid().h();
  VectorField<double> p(q.grid_ptr(), q.values() + sigma * active_xstar_field<double>(q.grid_ptr()).values());
  project_dual(p.values(), h * h, mode);
  return p;
}

double prox_abs_sum(double v, double weight, std::vector<double> data) {
  std::sort(data.begin(), data.end());
  const int m = static_cast<int>(data.size());
  auto objective = [&](double u) {
    double s = 0.5 * (u - v) * (u - v);
    for (double d : data) s += weight * std::abs(u - d);
    return s;
  };
  double best = v;
  double best_val = std::numeric_limits<double>::infinity();
  auto consider = [&](double u) {
    const double val = objective(u);
    if (val < best_val) {
      best_val = val;
      best = u;
    }
  };
  // Smooth pieces: j data strictly below u.
  for (int j = 0; j <= m; ++j) {
    const double u = v - weight * (2.0 * j - m);
    const double lo = j == 0 ? -std::numeric_limits<double>::infinity() : data[static_cast<std::size_t>(j - 1)];
    const double hi = j == m ? std::numeric_limits<double>::infinity() : data[static_cast<std::size_t>(j)];
    if (u >= lo && u <= hi) consider(u);
  }
  for (double d : data) consider(d);
  return best;
}

Eigen::VectorXd owner_means(const Grid& g, const BoundaryDatum& phi) {
  check_datum(g, phi);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(g.size());
  for (const auto& b : boundary_cells(g, phi)) m(b.cell) = b.mean;
  return m;
}

ScalarField<double> prox_primal(const ScalarField<double>& v, double tau, const BoundaryDatum& phi,
                                BoundaryMode mode) {
  check_datum(v.grid(), phi);
  ScalarField<double> u = v;
  for (const auto& b : boundary_cells(v.grid(), phi)) {
    if (mode == BoundaryMode::constrained) {
      u[b.cell] = b.mean;
    } else {
      u[b.cell] = prox_abs_sum(v[b.cell], tau * b.weight / static_cast<double>(b.data.size()), b.data);
    }
  }
  return u;
}

SolveReport solve(const GridPtr& grid, const BoundaryDatum& phi, const SolverConfig& cfg) {
  const Grid& g = *grid;
  check_datum(g, phi);
  validate(cfg, g.h());
  const double h = g.h();
  const auto [ds, dt] = default_steps(h);
  const double sigma = cfg.step_sigma.value_or(ds);
  const double tau = cfg.step_tau.value_or(dt);
  const double radius = h * h;
  const int n = g.size();

  const Eigen::Matrix<double, Eigen::Dynamic, 2> xstar = active_xstar_field<double>(grid).values();
  const std::vector<BoundaryCell> bcells = boundary_cells(g, phi);

  const double mean_phi = phi.values.size() > 0 ? phi.values.mean() : 0.0;
  ScalarField<double> u(grid, Eigen::VectorXd::Constant(n, mean_phi));
  if (cfg.mode == BoundaryMode::constrained)
    for (const auto& b : bcells) u[b.cell] = b.mean;
  ScalarField<double> u_bar = u;
  VectorField<double> p(grid);

  auto energy_of = [&](const ScalarField<double>& w) { return penalized_energy(w, phi, cfg.energy_mode); };

  SolveReport rep;
  rep.energy = energy_of(u);
  rep.initial_energy = rep.energy.total;
  rep.u = u;
  rep.dual = p;

  std::vector<double> checkpoints{rep.energy.total};
  double best = rep.energy.total;
  Eigen::VectorXd u_old(n);
  Eigen::VectorXd div(n);
  const double inv_h = 1.0 / h;

  int it = 0;
  for (it = 1; it <= cfg.max_iters; ++it) {
    // Dual ascent: p <- prox_dual(p + sigma grad u_bar).
    auto& pv = p.values();
    for (int k = 0; k < n; ++k) {
      for (int a = 0; a < 2; ++a) {
        const Stencil& st = g.stencil(k, a);
        const double grad = st.active() ? (u_bar[st.plus] - u_bar[st.minus]) * inv_h : 0.0;
        pv(k, a) += sigma * (grad + xstar(k, a));
      }
    }
    project_dual(pv, radius, cfg.energy_mode);

    // Primal descent: u <- prox_primal(u + tau div p).
    div.setZero();
    for (int k = 0; k < n; ++k) {
      for (int a = 0; a < 2; ++a) {
        const Stencil& st = g.stencil(k, a);
        if (!st.active()) continue;
        const double w = pv(k, a) * inv_h;
        div(st.minus) += w;
        div(st.plus) -= w;
      }
    }
    u_old = u.values();
    u.values() += tau * div;
    for (const auto& b : bcells) {
      if (cfg.mode == BoundaryMode::constrained) {
        u[b.cell] = b.mean;
      } else {
        u[b.cell] = prox_abs_sum(u[b.cell], tau * b.weight / static_cast<double>(b.data.size()), b.data);
      }
    }
    u_bar.values() = u.values() + cfg.theta * (u.values() - u_old);

    if (it % cfg.window == 0) {
      const EnergyBreakdown e = energy_of(u);
      if (!std::isfinite(e.total))
        throw Divergence("divergence: non-finite energy at iteration " + std::to_string(it), it);
      if (e.total < best) {
        best = e.total;
        rep.u = u;
        rep.dual = p;
        rep.energy = e;
      }
      const double prev = checkpoints.back();
      checkpoints.push_back(e.total);
      rep.stagnation = std::abs(prev - e.total) / std::max(std::abs(e.total), 1.0);
      if (rep.stagnation <= cfg.tol) {
        rep.converged = true;
        break;
      }
    }
  }
  rep.iterations = std::min(it, cfg.max_iters);
  return rep;
}

double solver_tol_abs(double h, const BoundaryDatum& phi) {
  const double m = phi.values.size() > 0 ? phi.values.cwiseAbs().maxCoeff() : 0.0;
  return 10.0 * h * (1.0 + m);
}

double field_error(const ScalarField<double>& u, const std::function<double(const Vec2&)>& reference,
                   ErrorNorm norm) {
  const Grid& g = u.grid();
  double err = 0.0;
  double ref = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const double r = reference(g.center(k));
    const double d = std::abs(u[k] - r);
    if (norm == ErrorNorm::sup) {
      err = std::max(err, d);
    } else {
      err += d;
      ref += std::abs(r);
    }
  }
  if (norm == ErrorNorm::relative_l1) return ref > 0.0 ? err / ref : err;
  return err;
}

RefineTable refine_study(const DomainSpec& domain, const BoundaryExpr& datum,
                         const std::function<double(const Vec2&)>& reference, const std::vector<double>& hs,
                         const SolverConfig& cfg, ErrorNorm norm) {
  RefineTable t;
  for (double h : hs) {
    const GridPtr g = rasterize(domain, h);
    const BoundaryDatum phi = sample_datum(*g, datum);
    const SolveReport r = solve(g, phi, cfg);
    t.rows.push_back({h, field_error(r.u, reference, norm), r.energy.total, r.iterations, r.converged});
  }
  t.monotone = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    if (!(t.rows[i].error < t.rows[i - 1].error)) t.monotone = false;
  return t;
}

}  // namespace harea
