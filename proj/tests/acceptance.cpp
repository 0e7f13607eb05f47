// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include "harea/bsc.hpp"
#include "harea/closed_forms.hpp"
#include "harea/error.hpp"
#include "harea/field.hpp"
#include "harea/harness.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace harea;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void line(int n, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %2d: %s [%s]\n", ok ? "PASS" : "FAIL", n, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string summary(const TestReport& r) {
  std::string s = to_string(r.id) + ":";
  for (const auto& [k, m] : r.metrics)
    if (m.threshold) s += " " + k + "=" + num(m.value) + (m.upper ? "<=" : ">=") + num(*m.threshold);
  s += " t=" + num(r.runtime) + "s";
  if (!r.reason.empty()) s += " (" + r.reason + ")";
  return s;
}

void criterion_adjointness() {
  const auto t0 = Clock::now();
  const GridPtr g = rasterize(DomainSpec::rectangle(Vec2(-1, -1), Vec2(1, 1)), 1.0 / 16.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    ScalarField<double> u(g);
    VectorField<double> p(g);
    for (int k = 0; k < g->size(); ++k) {
      u[k] = N(rng);
      p.values()(k, 0) = N(rng);
      p.values()(k, 1) = N(rng);
    }
    const double a = inner(gradient(u), p);
    const double b = inner(u, divergence(p));
    worst = std::max(worst, std::abs(a + b) / std::max({std::abs(a), std::abs(b), 1e-300}));
  }
  const double dt = seconds_since(t0);
  line(1, worst <= 1e-12 && dt < 1.0, "gradient/divergence adjointness on 100 random 32x32 pairs",
       "rel=" + num(worst) + " t=" + num(dt) + "s");
}

void criterion_bsc() {
  bool ok = true;
  std::string detail;

  const GridPtr gd = rasterize(DomainSpec::disk(Vec2::Zero(), 1.0), 1.0 / 32.0);
  const auto sa = bsc_samples(*gd, DomainSpec::disk(Vec2::Zero(), 1.0), closed_form::affine(Vec2(1, -2), 0.5));
  const double qa = minimal_Q(sa, *gd).Q_min;
  ok = ok && std::abs(qa - std::sqrt(5.0)) <= 1e-2;
  detail += "affine Q=" + num(qa);

  const DomainSpec sq = DomainSpec::rectangle(Vec2(0, 0), Vec2(1, 1));
  const GridPtr gs = rasterize(sq, 1.0 / 16.0);
  const auto sx = bsc_samples(*gs, sq, {"x2", [](const Vec2& z) { return z.x() * z.x(); }});
  try {
    minimal_Q(sx, *gs);
    ok = false;
    detail += "; x^2 not flagged";
  } catch (const BscViolated& e) {
    const SupportSide side = e.upper_side() ? SupportSide::upper : SupportSide::lower;
    const double q = oracle::grid_min_slope(sx, e.witness(), side, 20.0, 0.02, default_eps_feas(sx));
    ok = ok && std::isinf(q);
    detail += "; x^2 violated at sample " + std::to_string(e.witness()) + ", oracle " + (std::isinf(q) ? "agrees" : "disagrees");
  }

  const DomainSpec par = DomainSpec::parabolic();
  const GridPtr gp = rasterize(par, 1.0 / 64.0);
  const auto se = bsc_samples(*gp, par, closed_form::es1_datum());
  const BscReport r = minimal_Q(se, *gp);
  const auto& w = r.per_point[static_cast<std::size_t>(r.witness)];
  const SupportSide side = w.lower_slope.norm() >= w.upper_slope.norm() ? SupportSide::lower : SupportSide::upper;
  const double qo = oracle::grid_min_slope(se, r.witness, side, 1.5 * r.Q_min, 0.01, r.eps_feas);
  const double rel = std::abs(qo - r.Q_min) / r.Q_min;
  ok = ok && std::isfinite(r.Q_min) && rel <= 0.01;
  detail += "; es1 Q=" + num(r.Q_min) + " oracle=" + num(qo) + " rel=" + num(rel);
  line(8, ok, "bounded slope condition", detail);
}

}  // namespace

int main() {
  criterion_adjointness();

  const auto t0 = Clock::now();
  const SuiteResult suite = run_suite({kAllChecks.begin(), kAllChecks.end()});
  const double suite_time = seconds_since(t0);
  std::map<CheckId, TestReport> by_id;
  for (const auto& r : suite.reports) by_id[r.id] = r;

  auto from_checks = [&](int n, const std::string& what, std::initializer_list<CheckId> ids, double max_time) {
    bool ok = true;
    double t = 0.0;
    std::string detail;
    for (CheckId id : ids) {
      const TestReport& r = by_id.at(id);
      ok = ok && r.passed;
      t += r.runtime;
      detail += (detail.empty() ? "" : "; ") + summary(r);
    }
    line(n, ok && t < max_time, what, detail);
  };

  from_checks(2, "affine datum is recovered", {CheckId::affine_unique}, 60.0);
  from_checks(3, "calibration on the disk", {CheckId::calibration_disk}, 1e9);
  from_checks(4, "es1 on the parabolic domain", {CheckId::example_es1, CheckId::euler_residual_es1}, 120.0);
  from_checks(5, "es2 on the square", {CheckId::example_es2}, 1e9);
  from_checks(6, "submodularity and vee/wedge", {CheckId::submodularity_aniso, CheckId::vee_wedge_iso}, 1e9);
  from_checks(7, "comparison, contraction and shift equivariance",
              {CheckId::comparison, CheckId::contraction, CheckId::shift_equivariance}, 1e9);
  criterion_bsc();
  from_checks(9, "barriers and Lipschitz bound", {CheckId::barrier_sandwich, CheckId::lipschitz_bound}, 1e9);
  from_checks(10, "penalized and constrained optima agree", {CheckId::lavrentiev}, 1e9);
  from_checks(11, "restriction and translation covariance", {CheckId::restriction, CheckId::translation_covariance},
              1e9);
  line(12, suite.all_passed() && suite.total == 15 && suite_time < 900.0, "full verification suite",
       std::to_string(suite.passed) + "/" + std::to_string(suite.total) + " in " + num(suite_time) + "s");

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
