// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Reference values (closed forms, curvature-based predictions, Gram volumes,
// great circles, hyperbolic Jacobi fields) are computed here from first
// principles and only compared against the library.
#include "bp/bp_jacobian.hpp"
#include "bp/error.hpp"
#include "bp/geodesic.hpp"
#include "bp/lemma_checks.hpp"
#include "bp/manifold.hpp"
#include "bp/manifold_io.hpp"
#include "bp/monte_carlo.hpp"
#include "bp/oracle.hpp"
#include "bp/sampling.hpp"
#include "bp/series_fit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using bp::BPConfiguration;
using bp::BPMode;
using bp::ManifoldSpec;
using bp::Vec;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

ManifoldSpec bundled(const std::string& name) { return bp::load_manifold(std::string(BP_DATA_DIR) + "/" + name); }

struct Named {
  std::string name;
  ManifoldSpec m;
};

// The non-constant-curvature pair used wherever a custom metric is asked for.
std::vector<Named> custom_set() { return {{"torus", bundled("custom_torus.json")}, {"custom3d", bundled("custom3d.json")}}; }

std::vector<Named> curved_set() {
  std::vector<Named> out{{"S2", ManifoldSpec::sphere(2, 1.0)},
                         {"S3", ManifoldSpec::sphere(3, 1.0)},
                         {"H2", ManifoldSpec::hyperbolic(2, 1.0)},
                         {"H3", ManifoldSpec::hyperbolic(3, 1.0)}};
  for (auto& c : custom_set()) out.push_back(c);
  return out;
}

Vec chart_center(const ManifoldSpec& m) {
  const bp::ChartDomain& d = m.domain();
  if (d.type == bp::ChartDomain::Type::Box) return 0.5 * (d.lower + d.upper);
  return Vec::Zero(m.dim());
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// m!·(volume of the simplex on the given tangent vectors) = √det Gram of edge vectors.
double scaled_volume(const Eigen::MatrixXd& g, const std::vector<Vec>& pts) {
  const int m = static_cast<int>(pts.size()) - 1;
  Eigen::MatrixXd G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Eigen::VectorXd a = pts[i + 1] - pts[0], b = pts[j + 1] - pts[0];
      G(i, j) = a.dot(g * b);
    }
  return std::sqrt(std::max(G.determinant(), 0.0));
}

Eigen::MatrixXd metric(const ManifoldSpec& m, const Vec& z) { return bp::metric_at(m, bp::ChartPoint{z}); }

// Full-mode closed form n!Δ s^{n²−1} with s = r, sin(kr)/k, sinh(kr)/k.
double closed_form_reference(bp::ManifoldKind kind, double k, int n, double r, double scaled_vol) {
  double s = r;
  if (kind == bp::ManifoldKind::Sphere) s = std::sin(k * r) / k;
  if (kind == bp::ManifoldKind::Hyperbolic) s = std::sinh(k * r) / k;
  return scaled_vol * std::pow(s, n * n - 1);
}

std::vector<BPConfiguration> sample_configs(const ManifoldSpec& m, BPMode mode, int count, std::uint64_t seed,
                                            bp::RandomConfigOptions ro = {}) {
  if (ro.z_center.size() == 0) ro.z_center = chart_center(m);
  std::vector<BPConfiguration> out;
  for (int t = 0; t < count; ++t) {
    bp::Rng rng(seed, static_cast<std::uint64_t>(mode), static_cast<std::uint64_t>(t));
    out.push_back(bp::random_configuration(m, mode, rng, ro));
  }
  return out;
}

bp::FitResult fit_mode(const ManifoldSpec& m, BPConfiguration cfg, int leading) {
  const std::vector<double> radii = bp::log_grid(1e-3, 1e-1, 25);
  std::vector<double> vals;
  for (double r : radii) {
    cfg.r = r;
    vals.push_back(bp::evaluate_phi(m, cfg).value);
  }
  bp::FitOptions fo;
  fo.exponents = {0, 2, 4};
  return bp::series_fit(radii, vals, leading, fo);
}

// ---------------------------------------------------------------------------

bool closed_forms(std::ostream& log) {
  double worst_lib = 0.0, worst_ref = 0.0, slowest = 0.0;
  std::string slowest_name;
  int evaluations = 0;
  for (auto kind : {bp::ManifoldKind::Sphere, bp::ManifoldKind::Hyperbolic})
    for (int n : {2, 3})
      for (double k : {0.5, 1.0, 2.0}) {
        const auto t0 = Clock::now();
        const ManifoldSpec m = kind == bp::ManifoldKind::Sphere ? ManifoldSpec::sphere(n, k) : ManifoldSpec::hyperbolic(n, k);
        bp::RandomConfigOptions ro;
        ro.z_radius = 0.15 / k;
        for (const BPConfiguration& base : sample_configs(m, BPMode::Full, 4, 11, ro)) {
          const double vol = scaled_volume(metric(m, base.z.coords), base.directions);
          for (int j = 0; j < 12; ++j) {
            const double kr = 0.05 + (1.2 - 0.05) * j / 11.0;
            BPConfiguration cfg = base;
            cfg.r = kr / k;
            const double value = bp::jacobian_phi_n(m, cfg);
            const double lib = bp::closed_form_jacobian(kind, k, n, cfg.r, vol / factorial(n));
            worst_lib = std::max(worst_lib, rel(value, lib));
            worst_ref = std::max(worst_ref, rel(value, closed_form_reference(kind, k, n, cfg.r, vol)));
            ++evaluations;
          }
        }
        const double dt = seconds_since(t0);
        if (dt > slowest) {
          slowest = dt;
          slowest_name = std::string(kind == bp::ManifoldKind::Sphere ? "S" : "H") + std::to_string(n) + "_k" +
                         std::to_string(k).substr(0, 3);
        }
      }
  log << evaluations << " evaluations, max rel vs closed_form_jacobian " << worst_lib << ", vs independent form "
      << worst_ref << " (tol 1e-7); slowest manifold " << slowest_name << " " << slowest << " s (limit 10 s)";
  return worst_lib <= 1e-7 && worst_ref <= 1e-7 && slowest < 10.0;
}

bool euclidean_exactness(std::ostream& log) {
  double worst = 0.0;
  for (int n : {2, 3}) {
    const ManifoldSpec m = ManifoldSpec::euclidean(n);
    bp::Rng rr(5, 0x72, static_cast<std::uint64_t>(n));
    for (BPConfiguration cfg : sample_configs(m, BPMode::Full, 100, 21)) {
      cfg.r = std::exp(rr.uniform(std::log(0.01), std::log(20.0)));
      const double expect = scaled_volume(Eigen::MatrixXd::Identity(n, n), cfg.directions) * std::pow(cfg.r, n * n - 1);
      worst = std::max(worst, rel(bp::jacobian_phi_n(m, cfg), expect));
    }
  }
  log << "200 configurations (100 per n), r in [0.01, 20], max rel " << worst << " (tol 1e-9)";
  return worst <= 1e-9;
}

// Configurations for the small-r expansions: one symmetric set at the chart
// center and two random ones away from it.
std::vector<BPConfiguration> expansion_configs(const ManifoldSpec& m, BPMode mode) {
  const Vec c = chart_center(m);
  BPConfiguration sym{mode, 0.0, {c}, bp::directions_at(m, {c}, bp::preset_directions("equilateral", mode, m.dim()))};
  std::vector<BPConfiguration> out{sym};
  bp::RandomConfigOptions ro;
  ro.z_radius = 0.4;
  ro.min_simplex_volume = 0.05;
  for (auto& cfg : sample_configs(m, mode, 2, 33, ro)) out.push_back(cfg);
  return out;
}

bool full_expansion(std::ostream& log) {
  const auto t0 = Clock::now();
  double worst_lead = 0.0, worst_corr = 0.0;
  int fits = 0;
  for (const Named& nm : curved_set()) {
    const int n = nm.m.dim();
    for (const BPConfiguration& cfg : expansion_configs(nm.m, BPMode::Full)) {
      const double lead = scaled_volume(metric(nm.m, cfg.z.coords), cfg.directions);
      double ric = 0.0;
      for (const Vec& u : cfg.directions) ric += bp::ricci_curvature(nm.m, cfg.z, u);
      const bp::FitResult f = fit_mode(nm.m, cfg, n * n - 1);
      worst_lead = std::max(worst_lead, rel(f.coefficients[0], lead));
      worst_corr = std::max(worst_corr, rel(f.coefficients[1], -lead * ric / 6.0));
      ++fits;
    }
  }
  const double dt = seconds_since(t0);
  log << fits << " fits on S2 S3 H2 H3 torus custom3d, max rel leading " << worst_lead << " (tol 1e-3), correction "
      << worst_corr << " (tol 1e-2); " << dt << " s (limit 60 s)";
  return worst_lead <= 1e-3 && worst_corr <= 1e-2 && dt < 60.0;
}

bool antipodal_expansion(std::ostream& log) {
  double worst_lead = 0.0, worst_corr = 0.0;
  int fits = 0;
  for (const Named& nm : curved_set()) {
    const int n = nm.m.dim();
    for (const BPConfiguration& cfg : expansion_configs(nm.m, BPMode::Antipodal)) {
      const double lead = std::pow(2.0, n);
      const double corr = -lead * (2.0 / 3.0) * bp::ricci_curvature(nm.m, cfg.z, cfg.directions[0]);
      const bp::FitResult f = fit_mode(nm.m, cfg, n - 1);
      worst_lead = std::max(worst_lead, rel(f.coefficients[0], lead));
      worst_corr = std::max(worst_corr, rel(f.coefficients[1], corr));
      ++fits;
    }
  }
  log << fits << " fits, max rel leading " << worst_lead << ", correction " << worst_corr << " (tol 1e-2)";
  return worst_lead <= 1e-2 && worst_corr <= 1e-2;
}

// Orthonormal basis of v⊥ by Gram–Schmidt of the coordinate axes.
std::vector<Vec> complement_basis(const Eigen::MatrixXd& g, const Vec& v) {
  const int n = static_cast<int>(v.size());
  std::vector<Vec> basis{v};
  for (int a = 0; a < n && static_cast<int>(basis.size()) < n; ++a) {
    Vec w = Vec::Unit(n, a);
    for (const Vec& b : basis) w -= (b.dot(g * w)) * b;
    const double len = std::sqrt(w.dot(g * w));
    if (len > 1e-6) basis.push_back(w / len);
  }
  basis.erase(basis.begin());
  return basis;
}

struct HyperplaneReference {
  double lead = 0.0;
  double printed = 0.0;
  double derived = 0.0;
};

HyperplaneReference hyperplane_reference(const ManifoldSpec& m, const BPConfiguration& cfg) {
  const int n = m.dim();
  const Eigen::MatrixXd g = metric(m, cfg.z.coords);
  const Vec& v = cfg.directions.back();
  const std::vector<Vec> us(cfg.directions.begin(), cfg.directions.end() - 1);
  const std::vector<Vec> basis = complement_basis(g, v);
  Eigen::MatrixXd D(n, n), Kp(n, n), Kd(n, n);
  double ric_v = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd c(n - 1);
    for (int a = 0; a < n - 1; ++a) c[a] = basis[a].dot(g * us[i]);
    const double K = bp::sectional_curvature(m, cfg.z, us[i], v);
    ric_v += bp::ricci_curvature(m, cfg.z, us[i]) - K;
    D(i, 0) = 1.0;
    D.row(i).tail(n - 1) = -c.transpose();
    Kp(i, 0) = Kd(i, 0) = K / 2.0;
    Kp.row(i).tail(n - 1) = c.transpose() * (K / 6.0);
    Kd.row(i).tail(n - 1) = -c.transpose() * (K / 6.0);
  }
  HyperplaneReference out;
  const double gram = std::pow(scaled_volume(g, us), 2);
  out.lead = gram;
  out.printed = -gram * (ric_v + D.lu().solve(Kp).trace());
  out.derived = -gram * (ric_v / 6.0 + D.lu().solve(Kd).trace());
  return out;
}

bool hyperplane_expansion(std::ostream& log) {
  double worst_lead = 0.0, worst_derived = 0.0, best_printed = 1e300;
  int fits = 0, only_printed = 0, only_derived = 0, ambiguous = 0;
  const std::vector<Named> set{{"S3", ManifoldSpec::sphere(3, 1.0)},
                               {"H3", ManifoldSpec::hyperbolic(3, 1.0)},
                               {"custom3d", bundled("custom3d.json")}};
  for (const Named& nm : set) {
    const int n = nm.m.dim();
    for (const BPConfiguration& cfg : expansion_configs(nm.m, BPMode::Hyperplane)) {
      const HyperplaneReference ref = hyperplane_reference(nm.m, cfg);
      const bp::FitResult f = fit_mode(nm.m, cfg, n * (n - 1) - 1);
      worst_lead = std::max(worst_lead, rel(f.coefficients[0], ref.lead));
      const double ep = rel(f.coefficients[1], ref.printed), ed = rel(f.coefficients[1], ref.derived);
      worst_derived = std::max(worst_derived, ed);
      best_printed = std::min(best_printed, ep);
      const bool p = ep <= 0.02, d = ed <= 0.02;
      only_printed += p && !d;
      only_derived += d && !p;
      ambiguous += p == d;
      ++fits;
    }
  }
  const char* matched = only_derived == fits ? "derived" : only_printed == fits ? "printed" : "neither consistently";
  log << fits << " fits (n=3), max rel leading " << worst_lead << " (tol 5e-3); correction matches " << matched
      << " variant: derived rel err <= " << worst_derived << ", printed rel err >= " << best_printed
      << " (tol 2e-2, ambiguous fits " << ambiguous << ")";
  return worst_lead <= 5e-3 && ambiguous == 0 && (only_derived == fits || only_printed == fits);
}

bool oracle_equivalence(std::ostream& log) {
  const auto t0 = Clock::now();
  std::vector<Named> set{{"E2", ManifoldSpec::euclidean(2)}, {"E3", ManifoldSpec::euclidean(3)}};
  for (auto& c : curved_set()) set.push_back(c);
  bp::OracleConfig oc;
  oc.integrator.steps_per_unit = 64.0;
  double worst = 0.0;
  std::string worst_where;
  int compared = 0, failed = 0;
  for (const Named& nm : set)
    for (BPMode mode : {BPMode::Full, BPMode::Antipodal, BPMode::Hyperplane})
      for (const BPConfiguration& cfg : sample_configs(nm.m, mode, 100, 77)) {
        try {
          const double e = rel(bp::evaluate_phi(nm.m, cfg).value, bp::fd_jacobian_oracle(nm.m, cfg, oc));
          if (e > worst) {
            worst = e;
            worst_where = nm.name + "/" + std::string(bp::to_string(mode));
          }
          failed += !(e <= 1e-4);
        } catch (const std::exception& ex) {
          ++failed;
          if (failed == 1) log << "[first error: " << ex.what() << "] ";
        }
        ++compared;
      }
  const double dt = seconds_since(t0);
  log << compared << " comparisons on E2 E3 S2 S3 H2 H3 torus custom3d x 3 modes, " << failed
      << " over tolerance, max rel " << worst << " (" << worst_where << ", tol 1e-4); " << dt << " s (limit 300 s)";
  return failed == 0 && dt < 300.0;
}

std::vector<bp::LemmaBlock> blocks_of(BPMode mode) {
  using B = bp::LemmaBlock;
  switch (mode) {
    case BPMode::Full: return {B::B_diag, B::B_off};
    case BPMode::Antipodal: return {B::B_diag, B::B_off, B::A_diag, B::A_off};
    case BPMode::Hyperplane: return {B::B_diag, B::B_off, B::C_lastrow, B::C_other, B::A_col_last, B::A_col_other};
  }
  return {};
}

bool lemma_checks(std::ostream& log) {
  int reports = 0, failed_reports = 0, entries = 0;
  double worst = 0.0;
  std::string worst_where;
  const std::vector<Named> set{{"S3", ManifoldSpec::sphere(3, 1.0)},
                               {"H3", ManifoldSpec::hyperbolic(3, 1.0)},
                               {"torus", bundled("custom_torus.json")},
                               {"custom3d", bundled("custom3d.json")}};
  for (const Named& nm : set)
    for (BPMode mode : {BPMode::Full, BPMode::Antipodal, BPMode::Hyperplane})
      for (const BPConfiguration& cfg : expansion_configs(nm.m, mode))
        for (bp::LemmaBlock b : blocks_of(mode)) {
          if (nm.m.dim() == 2 && mode == BPMode::Hyperplane &&
              (b == bp::LemmaBlock::B_diag || b == bp::LemmaBlock::B_off || b == bp::LemmaBlock::C_other ||
               b == bp::LemmaBlock::A_col_other))
            continue;  // these blocks are empty for n = 2
          const bp::CoefficientReport rep = bp::coefficient_report(nm.m, cfg, b);
          ++reports;
          failed_reports += !rep.pass;
          for (const bp::EntryFit& e : rep.entries) {
            ++entries;
            if (e.worst > worst) {
              worst = e.worst;
              worst_where = nm.name + "/" + std::string(bp::to_string(mode)) + "/" + std::string(bp::to_string(b));
            }
          }
        }

  // det(Δ − r²K) on random pairs of sizes 2..4.
  bp::Rng rng(2024, 0x646574);
  int detg_failed = 0;
  double detg_worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int size = 2 + t % 3;
    Eigen::MatrixXd D(size, size), K(size, size);
    do {
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) D(i, j) = rng.normal();
    } while (std::abs(D.determinant()) < 0.1);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) K(i, j) = rng.normal();
    const bp::DetGCheck c = bp::detg_expansion_check(D, K, bp::log_grid(1e-3, 1e-1, 25), 1e-9);
    detg_failed += !c.pass;
    detg_worst = std::max(detg_worst, std::abs(c.residual_coeff) / c.scale);
  }
  log << reports << " coefficient reports (" << entries << " entries), " << failed_reports
      << " failing, worst normalized error " << worst << " at " << worst_where
      << " (pass <= 1: 2% on predictions, 1e-3 on vanishing orders); detg 50 pairs, " << detg_failed
      << " failing, max residual/scale " << detg_worst << " (tol 1e-9)";
  return failed_reports == 0 && detg_failed == 0;
}

bool measure_equality(std::ostream& log) {
  const auto t0 = Clock::now();
  bool ok = true;
  for (const Named& nm : std::vector<Named>{{"S2", ManifoldSpec::sphere(2, 1.0)}, {"H2", ManifoldSpec::hyperbolic(2, 1.0)}}) {
    bp::MCConfig cfg;
    cfg.samples = 100'000;
    cfg.seed = 20240611;
    cfg.workers = bp::worker_limit(4);
    const bp::MCResult r = bp::mc_measure_equality(nm.m, cfg);
    const bool pass = r.z_score <= 3.0;
    ok = ok && pass;
    log << nm.name << " lhs " << r.lhs << " rhs " << r.rhs << " z " << r.z_score << "; ";
  }

  // Same seed, different worker counts and a repeat: bitwise identical sums.
  const ManifoldSpec s2 = ManifoldSpec::sphere(2, 1.0);
  bp::MCConfig small;
  small.samples = 10'000;
  small.seed = 99;
  small.workers = 1;
  const bp::MCResult a = bp::mc_measure_equality(s2, small);
  const bp::MCResult b = bp::mc_measure_equality(s2, small);
  small.workers = 3;
  const bp::MCResult c = bp::mc_measure_equality(s2, small);
  const bool deterministic = a.lhs == b.lhs && a.rhs == b.rhs && a.lhs == c.lhs && a.rhs == c.rhs;
  const double dt = seconds_since(t0);
  log << "N=1e5 per side (z tol 3); repeat and 1 vs 3 workers identical: " << (deterministic ? "yes" : "no") << "; "
      << dt << " s (limit 120 s)";
  return ok && deterministic && dt < 120.0;
}

// Unit sphere, start at the chart origin with chart velocity w (|w| = 1/2):
// the great circle is x(t) = 2w tan(t/2).
bool flow_quality(std::ostream& log) {
  const ManifoldSpec s2 = ManifoldSpec::sphere(2, 1.0);
  const Vec z = Vec::Zero(2);
  Vec w(2);
  w << 0.3, 0.4;
  const double T = 1.5;
  const Vec exact = 2.0 * w * std::tan(T / 2.0);
  auto error_with = [&](int steps) {
    bp::IntegratorConfig ic;
    ic.fixed_steps = steps;
    ic.tolerance = 0.0;
    return (bp::integrate_flow(s2, z, w, T, {}, {}, ic).end.position.coords - exact).norm();
  };
  const double ratio = error_with(8) / error_with(16);
  const double ratio_fine = error_with(16) / error_with(32);

  // Orthonormal frames transported along geodesics of length L.
  double drift = 0.0;
  for (const Named& nm : curved_set()) {
    const int n = nm.m.dim();
    const Vec z0 = chart_center(nm.m);
    const Eigen::MatrixXd g0 = metric(nm.m, z0);
    Vec u = Vec::Ones(n);
    u /= std::sqrt(u.dot(g0 * u));
    const Eigen::LLT<Eigen::MatrixXd> llt(g0);
    const Eigen::MatrixXd E0 = llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));  // E0ᵀ g E0 = I
    std::vector<Vec> frame;
    for (int a = 0; a < n; ++a) frame.push_back(E0.col(a));
    const double L = nm.m.kind() == bp::ManifoldKind::Hyperbolic ? 2.5 : 1.2;
    const bp::FlowResult fr = bp::integrate_flow(nm.m, z0, u, L, frame, {});
    const Eigen::MatrixXd g1 = metric(nm.m, fr.end.position.coords);
    Eigen::MatrixXd P(n, n);
    for (int a = 0; a < n; ++a) P.col(a) = fr.transported[a];
    drift = std::max(drift, (P.transpose() * g1 * P - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() / L);
  }

  // Hyperbolic Jacobi field with J(0) = 0, J'(0) = w ⊥ u from the chart origin:
  // J(t) = 2w tanh(kt/2)/k in chart components, |J| = sinh(kt)/k.
  double jac = 0.0;
  for (double k : {0.5, 1.0, 2.0}) {
    const ManifoldSpec h = ManifoldSpec::hyperbolic(3, k);
    Vec u(3), ww(3);
    u << 0.5, 0.0, 0.0;
    ww << 0.0, 0.3, 0.4;
    for (double kt : {0.5, 1.5, 2.5}) {
      const double t = kt / k;
      const bp::JacobiState js = bp::jacobi_field(h, bp::GeodesicState{{Vec::Zero(3)}, u, 0.0}, Vec::Zero(3), ww, t);
      const Vec expect = 2.0 * ww * std::tanh(kt / 2.0) / k;
      jac = std::max(jac, (js.value.components - expect).norm() / expect.norm());
      const double len = std::sqrt(js.value.components.dot(metric(h, js.value.base.coords) * js.value.components));
      jac = std::max(jac, rel(len, std::sinh(kt) / k));
    }
  }
  log << "RK4 error ratio " << ratio << " (8->16 steps), " << ratio_fine << " (16->32) in [12, 20]; frame drift "
      << drift << " per unit length (tol 1e-8); hyperbolic Jacobi max rel " << jac << " (tol 1e-8)";
  return ratio >= 12 && ratio <= 20 && drift <= 1e-8 && jac <= 1e-8;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::ostream&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "constant-curvature closed forms", closed_forms},
      {2, "Euclidean exactness", euclidean_exactness},
      {3, "full-mode small-r expansion", full_expansion},
      {4, "antipodal small-r expansion", antipodal_expansion},
      {5, "hyperplane small-r expansion", hyperplane_expansion},
      {6, "finite-difference oracle equivalence", oracle_equivalence},
      {7, "block-level coefficient checks", lemma_checks},
      {8, "Monte Carlo measure equality", measure_equality},
      {9, "geodesic flow quality gates", flow_quality},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    std::ostringstream detail;
    bool pass = false;
    const auto t0 = Clock::now();
    try {
      pass = c.run(detail);
    } catch (const std::exception& e) {
      detail << " exception: " << e.what();
    }
    failures += !pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, detail.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
