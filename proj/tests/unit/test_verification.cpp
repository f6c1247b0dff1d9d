#include "bp/bp_jacobian.hpp"
#include "bp/error.hpp"
#include "bp/lemma_checks.hpp"
#include "bp/model_spaces.hpp"
#include "bp/monte_carlo.hpp"
#include "bp/oracle.hpp"
#include "bp/sampling.hpp"
#include "bp/series_fit.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace bp;

namespace {

ManifoldSpec custom3d() {
  const std::vector<std::string> e{"1 + 0.2*x2^2", "0.1*sin(x3)", "0", "exp(0.3*x1)", "0", "1 + 0.1*x1^2 + 0.05*x2*x3"};
  return ManifoldSpec::custom(3, e, ChartDomain::box(Vec::Constant(3, -1.5), Vec::Constant(3, 1.5)));
}

ManifoldSpec torus() {
  const std::vector<std::string> e{"(2 + cos(x2))^2", "0", "1"};
  return ManifoldSpec::custom(2, e, ChartDomain::box(Vec::Constant(2, -10.0), Vec::Constant(2, 10.0)));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

BPConfiguration config(const ManifoldSpec& m, BPMode mode, const Vec& z, const std::string& preset, double r) {
  BPConfiguration c;
  c.mode = mode;
  c.r = r;
  c.z = {z};
  c.directions = directions_at(m, c.z, preset_directions(preset, mode, m.dim()));
  return c;
}

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::Unsupported;
}

}  // namespace

TEST_CASE("series fit: synthetic data") {
  const std::vector<double> r = log_grid(1e-3, 1e-1, 20);
  std::vector<double> y;
  for (double x : r) y.push_back(1.7 * std::pow(x, 3) - 0.4 * std::pow(x, 5));
  const FitResult f = series_fit(r, y, 3);
  CHECK(std::abs(f.coefficients[0] - 1.7) <= 1e-10);
  CHECK(std::abs(f.coefficients[1] + 0.4) <= 1e-10);
  CHECK(f.residual_norm <= 1e-12);
  CHECK(f.samples == 20);

  CHECK(code_of([&] { series_fit(std::vector<double>(r.begin(), r.begin() + 4), std::vector<double>(4, 1.0), 0); }) ==
        Errc::InvalidFitInput);
  const std::vector<double> narrow = log_grid(1e-2, 5e-2, 10);
  CHECK(code_of([&] { series_fit(narrow, std::vector<double>(10, 1.0), 0); }) == Errc::InvalidFitInput);
  FitOptions dup;
  dup.exponents = {0, 2, 2};
  CHECK(code_of([&] { series_fit(r, y, 3, dup); }) == Errc::IllConditionedFit);
}

TEST_CASE("series fit: closed-form data reproduces the expansion") {
  // Sphere k = 1, n = 2: 2Δ sin(r)³ = 2Δ (r³ − r⁵/2 + ...), i.e. ΣRic/6 = 3/6.
  const double delta = 3 * std::sqrt(3.0) / 4;
  const std::vector<double> r = log_grid(1e-3, 1e-1, 25);
  std::vector<double> y;
  for (double x : r) y.push_back(closed_form_jacobian(ManifoldKind::Sphere, 1.0, 2, x, delta));
  FitOptions fo;
  fo.exponents = {0, 2, 4};
  const FitResult f = series_fit(r, y, 3, fo);
  CHECK(rel(f.coefficients[0], 2 * delta) <= 1e-3);
  CHECK(rel(f.coefficients[1], -2 * delta * 0.5) <= 1e-3);
}

TEST_CASE("oracle: examples") {
  const ManifoldSpec e2 = ManifoldSpec::euclidean(2);
  const BPConfiguration c = config(e2, BPMode::Full, Vec::Zero(2), "random:8", 0.4);
  const double delta = evaluate_phi(e2, c).simplex_volume;
  CHECK(rel(fd_jacobian_oracle(e2, c), 2 * delta * std::pow(0.4, 3)) <= 1e-6);

  for (int n : {2, 3}) {
    const ManifoldSpec h = ManifoldSpec::hyperbolic(n, 1.0);
    const BPConfiguration ch = config(h, BPMode::Full, Vec::Constant(n, 0.1), "random:9", 0.5);
    const double d = evaluate_phi(h, ch).simplex_volume;
    CHECK(rel(fd_jacobian_oracle(h, ch), closed_form_jacobian(ManifoldKind::Hyperbolic, 1.0, n, 0.5, d)) <= 1e-5);
  }

  const ManifoldSpec s3 = ManifoldSpec::sphere(3, 1.0);
  const BPConfiguration hp = config(s3, BPMode::Hyperplane, Vec::Constant(3, 0.1), "random:10", 0.6);
  CHECK(rel(fd_jacobian_oracle(s3, hp), jacobian_phi_nm1(s3, hp)) <= 1e-5);

  Rng rng(10);
  for (const ManifoldSpec& m : {custom3d(), torus()}) {
    for (BPMode mode : {BPMode::Full, BPMode::Antipodal, BPMode::Hyperplane}) {
      const BPConfiguration cc = random_configuration(m, mode, rng);
      CHECK(rel(fd_jacobian_oracle(m, cc), evaluate_phi(m, cc).value) <= 1e-4);
    }
  }
}

TEST_CASE("oracle: second-order convergence and step validation") {
  const ManifoldSpec m = custom3d();
  const BPConfiguration c = config(m, BPMode::Full, Vec::Constant(3, 0.2), "random:11", 0.5);
  OracleConfig coarse, fine;
  coarse.fd_step = 2e-4;
  fine.fd_step = 1e-4;
  const double a = fd_jacobian_oracle(m, c, coarse), b = fd_jacobian_oracle(m, c, fine);
  // o(h) means the change is far below the step itself.
  CHECK(rel(a, b) <= 1e-2 * fine.fd_step);

  OracleConfig bad;
  bad.fd_step = 0.1;
  CHECK(code_of([&] { fd_jacobian_oracle(m, c, bad); }) == Errc::InvalidConfiguration);
  bad.fd_step = 1e-9;
  CHECK(code_of([&] { fd_jacobian_oracle(m, c, bad); }) == Errc::InvalidConfiguration);
}

TEST_CASE("oracle: angle charts") {
  Rng rng(12);
  for (int d : {2, 3, 4}) {
    Vec th(d - 1);
    for (int i = 0; i < d - 1; ++i) th[i] = rng.uniform(0.3, 2.8);
    CHECK(std::abs(angle_map(th, d).norm() - 1.0) <= 1e-14);
  }
  // The density is the area element √det(JᵀJ) of the map.
  for (int d : {2, 3, 4, 5}) {
    Vec th(d - 1);
    for (int i = 0; i < d - 1; ++i) th[i] = rng.uniform(0.3, 2.8);
    MatX J(d, d - 1);
    const double h = 1e-6;
    for (int i = 0; i < d - 1; ++i) {
      Vec a = th, b = th;
      a[i] += h;
      b[i] -= h;
      J.col(i) = (angle_map(a, d) - angle_map(b, d)) / (2 * h);
    }
    CHECK(angle_density(th, d) == doctest::Approx(std::sqrt((J.transpose() * J).determinant())).epsilon(1e-8));
  }
}

TEST_CASE("det G expansion check") {
  const std::vector<double> radii = log_grid(1e-3, 1e-1, 25);
  const MatX I = MatX::Identity(2, 2);
  CHECK(detg_expansion_check(I, MatX::Zero(2, 2), radii).residual_coeff == 0.0);
  MatX K = MatX::Zero(2, 2);
  K(0, 0) = 0.7;
  K(1, 1) = -1.3;
  const DetGCheck d = detg_expansion_check(I, K, radii);
  CHECK(d.pass);
  CHECK(std::abs(d.residual_coeff) <= 1e-10 * d.scale);

  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    MatX D(4, 4), Kr(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        D(i, j) = rng.normal();
        Kr(i, j) = rng.normal();
      }
    const DetGCheck c = detg_expansion_check(D, Kr, radii);
    CHECK(c.pass);
    CHECK(std::abs(c.residual_coeff) <= 1e-9 * std::abs(D.determinant()) * Kr.norm());
  }
  MatX S = MatX::Ones(3, 3);
  CHECK(code_of([&] { detg_expansion_check(S, MatX::Identity(3, 3), radii); }) == Errc::SingularDelta);
}

TEST_CASE("coefficient reports") {
  const ManifoldSpec e3 = ManifoldSpec::euclidean(3);
  for (BPMode mode : {BPMode::Full, BPMode::Antipodal, BPMode::Hyperplane}) {
    const BPConfiguration c = config(e3, mode, Vec::Zero(3), "random:14", 0.1);
    const LemmaBlock b = mode == BPMode::Hyperplane ? LemmaBlock::C_lastrow : LemmaBlock::B_diag;
    const CoefficientReport rep = coefficient_report(e3, c, b);
    CHECK(rep.pass);
    for (const EntryFit& f : rep.entries) CHECK(std::abs(f.fit.coefficients[f.checked.back()]) <= 1e-6);
  }

  for (double k : {0.5, 1.0, 2.0}) {
    const ManifoldSpec h = ManifoldSpec::hyperbolic(3, k);
    const BPConfiguration c = config(h, BPMode::Full, Vec::Zero(3), "random:15", 0.1);
    const CoefficientReport rep = coefficient_report(h, c, LemmaBlock::B_diag);
    CHECK(rep.pass);
    for (const EntryFit& f : rep.entries) {
      // r − (K/6) r³ with K = −k².
      const double cubic = f.fit.coefficients[static_cast<std::size_t>(f.checked[1])];
      CHECK(rel(cubic, k * k / 6) <= 0.01);
    }
  }

  const ManifoldSpec m = custom3d();
  const BPConfiguration hc = config(m, BPMode::Hyperplane, Vec::Constant(3, 0.1), "random:16", 0.1);
  for (LemmaBlock b : {LemmaBlock::C_lastrow, LemmaBlock::C_other, LemmaBlock::A_col_last, LemmaBlock::A_col_other,
                       LemmaBlock::B_diag, LemmaBlock::B_off})
    CHECK(coefficient_report(m, hc, b).pass);
  CHECK(code_of([&] { coefficient_report(m, hc, LemmaBlock::A_diag); }) == Errc::InvalidConfiguration);
  const BPConfiguration fc = config(m, BPMode::Full, Vec::Constant(3, 0.1), "random:16", 0.1);
  CHECK(code_of([&] { coefficient_report(m, fc, LemmaBlock::C_lastrow); }) == Errc::InvalidConfiguration);
}

TEST_CASE("model spaces: circumscribed balls of integrated configurations") {
  Rng rng(17);
  for (const ManifoldSpec& m : {ManifoldSpec::euclidean(3), ManifoldSpec::sphere(3, 1.0), ManifoldSpec::hyperbolic(2, 1.0),
                                ManifoldSpec::sphere(2, 2.0), ManifoldSpec::hyperbolic(3, 0.5)}) {
    const double k = m.kind() == ManifoldKind::Euclidean ? 1.0 : m.k();
    RandomConfigOptions ro;
    ro.z_radius = 0.2 / k;
    ro.r_max = 0.8 / k;
    ro.r_min = 0.1 / k;
    for (BPMode mode : {BPMode::Full, BPMode::Antipodal, BPMode::Hyperplane}) {
      const BPConfiguration c = random_configuration(m, mode, rng, ro);
      const JacobianEvaluation ev = evaluate_phi(m, c);
      const auto ball = circumscribed_ball(m, ev.points);
      REQUIRE(ball.has_value());
      CHECK((ball->center - c.z.coords).norm() <= 1e-8);
      CHECK(std::abs(ball->radius - c.r) <= 1e-8);
      for (const Vec& x : ev.points) CHECK(std::abs(model_distance(m, c.z.coords, x) - c.r) <= 1e-8);
    }
  }
  const ManifoldSpec s = ManifoldSpec::sphere(2, 2.0);
  const Vec x = (Vec(2) << 0.3, 0.1).finished();
  CHECK(model_distance(s, Vec::Zero(2), x) == doctest::Approx(2 * std::atan(2 * x.norm()) / 2).epsilon(1e-12));
  CHECK(chart_radius(ManifoldSpec::hyperbolic(2, 1.0), 1.0) == doctest::Approx(std::tanh(0.5)).epsilon(1e-14));
}

TEST_CASE("monte carlo: determinism and guards") {
  const ManifoldSpec s = ManifoldSpec::sphere(2, 1.0);
  MCConfig cfg;
  cfg.samples = 10000;
  cfg.seed = 42;
  cfg.mode = BPMode::Antipodal;
  const MCResult a = mc_measure_equality(s, cfg);
  cfg.workers = 3;
  const MCResult b = mc_measure_equality(s, cfg);
  CHECK(a.lhs == b.lhs);
  CHECK(a.rhs == b.rhs);
  CHECK(a.se_lhs == b.se_lhs);
  CHECK(a.se_rhs == b.se_rhs);
  CHECK(a.z_score <= 4.0);
  cfg.seed = 43;
  CHECK(mc_measure_equality(s, cfg).lhs != a.lhs);

  CHECK(code_of([&] { mc_measure_equality(custom3d(), cfg); }) == Errc::Unsupported);
  MCConfig wide = cfg;
  wide.region = {3.0, 3.0};
  CHECK(code_of([&] { mc_measure_equality(ManifoldSpec::hyperbolic(2, 1.0), wide); }) == Errc::RegionEscapesChart);
}

TEST_CASE("monte carlo: test function") {
  const ManifoldSpec s = ManifoldSpec::sphere(2, 1.0);
  const BPConfiguration c = config(s, BPMode::Full, Vec::Constant(2, 0.02), "random:18", 0.3);
  const JacobianEvaluation ev = evaluate_phi(s, c);
  const MCRegion region;
  const double f = mc_test_function(s, ev.points, region);
  CHECK(f > 0.0);
  CHECK(f <= 1.5);
  // The oscillating factor weights points by position, so the order of the tuple matters.
  std::vector<Vec> rev(ev.points.rbegin(), ev.points.rend());
  CHECK(mc_test_function(s, rev, region) != doctest::Approx(f).epsilon(1e-6));

  BPConfiguration big = c;
  big.r = 0.65;  // beyond the ball cutoff
  CHECK(mc_test_function(s, evaluate_phi(s, big).points, region) == 0.0);
}

TEST_CASE("sampling: streams and presets") {
  Rng a(5, 1, 2), b(5, 1, 2), c(5, 1, 3);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(a.bits() != c.bits());

  Rng n(9);
  double mean = 0, sq = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double x = n.normal();
    mean += x;
    sq += x * x;
  }
  mean /= N;
  CHECK(std::abs(mean) <= 0.01);
  CHECK(std::abs(sq / N - 1.0) <= 0.02);

  for (int d : {2, 3, 4}) {
    const std::vector<Vec> s = regular_simplex(d);
    REQUIRE(static_cast<int>(s.size()) == d + 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::abs(s[i].norm() - 1.0) <= 1e-14);
      for (std::size_t j = i + 1; j < s.size(); ++j) CHECK(s[i].dot(s[j]) == doctest::Approx(-1.0 / d).epsilon(1e-12));
    }
  }
  const std::vector<Vec> hp = preset_directions("orthants", BPMode::Hyperplane, 3);
  REQUIRE(hp.size() == 4);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(hp[static_cast<std::size_t>(i)].dot(hp[3])) <= 1e-15);
  const std::vector<Vec> rnd = preset_directions("random:3", BPMode::Hyperplane, 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(rnd[static_cast<std::size_t>(i)].dot(rnd[3])) <= 1e-14);
  const std::vector<Vec> ex = preset_directions("3,4", BPMode::Antipodal, 2);
  CHECK(ex[0][0] == doctest::Approx(0.6));
  CHECK(code_of([] { preset_directions("random:x", BPMode::Full, 2); }) == Errc::InvalidConfiguration);
  CHECK(code_of([] { preset_directions("1,0;0,1", BPMode::Full, 2); }) == Errc::InvalidConfiguration);
}
